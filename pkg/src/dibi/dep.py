"""Conditional independence and join dependency, each decided two ways.

Every judgment has a brute-force oracle straight from its defining equation
and a separate route through formula satisfaction; the two are kept apart so
the suites can compare them. Seeded generators for distributions, relations,
and composite kernel states live here too, shared by the fuzz harnesses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .kernels import KernelState, subsets
from .memory import (
    BOOL_UNIVERSE,
    DomainError,
    EMPTY_MEMORY,
    INCOMPATIBLE,
    Memory,
    Value,
    VarSet,
    enumerate_memories,
    join,
)
from .prob import (
    Dist,
    MarkovKernel,
    Undefined,
    dist,
    dist_unit,
    kernel_from_fn,
    lift,
    marginal,
    par,
    product,
    seq,
)
from .rel import (
    PowersetKernel,
    Relation,
    natural_join,
    rel_kernel_from_fn,
    rel_lift,
    rel_par,
    rel_project,
    rel_seq,
)
from .semantics import sat_ci_shape


@dataclass(frozen=True)
class CITriple:
    """X independent of Y given Z; the sets may overlap."""

    X: VarSet
    Y: VarSet
    Z: VarSet

    def __post_init__(self):
        object.__setattr__(self, "X", frozenset(self.X))
        object.__setattr__(self, "Y", frozenset(self.Y))
        object.__setattr__(self, "Z", frozenset(self.Z))


class GraphoidAxiom(Enum):
    SYMMETRY = "Symmetry"
    DECOMPOSITION = "Decomposition"
    WEAK_UNION = "WeakUnion"
    CONTRACTION = "Contraction"


# ------------------------------------------------------------ oracle routes

def ci_oracle(mu: Dist, t: CITriple) -> bool:
    """Exact check of mu(X|Z) * mu(Y|Z) == mu(X,Y|Z) at every assignment.

    Quantifies over all value combinations of X, Y, and Z separately, so when
    X and Y overlap the equation forces the shared variables to be determined
    by Z wherever Z has mass.
    """
    need = t.X | t.Y | t.Z
    if not need <= mu.dom:
        raise DomainError(
            f"triple mentions {sorted(need - mu.dom)} outside the distribution")
    mz = dict(marginal(mu, t.Z).entries)
    mxz = dict(marginal(mu, t.X | t.Z).entries)
    myz = dict(marginal(mu, t.Y | t.Z).entries)
    mxyz = dict(marginal(mu, need).entries)
    zero = Fraction(0)

    def mass(table, m):
        return zero if m is INCOMPATIBLE else table.get(m, zero)

    xs = enumerate_memories(t.X, mu.universe)
    ys = enumerate_memories(t.Y, mu.universe)
    for z, pz in mz.items():
        for x in xs:
            xz = join(x, z)
            pxz = mass(mxz, xz)
            for y in ys:
                pyz = mass(myz, join(y, z))
                pxyz = zero if xz is INCOMPATIBLE else mass(mxyz, join(xz, y))
                if pxz * pyz != pxyz * pz:
                    return False
    return True


def jd_oracle(R: Relation, X: Iterable[str], Y: Iterable[str]) -> bool:
    """R decomposes losslessly into its projections onto X and Y."""
    X, Y = frozenset(X), frozenset(Y)
    if X | Y != R.attrs:
        raise DomainError(
            f"components {sorted(X)} and {sorted(Y)} must cover {sorted(R.attrs)}")
    return natural_join(rel_project(R, X), rel_project(R, Y)) == R


# ----------------------------------------------------------- formula routes

@dataclass(frozen=True)
class CIFormulaResult:
    formula_holds: bool
    side_condition: bool


def ci_via_formula(mu: Dist, t: CITriple) -> CIFormulaResult:
    """Decide the triple by satisfaction of its independence formula.

    formula_holds is satisfaction of <0 |> Z> ; (<Z |> X> * <Z |> Y>) at the
    lifted distribution; the side condition X & Y <= Z is reported alongside
    because satisfaction characterizes exactly oracle-CI plus that condition.
    """
    need = t.X | t.Y | t.Z
    if not need <= mu.dom:
        raise DomainError(
            f"triple mentions {sorted(need - mu.dom)} outside the distribution")
    return CIFormulaResult(
        formula_holds=sat_ci_shape(lift(mu), t.Z, t.X, t.Y),
        side_condition=t.X & t.Y <= t.Z)


def jd_via_formula(R: Relation, X: Iterable[str], Y: Iterable[str]) -> bool:
    """Decide the join dependency by the same formula shape over sets.

    The shared attributes play the conditioning role. The empty relation has
    no lifted state, so it is rejected rather than silently agreed with the
    oracle.
    """
    X, Y = frozenset(X), frozenset(Y)
    if X | Y != R.attrs:
        raise DomainError(
            f"components {sorted(X)} and {sorted(Y)} must cover {sorted(R.attrs)}")
    return sat_ci_shape(rel_lift(R), X & Y, X, Y)


# --------------------------------------------------------- semi-graphoid laws

def semigraphoid_instance(model: KernelState, ax: GraphoidAxiom,
                          X: Iterable[str], Y: Iterable[str],
                          Z: Iterable[str],
                          W: Iterable[str] = frozenset()) -> bool:
    """Truth of one semi-graphoid implication instance at a kernel state.

    Independence statements are read off as satisfaction of the formula
    <0 |> Z> ; (<Z |> X> * <Z |> Y>), so the check exercises the formula
    route, not the numeric oracle.
    """
    X, Y, Z, W = frozenset(X), frozenset(Y), frozenset(Z), frozenset(W)

    def indep(a: VarSet, c: VarSet, b: VarSet) -> bool:
        return sat_ci_shape(model, c, a, b)

    if ax is GraphoidAxiom.SYMMETRY:
        return not indep(X, Z, Y) or indep(Y, Z, X)
    if ax is GraphoidAxiom.DECOMPOSITION:
        return not indep(X, Z, Y | W) or (indep(X, Z, Y) and indep(X, Z, W))
    if ax is GraphoidAxiom.WEAK_UNION:
        return not indep(X, Z, Y | W) or indep(X, Z | W, Y)
    if ax is GraphoidAxiom.CONTRACTION:
        return (not (indep(X, Z, Y) and indep(X, Z | Y, W))
                or indep(X, Z, Y | W))
    raise ValueError(f"unknown axiom {ax!r}")  # pragma: no cover


# ------------------------------------------------------------ sweep helpers

def subset_triples(vars: Iterable[str]) -> list[tuple[VarSet, VarSet, VarSet]]:
    """All (X, Y, Z) subset triples, 8^|vars| of them."""
    ss = subsets(vars)
    return [(x, y, z) for x in ss for y in ss for z in ss]


def disjoint_triples(vars: Iterable[str]) -> list[tuple[VarSet, VarSet, VarSet]]:
    """All pairwise-disjoint (X, Y, Z): each variable lands in one set or none."""
    out = []
    vs = sorted(frozenset(vars))
    for assignment in _bucket_assignments(vs):
        x = frozenset(v for v, b in zip(vs, assignment) if b == 0)
        y = frozenset(v for v, b in zip(vs, assignment) if b == 1)
        z = frozenset(v for v, b in zip(vs, assignment) if b == 2)
        out.append((x, y, z))
    return out


def _bucket_assignments(vs):
    if not vs:
        yield ()
        return
    for rest in _bucket_assignments(vs[1:]):
        for b in (0, 1, 2, 3):
            yield (b,) + rest


# --------------------------------------------------------- seeded generators

WEIGHT_GRID = (0, 1, 2, 3, 4)


def random_dist(S: Iterable[str], seed: int,
                universe: tuple[Value, ...] = BOOL_UNIVERSE) -> Dist:
    """Grid-weighted distribution over S: weights in {0..4}, exactly normalized.

    The coarse grid makes ties and factorizations likely enough that the
    positive branches of the CI sweeps actually fire.
    """
    S = frozenset(S)
    rng = random.Random(seed)
    mems = enumerate_memories(S, universe)
    while True:
        weights = [rng.choice(WEIGHT_GRID) for _ in mems]
        if any(weights):
            break
    total = sum(weights)
    return dist({m: Fraction(w, total) for m, w in zip(mems, weights) if w},
                universe=universe, dom=S)


def random_table_kernel(D: Iterable[str], T: Iterable[str], seed: int,
                        universe: tuple[Value, ...] = BOOL_UNIVERSE) -> MarkovKernel:
    """Kernel D -> D u T with an independent grid distribution per input."""
    D, T = frozenset(D), frozenset(T)
    rng = random.Random(seed)
    rows = {m: random_dist(T, rng.randrange(1 << 30), universe)
            for m in enumerate_memories(D, universe)}

    def fn(m: Memory) -> Dist:
        return product(dist_unit(m, universe), rows[m])

    return kernel_from_fn(D, D | T, fn, universe)


def random_ci_dist(X: Iterable[str], Y: Iterable[str], Z: Iterable[str],
                   seed: int,
                   universe: tuple[Value, ...] = BOOL_UNIVERSE) -> Dist:
    """Distribution over X u Y u Z with X and Y independent given Z, by construction."""
    X, Y, Z = frozenset(X), frozenset(Y), frozenset(Z)
    if (X & Y) or (X & Z) or (Y & Z):
        raise DomainError("constructive CI needs pairwise disjoint blocks")
    rng = random.Random(seed)
    muz = random_dist(Z, rng.randrange(1 << 30), universe)
    kx = random_table_kernel(Z, X, rng.randrange(1 << 30), universe)
    ky = random_table_kernel(Z, Y, rng.randrange(1 << 30), universe)
    f = seq(lift(muz), par(kx, ky))
    assert not isinstance(f, Undefined)
    return f(EMPTY_MEMORY)


def random_relation(S: Iterable[str], seed: int,
                    universe: tuple[Value, ...] = BOOL_UNIVERSE) -> Relation:
    """Nonempty relation over S: each possible row kept with probability 1/2."""
    S = frozenset(S)
    rng = random.Random(seed)
    mems = enumerate_memories(S, universe)
    while True:
        rows = frozenset(m for m in mems if rng.random() < 0.5)
        if rows:
            return Relation(S, rows, universe)


def random_jd_relation(X: Iterable[str], Y: Iterable[str], seed: int,
                       universe: tuple[Value, ...] = BOOL_UNIVERSE) -> Relation:
    """Relation over X u Y satisfying the join dependency, built as a join."""
    X, Y = frozenset(X), frozenset(Y)
    rng = random.Random(seed)
    while True:
        R = natural_join(random_relation(X, rng.randrange(1 << 30), universe),
                         random_relation(Y, rng.randrange(1 << 30), universe))
        if R.rows:
            return R


def random_rel_table_kernel(D: Iterable[str], T: Iterable[str], seed: int,
                            universe: tuple[Value, ...] = BOOL_UNIVERSE) -> PowersetKernel:
    """Powerset kernel D -> D u T with a nonempty random output set per input."""
    D, T = frozenset(D), frozenset(T)
    rng = random.Random(seed)
    t_mems = enumerate_memories(T, universe)
    rows = {}
    for m in enumerate_memories(D, universe):
        while True:
            picked = [t for t in t_mems if rng.random() < 0.5]
            if picked:
                break
        rows[m] = frozenset(join(m, t) for t in picked)

    def fn(m: Memory) -> frozenset:
        return rows[m]

    return rel_kernel_from_fn(D, D | T, fn, universe)


_POOL = ("s", "u", "v", "w")


def random_kernel(model: str = "prob", seed: int = 0,
                  universe: tuple[Value, ...] = BOOL_UNIVERSE) -> KernelState:
    """Composite kernel state assembled from lifts, units, par, and seq.

    The variable pool is split into a domain block and two extension blocks;
    the state is a table kernel over the first, optionally composed with a
    second in parallel or in sequence, optionally preceded by a lifted input
    distribution. All side conditions hold by construction.
    """
    if model not in ("prob", "rel"):
        raise ValueError(f"unknown model {model!r}")
    rng = random.Random(seed)
    pool = list(_POOL)
    rng.shuffle(pool)
    i, j = sorted(rng.sample(range(len(pool) + 1), 2))
    dom = frozenset(pool[:i])
    block1 = frozenset(pool[i:j])
    block2 = frozenset(pool[j:])

    def table(d, t):
        sub = rng.randrange(1 << 30)
        if model == "prob":
            return random_table_kernel(d, t, sub, universe)
        return random_rel_table_kernel(d, t, sub, universe)

    f = table(dom, block1)
    if block2:
        compose = rng.choice(("skip", "par", "seq"))
        if compose == "par":
            f = par(f, table(dom, block2)) if model == "prob" \
                else rel_par(f, table(dom, block2))
        elif compose == "seq":
            g = table(dom | block1, block2)
            f = seq(f, g) if model == "prob" else rel_seq(f, g)
    if dom and rng.random() < 0.5:
        intro = table(frozenset(), dom)
        f = seq(intro, f) if model == "prob" else rel_seq(intro, f)
    assert not isinstance(f, Undefined)
    return f
