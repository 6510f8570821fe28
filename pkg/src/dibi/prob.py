"""Exact-rational distributions over memories and input-preserving Markov kernels.

States of the probabilistic model are kernels f from memories over dom(f) to
distributions over memories over rng(f), with dom(f) a subset of rng(f) and
every input copied verbatim into the output (input preservation). Ordinary
distributions embed as kernels with empty domain via lift.

All arithmetic uses Fraction, so every comparison in the test-suite is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .memory import (
    BOOL_UNIVERSE,
    EMPTY_MEMORY,
    INCOMPATIBLE,
    DomainError,
    Incompatible,
    Memory,
    Value,
    VarSet,
    enumerate_memories,
    join,
    memory,
    project,
)

Rational = Fraction
Event = Callable[[Memory], bool]


@dataclass(frozen=True)
class ZeroMass:
    """Returned when conditioning on an event of probability zero."""


ZERO_MASS = ZeroMass()


@dataclass(frozen=True)
class Undefined:
    """Result of a partial kernel composition whose side condition fails."""

    reason: str = ""


@dataclass(frozen=True)
class Dist:
    """A probability distribution over memories with a fixed domain.

    entries holds the support only (all masses positive), sorted by memory,
    and must sum to exactly 1.
    """

    dom: VarSet
    entries: tuple[tuple[Memory, Fraction], ...]
    universe: tuple[Value, ...] = BOOL_UNIVERSE

    def __post_init__(self):
        object.__setattr__(self, "dom", frozenset(self.dom))
        ordered = tuple(sorted(self.entries, key=lambda e: e[0].sort_key()))
        object.__setattr__(self, "entries", ordered)
        seen = set()
        total = Fraction(0)
        for m, p in ordered:
            if m.dom != self.dom:
                raise ValueError(f"memory {m!r} not over domain {sorted(self.dom)}")
            if m in seen:
                raise ValueError(f"duplicate memory in distribution: {m!r}")
            seen.add(m)
            if not isinstance(p, Fraction) or p <= 0:
                raise ValueError(f"masses must be positive rationals: {m!r} -> {p!r}")
            for _, v in m.entries:
                if v not in self.universe:
                    raise ValueError(f"value {v!r} outside universe {self.universe}")
            total += p
        if total != 1:
            raise ValueError(f"masses sum to {total}, expected 1")

    def mass(self, m: Memory) -> Fraction:
        for mm, p in self.entries:
            if mm == m:
                return p
        return Fraction(0)

    @property
    def support(self) -> tuple[Memory, ...]:
        return tuple(m for m, _ in self.entries)


def dist(weights: Mapping[Memory, Fraction] | Iterable[tuple[Memory, Fraction]],
         universe: tuple[Value, ...] = BOOL_UNIVERSE,
         dom: VarSet | None = None) -> Dist:
    """Build a Dist from memory weights, dropping zero entries."""
    items = weights.items() if isinstance(weights, Mapping) else list(weights)
    entries = tuple((m, Fraction(p)) for m, p in items if p != 0)
    if dom is None:
        if not entries:
            raise ValueError("cannot infer domain of an empty weight table")
        dom = entries[0][0].dom
    return Dist(frozenset(dom), entries, universe)


def dist_unit(m: Memory, universe: tuple[Value, ...] = BOOL_UNIVERSE) -> Dist:
    """The point distribution at m."""
    return Dist(m.dom, ((m, Fraction(1)),), universe)


def dist_bind(mu: Dist, k: Callable[[Memory], Dist]) -> Dist:
    """Monad bind: push mu forward through the memory-indexed family k.

    All k outputs must share one domain, otherwise DomainError is raised.
    """
    acc: dict[Memory, Fraction] = {}
    out_dom: VarSet | None = None
    for m, p in mu.entries:
        nu = k(m)
        if out_dom is None:
            out_dom = nu.dom
        elif nu.dom != out_dom:
            raise DomainError(
                f"bind continuation returned mismatched domains: {sorted(out_dom)} vs {sorted(nu.dom)}")
        for m2, q in nu.entries:
            acc[m2] = acc.get(m2, Fraction(0)) + p * q
    assert out_dom is not None
    return dist(acc, universe=mu.universe, dom=out_dom)


def marginal(mu: Dist, V: Iterable[str]) -> Dist:
    """Push mu onto the sub-domain V."""
    V = frozenset(V)
    if not V <= mu.dom:
        raise DomainError(f"cannot marginalize to {sorted(V)}: domain is {sorted(mu.dom)}")
    acc: dict[Memory, Fraction] = {}
    for m, p in mu.entries:
        mm = project(m, V)
        acc[mm] = acc.get(mm, Fraction(0)) + p
    return dist(acc, universe=mu.universe, dom=V)


def condition(mu: Dist, e: Event) -> Dist | ZeroMass:
    """Condition mu on the event e, or report zero mass."""
    hits = [(m, p) for m, p in mu.entries if e(m)]
    total = sum((p for _, p in hits), Fraction(0))
    if total == 0:
        return ZERO_MASS
    return dist({m: p / total for m, p in hits}, universe=mu.universe, dom=mu.dom)


def convex(p: Fraction, mu1: Dist, mu2: Dist) -> Dist:
    """The mixture p * mu1 + (1-p) * mu2, lazy in the untaken branch at 0 and 1."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"mixture weight must lie in [0, 1]: {p}")
    if p == 1:
        return mu1
    if p == 0:
        return mu2
    if mu1.dom != mu2.dom:
        raise DomainError(f"mixture domains differ: {sorted(mu1.dom)} vs {sorted(mu2.dom)}")
    if mu1.universe != mu2.universe:
        raise ValueError("mixture universes differ")
    acc: dict[Memory, Fraction] = {}
    for m, q in mu1.entries:
        acc[m] = acc.get(m, Fraction(0)) + p * q
    for m, q in mu2.entries:
        acc[m] = acc.get(m, Fraction(0)) + (1 - p) * q
    return dist(acc, universe=mu1.universe, dom=mu1.dom)


def product(mu1: Dist, mu2: Dist) -> Dist:
    """Independent product of distributions over disjoint domains."""
    if mu1.dom & mu2.dom:
        raise DomainError(f"product domains overlap on {sorted(mu1.dom & mu2.dom)}")
    if mu1.universe != mu2.universe:
        raise ValueError("product universes differ")
    acc: dict[Memory, Fraction] = {}
    for m1, p in mu1.entries:
        for m2, q in mu2.entries:
            j = join(m1, m2)
            assert isinstance(j, Memory)
            acc[j] = p * q
    return dist(acc, universe=mu1.universe, dom=mu1.dom | mu2.dom)


@dataclass(frozen=True)
class MarkovKernel:
    """An input-preserving Markov kernel between memory spaces.

    rows maps memories over dom to distributions over rng. Input
    preservation: marginalizing any output back to dom returns the input
    point mass, so the kernel never forgets or resamples what it was given.

    rows need not cover every memory over dom. A kernel produced by
    conditioning carries rows only for inputs the source state can reach;
    on the missing inputs the kernel is unconstrained, and the operations
    below treat absent rows as freely choosable rather than fixing an
    arbitrary filler.
    """

    dom: VarSet
    rng: VarSet
    rows: tuple[tuple[Memory, Dist], ...]
    universe: tuple[Value, ...] = BOOL_UNIVERSE

    def __post_init__(self):
        object.__setattr__(self, "dom", frozenset(self.dom))
        object.__setattr__(self, "rng", frozenset(self.rng))
        if not self.dom <= self.rng:
            raise ValueError(f"domain {sorted(self.dom)} must lie inside range {sorted(self.rng)}")
        ordered = tuple(sorted(self.rows, key=lambda r: r[0].sort_key()))
        object.__setattr__(self, "rows", ordered)
        if not ordered:
            raise ValueError("a kernel needs at least one row")
        allowed = set(enumerate_memories(self.dom, self.universe))
        inputs = [m for m, _ in ordered]
        if len(set(inputs)) != len(inputs) or not set(inputs) <= allowed:
            raise ValueError("row inputs must be distinct memories over the domain")
        for m, out in ordered:
            if out.dom != self.rng:
                raise ValueError(f"output domain {sorted(out.dom)} differs from range {sorted(self.rng)}")
            if out.universe != self.universe:
                raise ValueError("output universe differs from kernel universe")
            if marginal(out, self.dom) != dist_unit(m, self.universe):
                raise ValueError(f"kernel does not preserve its input on row {m!r}")

    def __call__(self, m: Memory) -> Dist:
        out = self.row(m)
        if out is None:
            raise DomainError(f"memory {m!r} not in kernel domain {sorted(self.dom)}")
        return out

    def row(self, m: Memory) -> Dist | None:
        """The output at m, or None where the kernel has no row."""
        table = self.__dict__.get("_table")
        if table is None:
            table = {mm: out for mm, out in self.rows}
            self.__dict__["_table"] = table
        return table.get(m)


def kernel_from_fn(dom: Iterable[str], rng: Iterable[str],
                   fn: Callable[[Memory], Dist],
                   universe: tuple[Value, ...] = BOOL_UNIVERSE) -> MarkovKernel:
    """Tabulate fn over every memory on dom."""
    dom = frozenset(dom)
    rows = tuple((m, fn(m)) for m in enumerate_memories(dom, universe))
    return MarkovKernel(dom, frozenset(rng), rows, universe)


def lift(mu: Dist) -> MarkovKernel:
    """Embed a distribution as a kernel out of the empty memory."""
    return MarkovKernel(frozenset(), mu.dom, ((EMPTY_MEMORY, mu),), mu.universe)


def kernel_unit(S: Iterable[str], universe: tuple[Value, ...] = BOOL_UNIVERSE) -> MarkovKernel:
    """The identity kernel on memories over S."""
    S = frozenset(S)
    return kernel_from_fn(S, S, lambda m: dist_unit(m, universe), universe)


def kernel_marginal(f: MarkovKernel, V: Iterable[str]) -> MarkovKernel:
    """Marginalize every output of f onto V. Requires dom(f) <= V <= rng(f)."""
    V = frozenset(V)
    if not (f.dom <= V <= f.rng):
        raise DomainError(
            f"kernel marginal needs dom <= V <= rng: dom {sorted(f.dom)}, V {sorted(V)}, rng {sorted(f.rng)}")
    return MarkovKernel(f.dom, V, tuple((m, marginal(out, V)) for m, out in f.rows), f.universe)


def par(f: MarkovKernel, g: MarkovKernel) -> MarkovKernel | Undefined:
    """Parallel composition: run f and g on the relevant parts of a shared input.

    Defined exactly when rng(f) & rng(g) == dom(f) & dom(g): the only overlap
    between the outputs is input material both sides preserve, so the joined
    outputs always agree there.
    """
    if f.universe != g.universe:
        raise ValueError("parallel composition across different universes")
    if (f.rng & g.rng) != (f.dom & g.dom):
        return Undefined(
            f"range overlap {sorted(f.rng & g.rng)} differs from domain overlap {sorted(f.dom & g.dom)}")
    D = f.dom | g.dom
    R = f.rng | g.rng

    rows = []
    for m in enumerate_memories(D, f.universe):
        left = f.row(project(m, f.dom))
        right = g.row(project(m, g.dom))
        if left is None or right is None:
            # either factor is free here, so the composite stays free too
            continue
        acc: dict[Memory, Fraction] = {}
        for m1, p in left.entries:
            for m2, q in right.entries:
                j = join(m1, m2)
                if isinstance(j, Incompatible):
                    continue
                acc[j] = acc.get(j, Fraction(0)) + p * q
        rows.append((m, dist(acc, universe=f.universe, dom=R)))
    return MarkovKernel(D, R, tuple(rows), f.universe)


def seq(f: MarkovKernel, g: MarkovKernel) -> MarkovKernel | Undefined:
    """Sequential composition, defined exactly when rng(f) == dom(g)."""
    if f.universe != g.universe:
        raise ValueError("sequential composition across different universes")
    if f.rng != g.dom:
        return Undefined(
            f"range {sorted(f.rng)} does not match next domain {sorted(g.dom)}")
    rows = tuple((m, dist_bind(out, g)) for m, out in f.rows)
    return MarkovKernel(f.dom, g.rng, rows, f.universe)


def preceq(g: MarkovKernel, f: MarkovKernel) -> bool:
    """Decide whether g is a subkernel of f.

    g sits below f when f's behaviour on rng(g) union dom(f) is exactly g run
    in parallel with the identity on the leftover input variables. The three
    set conditions make that comparison well-typed; the row comparison is the
    actual test. Rows f does not carry never constrain g, and whenever g has
    no row at an input f reaches, g's free completion there can copy f's
    behaviour, so only row pairs present on both sides are compared.
    """
    if g.universe != f.universe:
        raise ValueError("subkernel comparison across different universes")
    if not g.dom <= f.dom:
        return False
    if (g.rng - g.dom) & (f.dom - g.dom):
        return False
    V = g.rng | f.dom
    if not V <= f.rng:
        return False
    leftover = f.dom - g.dom
    for m, out in f.rows:
        gm = g.row(project(m, g.dom))
        if gm is None:
            continue
        keep = project(m, leftover)
        acc: dict[Memory, Fraction] = {}
        for m1, p in gm.entries:
            j = join(m1, keep)
            assert isinstance(j, Memory)
            acc[j] = p
        if marginal(out, V) != dist(acc, universe=f.universe, dom=V):
            return False
    return True


def disintegrate(f: MarkovKernel, R1: Iterable[str]) -> tuple[MarkovKernel, MarkovKernel]:
    """Split f through the intermediate domain R1.

    Returns (f1, g) with f1 the marginal of f on R1 and g the conditional
    kernel from R1 to rng(f); the defining law is seq(f1, g) == f. Inputs
    that f1 gives zero mass get no row at all: the law leaves g free there,
    and fixing a filler would discard decompositions the free choice admits.
    """
    R1 = frozenset(R1)
    if not (f.dom <= R1 <= f.rng):
        raise DomainError(
            f"disintegration needs dom <= R1 <= rng: dom {sorted(f.dom)}, R1 {sorted(R1)}, rng {sorted(f.rng)}")
    f1 = kernel_marginal(f, R1)
    rows = []
    for d, mid in f1.rows:
        out = f(d)
        for r, mass_r in mid.entries:
            fiber = {m: p / mass_r for m, p in out.entries if project(m, R1) == r}
            rows.append((r, dist(fiber, universe=f.universe, dom=f.rng)))
    g = MarkovKernel(R1, f.rng, tuple(rows), f.universe)
    return f1, g
