"""Relations over memories and nondeterministic (powerset) kernels.

The relational model replaces distributions with nonempty sets of memories:
a powerset kernel maps each input memory to the set of outputs it allows,
preserving the input inside every output. Relations embed as kernels with
empty domain via rel_lift.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .memory import (
    BOOL_UNIVERSE,
    EMPTY_MEMORY,
    DomainError,
    Incompatible,
    Memory,
    Value,
    VarSet,
    enumerate_memories,
    join,
    project,
)
from .prob import Undefined


@dataclass(frozen=True)
class Relation:
    """A finite relation: a set of memories sharing one attribute set.

    The empty relation is allowed (joins can produce it); kernels built from
    relations require nonempty row sets.
    """

    attrs: VarSet
    rows: frozenset
    universe: tuple[Value, ...] = BOOL_UNIVERSE

    def __post_init__(self):
        object.__setattr__(self, "attrs", frozenset(self.attrs))
        object.__setattr__(self, "rows", frozenset(self.rows))
        for m in self.rows:
            if m.dom != self.attrs:
                raise ValueError(f"row {m!r} not over attributes {sorted(self.attrs)}")
            for _, v in m.entries:
                if v not in self.universe:
                    raise ValueError(f"value {v!r} outside universe {self.universe}")

    def sorted_rows(self) -> list[Memory]:
        return sorted(self.rows, key=lambda m: m.sort_key())


def rel_project(R: Relation, Y: Iterable[str]) -> Relation:
    """Project R onto the attributes Y."""
    Y = frozenset(Y)
    if not Y <= R.attrs:
        raise DomainError(f"cannot project onto {sorted(Y)}: attributes are {sorted(R.attrs)}")
    return Relation(Y, frozenset(project(m, Y) for m in R.rows), R.universe)


def natural_join(R1: Relation, R2: Relation) -> Relation:
    """All joins of compatible row pairs from R1 and R2."""
    if R1.universe != R2.universe:
        raise ValueError("join across different universes")
    rows = set()
    for m1 in R1.rows:
        for m2 in R2.rows:
            j = join(m1, m2)
            if not isinstance(j, Incompatible):
                rows.add(j)
    return Relation(R1.attrs | R2.attrs, frozenset(rows), R1.universe)


@dataclass(frozen=True)
class PowersetKernel:
    """A nondeterministic kernel: each input maps to a nonempty output set.

    Mirrors MarkovKernel: rows covers every memory over dom in enumeration
    order, outputs live over rng, and each output extends its input.
    """

    dom: VarSet
    rng: VarSet
    rows: tuple[tuple[Memory, frozenset], ...]
    universe: tuple[Value, ...] = BOOL_UNIVERSE

    def __post_init__(self):
        object.__setattr__(self, "dom", frozenset(self.dom))
        object.__setattr__(self, "rng", frozenset(self.rng))
        if not self.dom <= self.rng:
            raise ValueError(f"domain {sorted(self.dom)} must lie inside range {sorted(self.rng)}")
        ordered = tuple(sorted(((m, frozenset(out)) for m, out in self.rows),
                               key=lambda r: r[0].sort_key()))
        object.__setattr__(self, "rows", ordered)
        expected = enumerate_memories(self.dom, self.universe)
        if [m for m, _ in ordered] != expected:
            raise ValueError("rows must cover every input memory exactly once")
        for m, out in ordered:
            if not out:
                raise ValueError(f"kernel output must be nonempty on row {m!r}")
            for s in out:
                if s.dom != self.rng:
                    raise ValueError(f"output {s!r} not over range {sorted(self.rng)}")
                for _, v in s.entries:
                    if v not in self.universe:
                        raise ValueError(f"value {v!r} outside universe {self.universe}")
                if project(s, self.dom) != m:
                    raise ValueError(f"kernel does not preserve its input on row {m!r}")

    def __call__(self, m: Memory) -> frozenset:
        table = self.__dict__.get("_table")
        if table is None:
            table = {mm: out for mm, out in self.rows}
            self.__dict__["_table"] = table
        out = table.get(m)
        if out is None:
            raise DomainError(f"memory {m!r} not in kernel domain {sorted(self.dom)}")
        return out


def rel_kernel_from_fn(dom: Iterable[str], rng: Iterable[str],
                       fn: Callable[[Memory], frozenset],
                       universe: tuple[Value, ...] = BOOL_UNIVERSE) -> PowersetKernel:
    """Tabulate fn over every memory on dom."""
    dom = frozenset(dom)
    rows = tuple((m, fn(m)) for m in enumerate_memories(dom, universe))
    return PowersetKernel(dom, frozenset(rng), rows, universe)


def rel_lift(R: Relation) -> PowersetKernel:
    """Embed a nonempty relation as a kernel out of the empty memory."""
    if not R.rows:
        raise ValueError("cannot lift an empty relation: kernel outputs must be nonempty")
    return PowersetKernel(frozenset(), R.attrs, ((EMPTY_MEMORY, R.rows),), R.universe)


def rel_unit(S: Iterable[str], universe: tuple[Value, ...] = BOOL_UNIVERSE) -> PowersetKernel:
    """The identity kernel on memories over S."""
    S = frozenset(S)
    return rel_kernel_from_fn(S, S, lambda m: frozenset({m}), universe)


def rel_kernel_marginal(f: PowersetKernel, V: Iterable[str]) -> PowersetKernel:
    """Project every output set of f onto V. Requires dom(f) <= V <= rng(f)."""
    V = frozenset(V)
    if not (f.dom <= V <= f.rng):
        raise DomainError(
            f"kernel marginal needs dom <= V <= rng: dom {sorted(f.dom)}, V {sorted(V)}, rng {sorted(f.rng)}")
    rows = tuple((m, frozenset(project(s, V) for s in out)) for m, out in f.rows)
    return PowersetKernel(f.dom, V, rows, f.universe)


def rel_par(f: PowersetKernel, g: PowersetKernel) -> PowersetKernel | Undefined:
    """Parallel composition by joining output pairs, same side condition as par."""
    if f.universe != g.universe:
        raise ValueError("parallel composition across different universes")
    if (f.rng & g.rng) != (f.dom & g.dom):
        return Undefined(
            f"range overlap {sorted(f.rng & g.rng)} differs from domain overlap {sorted(f.dom & g.dom)}")
    D = f.dom | g.dom
    R = f.rng | g.rng

    def fn(m: Memory) -> frozenset:
        out = set()
        for s1 in f(project(m, f.dom)):
            for s2 in g(project(m, g.dom)):
                j = join(s1, s2)
                if not isinstance(j, Incompatible):
                    out.add(j)
        return frozenset(out)

    return rel_kernel_from_fn(D, R, fn, f.universe)


def rel_seq(f: PowersetKernel, g: PowersetKernel) -> PowersetKernel | Undefined:
    """Sequential composition, defined exactly when rng(f) == dom(g)."""
    if f.universe != g.universe:
        raise ValueError("sequential composition across different universes")
    if f.rng != g.dom:
        return Undefined(
            f"range {sorted(f.rng)} does not match next domain {sorted(g.dom)}")

    def fn(m: Memory) -> frozenset:
        out = set()
        for s in f(m):
            out |= g(s)
        return frozenset(out)

    return rel_kernel_from_fn(f.dom, g.rng, fn, f.universe)


def rel_preceq(g: PowersetKernel, f: PowersetKernel) -> bool:
    """Decide whether g is a subkernel of f; same conditions as preceq."""
    if g.universe != f.universe:
        raise ValueError("subkernel comparison across different universes")
    if not g.dom <= f.dom:
        return False
    if (g.rng - g.dom) & (f.dom - g.dom):
        return False
    V = g.rng | f.dom
    if not V <= f.rng:
        return False
    pad = rel_unit(f.dom - g.dom, f.universe)
    rhs = rel_par(g, pad)
    assert isinstance(rhs, PowersetKernel)
    return rel_kernel_marginal(f, V) == rhs


def rel_disintegrate(f: PowersetKernel, R1: Iterable[str]) -> tuple[PowersetKernel, PowersetKernel]:
    """Split f through the intermediate domain R1 with rel_seq(f1, g) == f.

    g maps r to the fiber of f's outputs over r; on inputs outside the image
    of f the fiber is empty, and g falls back to the set of all extensions of
    r, keeping it total and nonempty without affecting the law.
    """
    R1 = frozenset(R1)
    if not (f.dom <= R1 <= f.rng):
        raise DomainError(
            f"disintegration needs dom <= R1 <= rng: dom {sorted(f.dom)}, R1 {sorted(R1)}, rng {sorted(f.rng)}")
    f1 = rel_kernel_marginal(f, R1)
    extensions = enumerate_memories(f.rng - R1, f.universe)

    def fn(r: Memory) -> frozenset:
        d = project(r, f.dom)
        fiber = frozenset(s for s in f(d) if project(s, R1) == r)
        if fiber:
            return fiber
        full = set()
        for ext in extensions:
            j = join(r, ext)
            assert isinstance(j, Memory)
            full.add(j)
        return frozenset(full)

    g = rel_kernel_from_fn(R1, f.rng, fn, f.universe)
    return f1, g
