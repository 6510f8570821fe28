"""Memories: immutable finite maps from variable names to values.

Every structure downstream (distributions, relations, kernels) is built from
memories over a finite variable set, with values drawn from a finite universe.
The default universe is boolean, written as the integers 0 and 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

Value = Union[int, str]
VarSet = frozenset

BOOL_UNIVERSE: tuple[Value, ...] = (0, 1)


class DomainError(Exception):
    """An operation referred to variables outside the relevant domain."""


@dataclass(frozen=True)
class Incompatible:
    """Result of joining two memories that disagree on a shared variable.

    This is an ordinary value, not a fault: sums over undefined joins simply
    skip the incompatible pairs.
    """


INCOMPATIBLE = Incompatible()


def value_key(v: Value) -> tuple:
    # ints order before strings so mixed universes still sort deterministically
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, v)


@dataclass(frozen=True)
class Memory:
    """An immutable assignment of values to variable names.

    Entries are kept sorted by variable name, so structural equality and
    hashing behave like equality of the underlying maps.
    """

    entries: tuple[tuple[str, Value], ...]

    def __post_init__(self):
        names = [x for x, _ in self.entries]
        if names != sorted(names):
            object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: e[0])))
            names = sorted(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable in memory: {names}")

    @property
    def dom(self) -> VarSet:
        return frozenset(x for x, _ in self.entries)

    def value(self, x: str) -> Value:
        for name, v in self.entries:
            if name == x:
                return v
        raise DomainError(f"variable {x!r} not in memory domain {sorted(self.dom)}")

    def as_dict(self) -> dict[str, Value]:
        return dict(self.entries)

    def sort_key(self) -> tuple:
        return tuple((x, value_key(v)) for x, v in self.entries)

    def __repr__(self):
        inner = " ".join(f"{x}={v}" for x, v in self.entries)
        return f"<{inner}>" if inner else "<>"


EMPTY_MEMORY = Memory(())


def memory(assignment: dict[str, Value] | Iterable[tuple[str, Value]]) -> Memory:
    """Build a memory from a mapping or an iterable of (name, value) pairs."""
    items = assignment.items() if isinstance(assignment, dict) else assignment
    return Memory(tuple(items))


def project(m: Memory, T: Iterable[str]) -> Memory:
    """Restrict m to the variables in T. Requires T to lie inside dom(m)."""
    T = frozenset(T)
    if not T <= m.dom:
        raise DomainError(f"cannot project onto {sorted(T)}: domain is {sorted(m.dom)}")
    return Memory(tuple((x, v) for x, v in m.entries if x in T))


def join(m1: Memory, m2: Memory) -> Memory | Incompatible:
    """Combine two memories that agree on their shared variables.

    Returns INCOMPATIBLE when they disagree anywhere on the overlap.
    """
    merged = dict(m1.entries)
    for x, v in m2.entries:
        if x in merged and merged[x] != v:
            return INCOMPATIBLE
        merged[x] = v
    return Memory(tuple(merged.items()))


def update(m: Memory, x: str, v: Value) -> Memory:
    """The memory m with x set to v (x may be fresh or already present)."""
    merged = dict(m.entries)
    merged[x] = v
    return Memory(tuple(merged.items()))


def enumerate_memories(S: Iterable[str], universe: tuple[Value, ...] = BOOL_UNIVERSE) -> list[Memory]:
    """All |universe|^|S| memories over S, in lexicographic order.

    Variables are taken in sorted order and values in universe order, so the
    output order is deterministic and the first memory assigns the first
    universe value everywhere.
    """
    names = sorted(frozenset(S))
    return [
        Memory(tuple(zip(names, combo)))
        for combo in itertools.product(universe, repeat=len(names))
    ]
