"""One interface over both kernel models, plus canonical subkernel construction.

The satisfaction checker and the frame-property suite work uniformly over
Markov kernels and powerset kernels; this module hides the model split behind
k_* wrappers and provides the canonical subkernel family: for each admissible
(domain, range) pair there is at most one subkernel, recovered by
marginalizing outputs and checking that the result depends only on the chosen
input part.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Union

from .memory import Memory, Value, VarSet, enumerate_memories, project
from .prob import (
    Dist,
    MarkovKernel,
    Undefined,
    disintegrate,
    kernel_marginal,
    kernel_unit,
    marginal,
    par,
    preceq,
    seq,
)
from .rel import (
    PowersetKernel,
    rel_disintegrate,
    rel_kernel_marginal,
    rel_par,
    rel_preceq,
    rel_seq,
    rel_unit,
)

KernelState = Union[MarkovKernel, PowersetKernel]


def is_prob(f: KernelState) -> bool:
    return isinstance(f, MarkovKernel)


def k_marginal(f: KernelState, V: Iterable[str]) -> KernelState:
    return kernel_marginal(f, V) if is_prob(f) else rel_kernel_marginal(f, V)


def k_par(f: KernelState, g: KernelState):
    return par(f, g) if is_prob(f) else rel_par(f, g)


def k_seq(f: KernelState, g: KernelState):
    return seq(f, g) if is_prob(f) else rel_seq(f, g)


def k_preceq(g: KernelState, f: KernelState) -> bool:
    return preceq(g, f) if is_prob(g) else rel_preceq(g, f)


def k_disintegrate(f: KernelState, R1: Iterable[str]):
    return disintegrate(f, R1) if is_prob(f) else rel_disintegrate(f, R1)


def unit_like(f: KernelState, S: Iterable[str]) -> KernelState:
    """The identity kernel on S in the same model and universe as f."""
    return kernel_unit(S, f.universe) if is_prob(f) else rel_unit(S, f.universe)


def _output_part(f: KernelState, m: Memory, R: VarSet):
    out = f(m)
    if isinstance(out, Dist):
        return marginal(out, R)
    return frozenset(project(s, R) for s in out)


def subkernel_at(f: KernelState, A: Iterable[str], R: Iterable[str]) -> KernelState | None:
    """The unique subkernel of f with domain A and range R, or None.

    Exists when A <= dom(f), A <= R <= rng(f), the leftover input variables
    stay out of R, and the R-part of f's output is the same function of the
    A-part of the input across the rows f carries. Uniqueness of subkernels
    at a given (domain, range) makes this family exhaustive: every subkernel
    of f is one of these. Inputs without a row never constrain the result,
    and A-parts seen only on such inputs stay rowless in it.
    """
    A = frozenset(A)
    R = frozenset(R)
    if not A <= f.dom:
        return None
    if not (A <= R <= f.rng):
        return None
    if (R - A) & (f.dom - A):
        return None
    groups: dict[Memory, object] = {}
    for m, _ in f.rows:
        a = project(m, A)
        part = _output_part(f, m, R)
        if a in groups:
            if groups[a] != part:
                return None
        else:
            groups[a] = part
    rows = tuple(sorted(groups.items(), key=lambda r: r[0].sort_key()))
    if is_prob(f):
        return MarkovKernel(A, R, rows, f.universe)
    return PowersetKernel(A, R, rows, f.universe)


def subsets(S: Iterable[str]) -> list[frozenset]:
    """All subsets of S in a deterministic order (by size, then lexicographic)."""
    names = sorted(frozenset(S))
    out = []
    for k in range(len(names) + 1):
        for combo in itertools.combinations(names, k):
            out.append(frozenset(combo))
    return out


def subkernels(f: KernelState) -> Iterator[tuple[VarSet, VarSet, KernelState]]:
    """Enumerate the canonical subkernel family of f in a deterministic order.

    Yields (A, R, g) for every admissible pair at which the subkernel exists.
    The admissible ranges are A plus any subset of rng(f) - dom(f): ranges
    meeting the leftover input variables are excluded up front.
    """
    fresh = subsets(f.rng - f.dom)
    for A in subsets(f.dom):
        for extra in fresh:
            R = A | extra
            g = subkernel_at(f, A, R)
            if g is not None:
                yield A, R, g
