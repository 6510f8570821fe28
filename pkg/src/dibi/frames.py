"""Randomized validation of the frame conditions behind both kernel models.

The Kripke semantics only makes sense if the carrier of states, the
subkernel order, parallel composition, sequential composition and the unit
set fit together: composition must be monotone and associative in the right
ways, units must exist and sit below everything they pad, and parallel and
sequential composition must satisfy the exchange law.  Each requirement is
phrased here as an executable check over randomly generated kernels, and
``run_suite`` draws seeded instances of every check and counts violations.

All generation is block-structured: a variable pool is shuffled and cut into
disjoint blocks, and table kernels are drawn over those blocks so that the
side conditions of each law hold by construction.  Cuts are random, so many
blocks are empty; the degenerate cases (units, lifts, empty paddings) are
exercised alongside the generic ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .dep import random_table_kernel, random_rel_table_kernel
from .kernels import (
    KernelState,
    k_disintegrate,
    k_par,
    k_preceq,
    k_seq,
    subkernel_at,
    subsets,
)
from .memory import BOOL_UNIVERSE, Value
from .prob import Undefined, kernel_unit
from .rel import rel_unit

PROB_POOL = ("s", "u", "v", "w")
REL_POOL = ("s", "u", "v")
REL_UNIVERSE: tuple[Value, ...] = (0, 1, 2)

Universe = tuple[Value, ...]
Check = Callable[[random.Random, str, tuple, Universe], Optional[str]]


def _defined(x) -> bool:
    return not isinstance(x, Undefined)


def _cut_blocks(rng: random.Random, pool: tuple, k: int) -> list[frozenset]:
    """Split a shuffled copy of pool into k disjoint, possibly empty blocks."""
    names = list(pool)
    rng.shuffle(names)
    cuts = sorted(rng.randrange(len(names) + 1) for _ in range(k - 1))
    blocks, prev = [], 0
    for cut in [*cuts, len(names)]:
        blocks.append(frozenset(names[prev:cut]))
        prev = cut
    return blocks


def _table(rng: random.Random, model: str, D: frozenset, T: frozenset,
           universe: Universe) -> KernelState:
    seed = rng.randrange(1 << 30)
    if model == "prob":
        return random_table_kernel(D, T, seed, universe)
    return random_rel_table_kernel(D, T, seed, universe)


def _unit(model: str, S: frozenset, universe: Universe) -> KernelState:
    return kernel_unit(S, universe) if model == "prob" else rel_unit(S, universe)


def _any_kernel(rng: random.Random, model: str, pool: tuple,
                universe: Universe) -> KernelState:
    """A table kernel with an arbitrary domain and fresh block from the pool."""
    names = list(pool)
    dom = frozenset(rng.sample(names, rng.randrange(len(names) + 1)))
    fresh = frozenset(v for v in names if v not in dom and rng.random() < 0.5)
    return _table(rng, model, dom, fresh, universe)


def _promote(rng: random.Random, model: str, f: KernelState, pad: frozenset,
             fresh: frozenset, universe: Universe) -> KernelState:
    """A state above f: pad with the identity on pad, then extend into fresh."""
    padded = k_par(f, _unit(model, pad, universe))
    tail = _table(rng, model, padded.rng, fresh, universe)
    return k_seq(padded, tail)


def check_par_commutative(rng, model, pool, universe):
    f = _any_kernel(rng, model, pool, universe)
    g = _any_kernel(rng, model, pool, universe)
    a, b = k_par(f, g), k_par(g, f)
    if _defined(a) != _defined(b):
        return "f + g and g + f disagree on definedness"
    if _defined(a) and a != b:
        return "f + g differs from g + f"
    return None


def _assoc_sides(op, x, y, u):
    t = op(x, y)
    left = op(t, u) if _defined(t) else t
    s = op(y, u)
    right = op(x, s) if _defined(s) else s
    return left, right


def _assoc_verdict(op, x, y, u, what: str) -> Optional[str]:
    left, right = _assoc_sides(op, x, y, u)
    if _defined(left) != _defined(right):
        return f"{what} associations disagree on definedness"
    if _defined(left) and left != right:
        return f"{what} associations disagree on the composite"
    return None


def check_par_associative(rng, model, pool, universe):
    if rng.random() < 0.5:
        d, b1, b2, b3 = _cut_blocks(rng, pool, 4)
        x, y, u = (_table(rng, model, d, b, universe) for b in (b1, b2, b3))
    else:
        x, y, u = (_any_kernel(rng, model, pool, universe) for _ in range(3))
    return _assoc_verdict(k_par, x, y, u, "parallel")


def check_par_unit_exists(rng, model, pool, universe):
    f = _any_kernel(rng, model, pool, universe)
    e = _unit(model, frozenset(), universe)
    padded = k_par(e, f)
    if not _defined(padded) or padded != f:
        return "the empty unit fails to pad f to itself"
    return None


def check_par_unit_coherent(rng, model, pool, universe):
    # the unit set is the whole carrier, so e ranges over arbitrary states
    sh, d1, d2, b1, b2 = _cut_blocks(rng, pool, 5)
    y = _table(rng, model, sh | d1, b1, universe)
    e = _table(rng, model, sh | d2, b2, universe)
    x = k_par(y, e)
    if not _defined(x):
        return "block-structured pair was not parallel-composable"
    if not k_preceq(y, x):
        return "y + e is not above y"
    return None


def check_par_down_closed(rng, model, pool, universe):
    d1, b1, s1, c1, d2, b2, s2, c2 = _cut_blocks(rng, pool, 8)
    x0 = _table(rng, model, d1, b1, universe)
    y0 = _table(rng, model, d2, b2, universe)
    x = _promote(rng, model, x0, s1, c1, universe)
    y = _promote(rng, model, y0, s2, c2, universe)
    whole = k_par(x, y)
    if not _defined(whole):
        return "promoted pair was not parallel-composable"
    small = k_par(x0, y0)
    if not _defined(small):
        return "x' + y' undefined below a defined x + y"
    if not k_preceq(small, whole):
        return "x' + y' is not below x + y"
    return None


def check_seq_associative(rng, model, pool, universe):
    if rng.random() < 0.5:
        d, b1, b2, b3 = _cut_blocks(rng, pool, 4)
        x = _table(rng, model, d, b1, universe)
        y = _table(rng, model, x.rng, b2, universe)
        u = _table(rng, model, y.rng, b3, universe)
    else:
        x, y, u = (_any_kernel(rng, model, pool, universe) for _ in range(3))
    return _assoc_verdict(k_seq, x, y, u, "sequential")


def check_seq_unit_left(rng, model, pool, universe):
    f = _any_kernel(rng, model, pool, universe)
    out = k_seq(_unit(model, f.dom, universe), f)
    if not _defined(out) or out != f:
        return "identity on dom(f) is not a left unit"
    return None


def check_seq_unit_right(rng, model, pool, universe):
    f = _any_kernel(rng, model, pool, universe)
    out = k_seq(f, _unit(model, f.rng, universe))
    if not _defined(out) or out != f:
        return "identity on rng(f) is not a right unit"
    return None


def check_seq_unit_coherent(rng, model, pool, universe):
    d, b, c = _cut_blocks(rng, pool, 3)
    y = _table(rng, model, d, b, universe)
    e = _table(rng, model, y.rng, c, universe)
    x = k_seq(y, e)
    if not _defined(x):
        return "chained pair was not sequentially composable"
    if not k_preceq(y, x):
        return "y ; e is not above y"
    return None


def check_seq_up_closed(rng, model, pool, universe):
    d, b1, b2, s, c = _cut_blocks(rng, pool, 5)
    x = _table(rng, model, d, b1, universe)
    y = _table(rng, model, x.rng, b2, universe)
    z = k_seq(x, y)
    pad = _unit(model, s, universe)
    v = _table(rng, model, z.rng | s, c, universe)
    z2 = k_seq(k_par(z, pad), v)
    if not k_preceq(z, z2):
        return "constructed extension is not above z"
    x2 = k_par(x, pad)
    y2 = k_seq(k_par(y, pad), v)
    if not k_preceq(x, x2):
        return "witness above x fails the order test"
    if not k_preceq(y, y2):
        return "witness above y fails the order test"
    recomposed = k_seq(x2, y2)
    if not _defined(recomposed) or recomposed != z2:
        return "witnesses above x and y do not recompose to z'"
    return None


def check_unit_set_closed(rng, model, pool, universe):
    # every state belongs to the unit set, so closure under promotion amounts
    # to promotions landing above their base
    d, b, s, t = _cut_blocks(rng, pool, 4)
    e = _table(rng, model, d, b, universe)
    above = _promote(rng, model, e, s, t, universe)
    if not k_preceq(e, above):
        return "promotion of a unit-set member is not above it"
    return None


def check_reverse_exchange(rng, model, pool, universe):
    sh, b1, c1, b2, c2 = _cut_blocks(rng, pool, 5)
    y1 = _table(rng, model, sh, b1, universe)
    y2 = _table(rng, model, y1.rng, c1, universe)
    z1 = _table(rng, model, sh, b2, universe)
    z2 = _table(rng, model, z1.rng, c2, universe)
    x = k_par(k_seq(y1, y2), k_seq(z1, z2))
    if not _defined(x):
        return "parallel composite of the two chains is undefined"
    u = k_par(y1, z1)
    v = k_par(y2, z2)
    if not (_defined(u) and _defined(v)):
        return "heads or tails are not parallel-composable"
    w = k_seq(u, v)
    if not _defined(w):
        return "exchanged composite is undefined"
    if w != x:
        return "exchanged composite differs from the original"
    return None


def check_exchange_agreement(rng, model, pool, universe):
    sh, d1, d2, b1, b2, c1, c2 = _cut_blocks(rng, pool, 7)
    f1 = _table(rng, model, sh | d1, b1, universe)
    f2 = _table(rng, model, sh | d2, b2, universe)
    f3 = _table(rng, model, f1.rng, c1, universe)
    f4 = _table(rng, model, f2.rng, c2, universe)
    par_first = k_seq(k_par(f1, f2), k_par(f3, f4))
    seq_first = k_par(k_seq(f1, f3), k_seq(f2, f4))
    if not (_defined(par_first) and _defined(seq_first)):
        return "one exchange route is undefined"
    if par_first != seq_first:
        return "exchange routes produce different kernels"
    return None


def check_padding_absorbed(rng, model, pool, universe):
    f = _any_kernel(rng, model, pool, universe)
    for S in subsets(f.dom):
        padded = k_par(f, _unit(model, S, universe))
        if not _defined(padded) or padded != f:
            return f"padding with the identity on {sorted(S)} changed f"
    return None


def check_seq_collapses_to_par(rng, model, pool, universe):
    # f ; (g + unit) = g + f when dom(g) <= dom(f) and g's fresh output
    # avoids rng(f)
    extra, dsub, t, tg = _cut_blocks(rng, pool, 4)
    f = _table(rng, model, dsub | extra, t, universe)
    g = _table(rng, model, dsub, tg, universe)
    x = f.rng - g.dom
    lhs = k_seq(f, k_par(g, _unit(model, x, universe)))
    rhs = k_par(g, f)
    if not (_defined(lhs) and _defined(rhs)):
        return "one side of the collapse is undefined"
    if lhs != rhs:
        return "sequential step does not collapse to the parallel composite"
    return None


def check_par_factors_through_seq(rng, model, pool, universe):
    sh, d1, d2, b1, b2 = _cut_blocks(rng, pool, 5)
    f = _table(rng, model, sh | d1, b1, universe)
    g = _table(rng, model, sh | d2, b2, universe)
    whole = k_par(f, g)
    first = k_par(f, _unit(model, g.dom, universe))
    second = k_par(_unit(model, f.rng, universe), g)
    staged = k_seq(first, second)
    if not (_defined(whole) and _defined(staged)):
        return "one factoring route is undefined"
    if whole != staged:
        return "f + g differs from its two-stage factoring"
    return None


def check_seq_monotone(rng, model, pool, universe):
    d, b1, b2, s1, t1, t2 = _cut_blocks(rng, pool, 6)
    f = _table(rng, model, d, b1, universe)
    g = _table(rng, model, f.rng, b2, universe)
    h = _promote(rng, model, f, s1, t1, universe)
    i = _promote(rng, model, g, s1 | t1, t2, universe)
    if not (k_preceq(f, h) and k_preceq(g, i)):
        return "promotions are not above their bases"
    fg = k_seq(f, g)
    hi = k_seq(h, i)
    if not (_defined(fg) and _defined(hi)):
        return "one of the chained composites is undefined"
    if not k_preceq(fg, hi):
        return "f ; g is not below h ; i"
    return None


def check_order_reflexive(rng, model, pool, universe):
    f = _any_kernel(rng, model, pool, universe)
    if not k_preceq(f, f):
        return "f is not below itself"
    return None


def check_order_transitive(rng, model, pool, universe):
    d, b, s1, t1, s2, t2 = _cut_blocks(rng, pool, 6)
    f = _table(rng, model, d, b, universe)
    g = _promote(rng, model, f, s1, t1, universe)
    h = _promote(rng, model, g, s2, t2, universe)
    if not (k_preceq(f, g) and k_preceq(g, h)):
        return "constructed promotions are not ordered"
    if not k_preceq(f, h):
        return "order fails to compose across two promotions"
    return None


def check_subkernel_unique_at_shape(rng, model, pool, universe):
    d, b, s, t = _cut_blocks(rng, pool, 4)
    f = _table(rng, model, d, b, universe)
    h = _promote(rng, model, f, s, t, universe)
    if not k_preceq(f, h):
        return "promotion is not above its base"
    candidate = subkernel_at(h, f.dom, f.rng)
    if candidate is None:
        return "no subkernel of h at the shape of f"
    if candidate != f:
        return "two distinct states below h share a domain and range"
    return None


def check_composition_closed(rng, model, pool, universe):
    sh, d1, d2, b1, b2, c = _cut_blocks(rng, pool, 6)
    f = _table(rng, model, sh | d1, b1, universe)
    g = _table(rng, model, sh | d2, b2, universe)
    p = k_par(f, g)
    if not _defined(p):
        return "block-structured pair was not parallel-composable"
    if p.dom != f.dom | g.dom or p.rng != f.rng | g.rng:
        return "parallel composite has the wrong domain or range"
    h = _table(rng, model, p.rng, c, universe)
    q = k_seq(p, h)
    if not _defined(q):
        return "chained composite is undefined"
    if q.dom != p.dom or q.rng != h.rng:
        return "sequential composite has the wrong domain or range"
    return None


def check_seq_decomposes(rng, model, pool, universe):
    # every splitting point between dom and rng factors f into two states
    # whose composite is f again
    d, b, c = _cut_blocks(rng, pool, 3)
    f = k_seq(_table(rng, model, d, b, universe),
              _table(rng, model, d | b, c, universe))
    for extra in subsets(f.rng - f.dom):
        head, tail = k_disintegrate(f, f.dom | extra)
        back = k_seq(head, tail)
        if not _defined(back) or back != f:
            return f"splitting at {sorted(f.dom | extra)} does not recompose"
        if not k_preceq(head, f):
            return "head of a splitting is not below f"
    return None


FRAME_CHECKS: tuple[tuple[str, Check], ...] = (
    ("par_commutative", check_par_commutative),
    ("par_associative", check_par_associative),
    ("par_unit_exists", check_par_unit_exists),
    ("par_unit_coherent", check_par_unit_coherent),
    ("par_down_closed", check_par_down_closed),
    ("seq_associative", check_seq_associative),
    ("seq_unit_left", check_seq_unit_left),
    ("seq_unit_right", check_seq_unit_right),
    ("seq_unit_coherent", check_seq_unit_coherent),
    ("seq_up_closed", check_seq_up_closed),
    ("unit_set_closed", check_unit_set_closed),
    ("reverse_exchange", check_reverse_exchange),
    ("exchange_agreement", check_exchange_agreement),
    ("padding_absorbed", check_padding_absorbed),
    ("seq_collapses_to_par", check_seq_collapses_to_par),
    ("par_factors_through_seq", check_par_factors_through_seq),
    ("seq_monotone", check_seq_monotone),
    ("order_reflexive", check_order_reflexive),
    ("order_transitive", check_order_transitive),
    ("subkernel_unique_at_shape", check_subkernel_unique_at_shape),
    ("composition_closed", check_composition_closed),
    ("seq_decomposes", check_seq_decomposes),
)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check over a batch of random instances."""

    name: str
    trials: int
    violations: int
    examples: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class FrameReport:
    """Results of the whole suite against one model."""

    model: str
    seed: int
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def total_trials(self) -> int:
        return sum(c.trials for c in self.checks)

    def summary(self) -> str:
        verdict = "all checks passed" if self.ok else "VIOLATIONS FOUND"
        lines = [f"{self.model} model, seed {self.seed}: "
                 f"{self.total_trials} instances, {verdict}"]
        for c in self.checks:
            mark = "ok " if c.ok else "BAD"
            lines.append(f"  {mark} {c.name:28s} {c.trials:5d} trials"
                         f"  {c.violations} violations")
            for e in c.examples:
                lines.append(f"        {e}")
        return "\n".join(lines)


def run_suite(model: str = "prob", trials: int = 100, seed: int = 0,
              pool: tuple | None = None,
              universe: Universe | None = None) -> FrameReport:
    """Run every frame check `trials` times against seeded random kernels.

    Markov kernels are drawn over up to four boolean variables, powerset
    kernels over up to three attributes with three values each.  A raised
    exception counts as a violation of the check that triggered it.
    """
    if model == "prob":
        pool = PROB_POOL if pool is None else pool
        universe = BOOL_UNIVERSE if universe is None else universe
    elif model == "rel":
        pool = REL_POOL if pool is None else pool
        universe = REL_UNIVERSE if universe is None else universe
    else:
        raise ValueError(f"unknown model {model!r}")
    master = random.Random(seed)
    results = []
    for name, fn in FRAME_CHECKS:
        rng = random.Random(master.randrange(1 << 62))
        violations = 0
        examples: list[str] = []
        for _ in range(trials):
            try:
                msg = fn(rng, model, pool, universe)
            except Exception as exc:
                msg = f"raised {type(exc).__name__}: {exc}"
            if msg is not None:
                violations += 1
                if len(examples) < 3:
                    examples.append(msg)
        results.append(CheckResult(name, trials, violations, tuple(examples)))
    return FrameReport(model, seed, tuple(results))
