"""Satisfaction of formulas by kernel states, over both concrete models.

The existential connectives are decided by searching the canonical subkernel
family: separation tries pairs of subkernels whose parallel composite sits
below the state, and sequencing tries every marginal together with the
matching disintegration. Conditional kernels carry rows only on inputs the
source state reaches; the unreachable inputs stay free, and the checks treat
them as freely choosable, which keeps the search from rejecting
decompositions that differ only on probability-zero inputs. On formulas in
the restricted fragment this search is complete; outside it the sequencing
witness search is canonical-only, which callers can see via the fragment
flag. Implication and the three adjoint connectives quantify over extensions
and are not decided here.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .formulas import (
    And,
    Atom,
    BasicPair,
    Bot,
    Dep,
    DepWandL,
    DepWandR,
    DomainFormula,
    EmpI,
    Enriched,
    Formula,
    Imp,
    Or,
    RAnd,
    REq,
    RFalse,
    ROr,
    RSep,
    RSim,
    RTrue,
    RVars,
    RangeFormula,
    Sep,
    SepWand,
    Top,
    eval_domprop,
    eval_expr,
    fv,
    fvd,
    fvr,
    wf_rformula,
)
from .exprs import fv_expr
from .kernels import (
    KernelState,
    is_prob,
    k_disintegrate,
    k_marginal,
    k_par,
    k_preceq,
    k_seq,
    subkernel_at,
    subkernels,
    subsets,
)
from .memory import EMPTY_MEMORY, Memory, VarSet, enumerate_memories, join
from .prob import Dist, MarkovKernel, Undefined, dist, marginal


class UnsupportedConnective(Exception):
    """Raised on connectives whose satisfaction is not decided by this checker."""


# ----------------------------------------------------- domain and range logic

def sat_domain(m: Memory, D: DomainFormula) -> bool:
    """m satisfies D when it is a memory over exactly D.vars making D.prop true."""
    return m.dom == D.vars and eval_domprop(D.prop, m)


def oplus_r(mu1: Dist, mu2: Dist) -> Dist | None:
    """Combination of range states: independent product over a shared
    deterministic overlap. None when the overlap is not a common point mass."""
    T = mu1.dom & mu2.dom
    p1 = marginal(mu1, T)
    p2 = marginal(mu2, T)
    if len(p1.entries) != 1 or p1 != p2:
        return None
    shared = p1.entries[0][0]
    left = marginal(mu1, mu1.dom - T)
    right = marginal(mu2, mu2.dom - T)
    acc = {}
    for a, p in left.entries:
        for b, q in right.entries:
            j = join(join(a, b), shared)
            assert isinstance(j, Memory)
            acc[j] = p * q
    return dist(acc, universe=mu1.universe, dom=mu1.dom | mu2.dom)


def sat_range(mu: Dist, pr: RangeFormula) -> bool:
    """Satisfaction of range propositions by a distribution."""
    if isinstance(pr, RTrue):
        return True
    if isinstance(pr, RFalse):
        return False
    if isinstance(pr, RVars):
        return pr.vars <= mu.dom
    if isinstance(pr, RSim):
        if pr.var not in mu.dom:
            return False
        bias = pr.dexpr.bias
        mx = marginal(mu, {pr.var})
        mass_tt = mx.mass(Memory(((pr.var, 1),)))
        mass_ff = mx.mass(Memory(((pr.var, 0),)))
        return mass_tt == bias and mass_ff == 1 - bias
    if isinstance(pr, REq):
        needed = frozenset({pr.var}) | fv_expr(pr.expr)
        if not needed <= mu.dom:
            return False
        good = sum((p for m, p in mu.entries if m.value(pr.var) == eval_expr(pr.expr, m)),
                   Fraction(0))
        return good == 1
    if isinstance(pr, RAnd):
        return sat_range(mu, pr.left) and sat_range(mu, pr.right)
    if isinstance(pr, ROr):
        return sat_range(mu, pr.left) or sat_range(mu, pr.right)
    if isinstance(pr, RSep):
        doms = subsets(mu.dom)
        for V1 in doms:
            mu1 = marginal(mu, V1)
            if not sat_range(mu1, pr.left):
                continue
            for V2 in doms:
                mu2 = marginal(mu, V2)
                combined = oplus_r(mu1, mu2)
                if combined is None or combined != marginal(mu, V1 | V2):
                    continue
                if sat_range(mu2, pr.right):
                    return True
        return False
    raise TypeError(f"not a range proposition: {pr!r}")


# ------------------------------------------------------------------ the atoms

def sat_atomic(f: KernelState, ap: BasicPair) -> bool:
    """A basic atom holds exactly when the canonical subkernel at
    (dom_vars, dom_vars | rng_vars) exists."""
    return subkernel_at(f, ap.dom_vars, ap.dom_vars | ap.rng_vars) is not None


def _sims_in(pr: RangeFormula) -> dict[str, Fraction]:
    """Sampling claims mentioned anywhere in pr, keyed by variable."""
    if isinstance(pr, RSim):
        return {pr.var: pr.dexpr.bias}
    if isinstance(pr, (RAnd, ROr, RSep)):
        return {**_sims_in(pr.left), **_sims_in(pr.right)}
    return {}


def _free_row_satisfies(m: Memory, fresh: VarSet, universe, pr: RangeFormula) -> bool:
    """Whether some output distribution extending m over fresh satisfies pr.

    Used on inputs where a conditional kernel carries no row, so the row may
    be anything. The candidates tried are the point masses plus the
    independent spread with each sampling bias pr mentions; props this misses
    are reported unsatisfiable, erring on the sound side.
    """
    dom = m.dom | fresh
    for ext in enumerate_memories(fresh, universe):
        j = join(m, ext)
        assert isinstance(j, Memory)
        if sat_range(dist({j: Fraction(1)}, universe=universe, dom=dom), pr):
            return True
    sims = _sims_in(pr)
    if any(v in sims for v in fresh):
        weights: dict[Memory, Fraction] = {m: Fraction(1)}
        for v in sorted(fresh):
            bias = sims.get(v, Fraction(0))
            spread = {}
            for mm, p in weights.items():
                for val, q in ((1, bias), (0, 1 - bias)):
                    if q == 0:
                        continue
                    jj = join(mm, Memory(((v, val),)))
                    assert isinstance(jj, Memory)
                    spread[jj] = p * q
            weights = spread
        if sat_range(dist(weights, universe=universe, dom=dom), pr):
            return True
    return False


def sat_enriched(f: KernelState, ap: Enriched) -> bool:
    """An enriched atom asks for a subkernel over exactly the atom's domain
    whose outputs satisfy the range proposition on every admitted input.
    Admitted inputs the subkernel has no row for are free: the atom holds
    there as soon as some choice of row would satisfy the proposition."""
    if not is_prob(f):
        raise UnsupportedConnective("enriched atoms are interpreted in the probabilistic model")
    S = ap.dom.vars
    if not S <= f.dom:
        # no state below f has domain S, so the existential fails even when
        # the domain proposition admits no memories
        return False
    admitted = [m for m in enumerate_memories(S, f.universe) if eval_domprop(ap.dom.prop, m)]
    if not admitted:
        # any subkernel over S works vacuously; one always exists (S-marginal unit)
        return True
    for extra in subsets(f.rng - f.dom):
        g = subkernel_at(f, S, S | extra)
        if g is None:
            continue
        ok = True
        for m in admitted:
            out = g.row(m)
            if out is None:
                ok = _free_row_satisfies(m, g.rng - g.dom, g.universe, ap.rng)
            else:
                ok = sat_range(out, ap.rng)
            if not ok:
                break
        if ok:
            return True
    return False


# --------------------------------------------------------------- satisfaction

def sat(f: KernelState, P: Formula) -> bool:
    """Decide whether the kernel state f satisfies P.

    Raises UnsupportedConnective on implication and the adjoints. In both
    concrete models every state is a unit, so the unit assertion I always
    holds.
    """
    if isinstance(P, Top):
        return True
    if isinstance(P, Bot):
        return False
    if isinstance(P, EmpI):
        return True
    if isinstance(P, Atom):
        if isinstance(P.ap, BasicPair):
            return sat_atomic(f, P.ap)
        return sat_enriched(f, P.ap)
    if isinstance(P, And):
        return sat(f, P.left) and sat(f, P.right)
    if isinstance(P, Or):
        return sat(f, P.left) or sat(f, P.right)
    if isinstance(P, Sep):
        subs = list(subkernels(f))
        for _, _, y in subs:
            if not sat(y, P.left):
                continue
            for _, _, z in subs:
                comp = k_par(y, z)
                if isinstance(comp, Undefined):
                    continue
                if not k_preceq(comp, f):
                    continue
                if sat(z, P.right):
                    return True
        return False
    if isinstance(P, Dep):
        for extra in subsets(f.rng - f.dom):
            T = f.dom | extra
            y = k_marginal(f, T)
            if not sat(y, P.left):
                continue
            _, z = k_disintegrate(f, T)
            if sat(z, P.right):
                return True
        return False
    if isinstance(P, (Imp, SepWand, DepWandR, DepWandL)):
        raise UnsupportedConnective(type(P).__name__)
    raise TypeError(f"not a formula: {P!r}")


def fragment_complete(P: Formula) -> bool:
    """Whether the witness search in sat is known complete for P."""
    return wf_rformula(P)


# --------------------------------------- the conditional-independence formula

def sat_ci_shape(f: KernelState, Z: Iterable[str], X: Iterable[str], Y: Iterable[str]) -> bool:
    """Direct decision procedure for the formula (0 |> Z) ; ((Z |> X) * (Z |> Y)).

    Marginalize to the mentioned variables, split off the Z part, rebuild the
    state from the two conditional marginals, and test whether the rebuilt
    kernel sits below f. Equivalent to sat on the shaped formula, but without
    the witness search.
    """
    Z, X, Y = frozenset(Z), frozenset(X), frozenset(Y)
    mentioned = Z | X | Y
    if mentioned & f.dom:
        return False
    if not mentioned <= f.rng:
        return False
    w = subkernel_at(f, frozenset(), mentioned)
    if w is None:
        return False
    g = k_marginal(w, Z)
    _, k = k_disintegrate(w, Z)
    h = k_marginal(k, Z | X)
    i = k_marginal(k, Z | Y)
    hi = k_par(h, i)
    if isinstance(hi, Undefined):
        return False
    s = k_seq(g, hi)
    assert not isinstance(s, Undefined)
    return k_preceq(s, f)


# -------------------------------------------------------- restriction witness

def restriction_witness(f: KernelState, P: Formula) -> KernelState | None:
    """Search for a subkernel of f that already satisfies P, within the
    free-variable bounds: domain inside fvd(P), range between fvr(P) and fv(P).

    Only defined on the restricted fragment; returns None when no witness in
    bounds satisfies P.
    """
    if not wf_rformula(P):
        raise ValueError("restriction witnesses are defined for the restricted fragment only")
    lower = fvr(P)
    upper = fv(P)
    for A in subsets(fvd(P)):
        base = A | lower
        if not base <= upper:
            continue
        for extra in subsets(upper - base):
            g = subkernel_at(f, A, base | extra)
            if g is not None and sat(g, P):
                return g
    return None
