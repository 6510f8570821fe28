"""Assertion syntax: formulas over basic and enriched dependence atoms.

Includes the free-variable tables split into domain-side and range-side sets,
the restricted fragment check used by the program logic, and a parser and
printer for the textual formula syntax. Connective precedence, loosest to
tightest: -> | & * ; with all binary operators right-associative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .exprs import (
    Bern,
    EAnd,
    EFalse,
    ENot,
    EOr,
    ETrue,
    EVar,
    Expr,
    eval_expr,
    fv_dist_expr,
    fv_expr,
)
from .lex import ParseError, TokenStream, tokenize
from .memory import Memory, VarSet


# ---------------------------------------------------------------- domain side

class DomProp:
    """Base class for domain propositions."""

    __slots__ = ()


@dataclass(frozen=True)
class DTrue(DomProp):
    pass


@dataclass(frozen=True)
class DFalse(DomProp):
    pass


@dataclass(frozen=True)
class DEq(DomProp):
    var: str
    expr: Expr


@dataclass(frozen=True)
class DAnd(DomProp):
    left: DomProp
    right: DomProp


@dataclass(frozen=True)
class DOr(DomProp):
    left: DomProp
    right: DomProp


def fv_domprop(pd: DomProp) -> VarSet:
    if isinstance(pd, (DTrue, DFalse)):
        return frozenset()
    if isinstance(pd, DEq):
        return frozenset({pd.var}) | fv_expr(pd.expr)
    if isinstance(pd, (DAnd, DOr)):
        return fv_domprop(pd.left) | fv_domprop(pd.right)
    raise TypeError(f"not a domain proposition: {pd!r}")


def eval_domprop(pd: DomProp, m: Memory) -> bool:
    if isinstance(pd, DTrue):
        return True
    if isinstance(pd, DFalse):
        return False
    if isinstance(pd, DEq):
        return m.value(pd.var) == eval_expr(pd.expr, m)
    if isinstance(pd, DAnd):
        return eval_domprop(pd.left, m) and eval_domprop(pd.right, m)
    if isinstance(pd, DOr):
        return eval_domprop(pd.left, m) or eval_domprop(pd.right, m)
    raise TypeError(f"not a domain proposition: {pd!r}")


@dataclass(frozen=True)
class DomainFormula:
    """A variable set together with a proposition about memories over it."""

    vars: VarSet
    prop: DomProp

    def __post_init__(self):
        object.__setattr__(self, "vars", frozenset(self.vars))
        loose = fv_domprop(self.prop) - self.vars
        if loose:
            raise ValueError(f"domain proposition mentions {sorted(loose)} outside {sorted(self.vars)}")


def fv_domain(D: DomainFormula) -> VarSet:
    return D.vars


# ----------------------------------------------------------------- range side

class RangeFormula:
    """Base class for range propositions."""

    __slots__ = ()


@dataclass(frozen=True)
class RTrue(RangeFormula):
    pass


@dataclass(frozen=True)
class RFalse(RangeFormula):
    pass


@dataclass(frozen=True)
class RVars(RangeFormula):
    """Presence assertion: the listed variables all lie in the state's domain."""

    vars: VarSet

    def __post_init__(self):
        object.__setattr__(self, "vars", frozenset(self.vars))


@dataclass(frozen=True)
class RSim(RangeFormula):
    """The variable is distributed exactly as the sampling expression says."""

    var: str
    dexpr: Bern


@dataclass(frozen=True)
class REq(RangeFormula):
    """The equation var = expr holds with probability one."""

    var: str
    expr: Expr


@dataclass(frozen=True)
class RAnd(RangeFormula):
    left: RangeFormula
    right: RangeFormula


@dataclass(frozen=True)
class RSep(RangeFormula):
    left: RangeFormula
    right: RangeFormula


@dataclass(frozen=True)
class ROr(RangeFormula):
    left: RangeFormula
    right: RangeFormula


def fv_range(pr: RangeFormula) -> VarSet:
    if isinstance(pr, (RTrue, RFalse)):
        return frozenset()
    if isinstance(pr, RVars):
        return pr.vars
    if isinstance(pr, RSim):
        return frozenset({pr.var}) | fv_dist_expr(pr.dexpr)
    if isinstance(pr, REq):
        return frozenset({pr.var}) | fv_expr(pr.expr)
    if isinstance(pr, (RAnd, RSep, ROr)):
        return fv_range(pr.left) | fv_range(pr.right)
    raise TypeError(f"not a range proposition: {pr!r}")


# --------------------------------------------------------------------- atoms

@dataclass(frozen=True)
class BasicPair:
    """The basic dependence atom: range variables determined by domain variables."""

    dom_vars: VarSet
    rng_vars: VarSet

    def __post_init__(self):
        object.__setattr__(self, "dom_vars", frozenset(self.dom_vars))
        object.__setattr__(self, "rng_vars", frozenset(self.rng_vars))


@dataclass(frozen=True)
class Enriched:
    """The enriched atom: a domain formula paired with a range formula."""

    dom: DomainFormula
    rng: RangeFormula


AtomicProp = (BasicPair, Enriched)


# ------------------------------------------------------------------ formulas

class Formula:
    """Base class for assertion formulas."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class EmpI(Formula):
    """The unit assertion, satisfied exactly by unit states."""


@dataclass(frozen=True)
class Atom(Formula):
    ap: object

    def __post_init__(self):
        if not isinstance(self.ap, AtomicProp):
            raise TypeError(f"not an atomic proposition: {self.ap!r}")


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Sep(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Dep(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class SepWand(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class DepWandR(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class DepWandL(Formula):
    left: Formula
    right: Formula


def atom(dom_vars: Iterable[str], rng_vars: Iterable[str]) -> Atom:
    """Convenience constructor for basic atoms."""
    return Atom(BasicPair(frozenset(dom_vars), frozenset(rng_vars)))


def enriched(S: Iterable[str], pd: DomProp, pr: RangeFormula) -> Atom:
    """Convenience constructor for enriched atoms."""
    return Atom(Enriched(DomainFormula(frozenset(S), pd), pr))


# ------------------------------------------------------------ free variables

def fv(P: Formula) -> VarSet:
    """All variables of P; total on every connective."""
    if isinstance(P, (Top, Bot, EmpI)):
        return frozenset()
    if isinstance(P, Atom):
        if isinstance(P.ap, BasicPair):
            return P.ap.dom_vars | P.ap.rng_vars
        return fv_domain(P.ap.dom) | fv_range(P.ap.rng)
    if isinstance(P, (And, Or, Imp, Sep, Dep, SepWand, DepWandR, DepWandL)):
        return fv(P.left) | fv(P.right)
    raise TypeError(f"not a formula: {P!r}")


def fvd(P: Formula) -> VarSet:
    """Domain-side free variables; defined on the restricted fragment only."""
    if isinstance(P, (Top, Bot)):
        return frozenset()
    if isinstance(P, Atom):
        if isinstance(P.ap, BasicPair):
            return P.ap.dom_vars
        return fv_domain(P.ap.dom)
    if isinstance(P, (And, Or, Sep, Dep)):
        return fvd(P.left) | fvd(P.right)
    raise ValueError(f"fvd is not defined on this connective: {P!r}")


def fvr(P: Formula) -> VarSet:
    """Range-side free variables; defined on the restricted fragment only.

    Union across conjunction and both separating connectives, intersection
    across disjunction: a disjunction only promises the variables every
    branch provides.
    """
    if isinstance(P, (Top, Bot)):
        return frozenset()
    if isinstance(P, Atom):
        if isinstance(P.ap, BasicPair):
            return P.ap.dom_vars | P.ap.rng_vars
        return fv_domain(P.ap.dom) | fv_range(P.ap.rng)
    if isinstance(P, (And, Sep, Dep)):
        return fvr(P.left) | fvr(P.right)
    if isinstance(P, Or):
        return fvr(P.left) & fvr(P.right)
    raise ValueError(f"fvr is not defined on this connective: {P!r}")


def wf_rformula(P: Formula) -> bool:
    """Membership in the restricted fragment.

    Atoms, truth constants, and disjunctions are unconstrained; a sequencing
    P ; Q needs fvd(Q) inside fvr(P); a conjunction needs both sides to
    expose exactly the same variables (fvr and fv all equal). Everything
    else, including the unit, implication, and the adjoints, is outside.
    """
    if isinstance(P, (Top, Bot, Atom)):
        return True
    if isinstance(P, Or):
        return wf_rformula(P.left) and wf_rformula(P.right)
    if isinstance(P, Sep):
        return wf_rformula(P.left) and wf_rformula(P.right)
    if isinstance(P, Dep):
        if not (wf_rformula(P.left) and wf_rformula(P.right)):
            return False
        return fvd(P.right) <= fvr(P.left)
    if isinstance(P, And):
        if not (wf_rformula(P.left) and wf_rformula(P.right)):
            return False
        sets = {fvr(P.left), fvr(P.right), fv(P.left), fv(P.right)}
        return len(sets) == 1
    return False


# ------------------------------------------------------------- formula paths

def subformula_at(P: Formula, path: str) -> Formula:
    """The subformula at a dotted L/R path; 'root' names P itself."""
    node = P
    if path == "root":
        return node
    for step in path.split("."):
        if step not in ("L", "R") or not hasattr(node, "left"):
            raise ValueError(f"bad path {path!r} into {node!r}")
        node = node.left if step == "L" else node.right
    return node


def replace_at(P: Formula, path: str, new: Formula) -> Formula:
    """P with the subformula at path replaced by new."""
    if path == "root":
        return new

    def go(node: Formula, steps: list[str]) -> Formula:
        if not steps:
            return new
        if not hasattr(node, "left"):
            raise ValueError(f"bad path {path!r} into {node!r}")
        head, rest = steps[0], steps[1:]
        if head == "L":
            return type(node)(go(node.left, rest), node.right)
        if head == "R":
            return type(node)(node.left, go(node.right, rest))
        raise ValueError(f"bad path {path!r}")

    return go(P, path.split("."))


# -------------------------------------------------------------------- parser

def _parse_varlist(ts: TokenStream) -> VarSet:
    if ts.at("int") and ts.peek().text == "0":
        ts.next()
        return frozenset()
    names = [ts.expect("id", "variable name").text]
    while ts.accept(","):
        names.append(ts.expect("id", "variable name").text)
    return frozenset(names)


def _parse_expr_atom(ts: TokenStream) -> Expr:
    """A variable, constant, negation, or parenthesized expression.

    Equations inside domain and range propositions take this restricted form
    on their right-hand side, so the propositional & and | stay unambiguous;
    compound expressions there must be parenthesized.
    """
    if ts.accept("!"):
        return ENot(_parse_expr_atom(ts))
    if ts.at("id"):
        word = ts.next().text
        if word == "tt":
            return ETrue()
        if word == "ff":
            return EFalse()
        return EVar(word)
    if ts.accept("("):
        e = _parse_expr(ts)
        ts.expect(")")
        return e
    ts.error("expected an expression")


def _parse_expr(ts: TokenStream) -> Expr:
    def conj() -> Expr:
        e = _parse_expr_atom(ts)
        if ts.accept("&"):
            return EAnd(e, conj())
        return e

    e = conj()
    if ts.accept("|"):
        return EOr(e, _parse_expr(ts))
    return e


def _parse_rational(ts: TokenStream) -> Fraction:
    num = int(ts.expect("int", "number").text)
    if ts.accept("/"):
        den = int(ts.expect("int", "number").text)
        return Fraction(num, den)
    return Fraction(num)


def _parse_domprop(ts: TokenStream) -> DomProp:
    def prim() -> DomProp:
        if ts.at("id"):
            word = ts.peek().text
            if word == "T":
                ts.next()
                return DTrue()
            if word == "F":
                ts.next()
                return DFalse()
            name = ts.next().text
            ts.expect("=", "'=' in domain equation")
            return DEq(name, _parse_expr_atom(ts))
        if ts.accept("("):
            pd = _parse_domprop(ts)
            ts.expect(")")
            return pd
        ts.error("expected a domain proposition")

    def conj() -> DomProp:
        pd = prim()
        if ts.accept("&"):
            return DAnd(pd, conj())
        return pd

    pd = conj()
    if ts.accept("|"):
        return DOr(pd, _parse_domprop(ts))
    return pd


def _parse_rangeformula(ts: TokenStream) -> RangeFormula:
    def prim() -> RangeFormula:
        if ts.accept("["):
            if ts.accept("]"):
                return RVars(frozenset())
            names = _parse_varlist(ts)
            ts.expect("]")
            return RVars(names)
        if ts.at("id"):
            word = ts.peek().text
            if word == "T":
                ts.next()
                return RTrue()
            if word == "F":
                ts.next()
                return RFalse()
            name = ts.next().text
            if ts.accept("~"):
                kw = ts.expect("id", "distribution name")
                if kw.text != "bern":
                    raise ParseError(f"unknown distribution {kw.text!r}", kw.line, kw.col)
                ts.expect("(")
                bias = _parse_rational(ts)
                ts.expect(")")
                return RSim(name, Bern(bias))
            ts.expect("=", "'~' or '=' after variable")
            return REq(name, _parse_expr_atom(ts))
        if ts.accept("("):
            pr = _parse_rangeformula(ts)
            ts.expect(")")
            return pr
        ts.error("expected a range proposition")

    def sep() -> RangeFormula:
        pr = prim()
        if ts.accept("*"):
            return RSep(pr, sep())
        return pr

    def conj() -> RangeFormula:
        pr = sep()
        if ts.accept("&"):
            return RAnd(pr, conj())
        return pr

    pr = conj()
    if ts.accept("|"):
        return ROr(pr, _parse_rangeformula(ts))
    return pr


def _looks_like_basic_atom(ts: TokenStream) -> bool:
    # after '(': a run of names/commas/0 followed by '|>' means a basic atom
    ahead = 1
    while True:
        tok = ts.peek(ahead)
        if tok.kind == "id" or tok.kind == "," or (tok.kind == "int" and tok.text == "0"):
            ahead += 1
            continue
        return tok.kind == "|>"


def _parse_primary(ts: TokenStream) -> Formula:
    if ts.at("id"):
        word = ts.peek().text
        if word == "T":
            ts.next()
            return Top()
        if word == "F":
            ts.next()
            return Bot()
        if word == "I":
            ts.next()
            return EmpI()
        ts.error(f"unexpected name {word!r} in formula")
    if ts.at("<"):
        ts.next()
        S = _parse_varlist(ts)
        ts.expect(":", "':' in enriched atom")
        pd = _parse_domprop(ts)
        ts.expect("|>", "'|>' in enriched atom")
        pr = _parse_rangeformula(ts)
        ts.expect(">", "'>' closing enriched atom")
        return Atom(Enriched(DomainFormula(S, pd), pr))
    if ts.at("("):
        if _looks_like_basic_atom(ts):
            ts.next()
            A = _parse_varlist(ts)
            ts.expect("|>")
            B = _parse_varlist(ts)
            ts.expect(")")
            return Atom(BasicPair(A, B))
        ts.next()
        P = _parse_imp(ts)
        ts.expect(")")
        return P
    ts.error("expected a formula")


def _parse_dep(ts: TokenStream) -> Formula:
    P = _parse_primary(ts)
    if ts.accept(";"):
        return Dep(P, _parse_dep(ts))
    return P


def _parse_sep(ts: TokenStream) -> Formula:
    P = _parse_dep(ts)
    if ts.accept("*"):
        return Sep(P, _parse_sep(ts))
    return P


def _parse_and(ts: TokenStream) -> Formula:
    P = _parse_sep(ts)
    if ts.accept("&"):
        return And(P, _parse_and(ts))
    return P


def _parse_or(ts: TokenStream) -> Formula:
    P = _parse_and(ts)
    if ts.accept("|"):
        return Or(P, _parse_or(ts))
    return P


def _parse_imp(ts: TokenStream) -> Formula:
    P = _parse_or(ts)
    if ts.accept("->"):
        return Imp(P, _parse_imp(ts))
    return P


def parse_formula(text: str) -> Formula:
    """Parse a formula from its textual syntax; raises ParseError on bad input."""
    ts = TokenStream(tokenize(text))
    P = _parse_imp(ts)
    if not ts.at("eof"):
        ts.error("trailing input after formula")
    return P


def parse_formula_stream(ts: TokenStream) -> Formula:
    """Parse a formula from an existing token stream (for embedded formulas)."""
    return _parse_imp(ts)


# ------------------------------------------------------------------- printer

def _fmt_varlist(S: VarSet) -> str:
    return ",".join(sorted(S)) if S else "0"


def print_expr(e: Expr) -> str:
    def go(e: Expr, minprec: int) -> str:
        if isinstance(e, EVar):
            return e.name
        if isinstance(e, ETrue):
            return "tt"
        if isinstance(e, EFalse):
            return "ff"
        if isinstance(e, ENot):
            return "!" + go(e.arg, 3)
        if isinstance(e, EAnd):
            s = f"{go(e.left, 3)} & {go(e.right, 2)}"
            return f"({s})" if minprec > 2 else s
        if isinstance(e, EOr):
            s = f"{go(e.left, 2)} | {go(e.right, 1)}"
            return f"({s})" if minprec > 1 else s
        raise TypeError(f"not an expression: {e!r}")

    return go(e, 0)


def _print_expr_atom(e: Expr) -> str:
    # right-hand sides of equations: compound expressions need parentheses
    if isinstance(e, (EAnd, EOr)):
        return f"({print_expr(e)})"
    return print_expr(e)


def print_domprop(pd: DomProp) -> str:
    def go(pd: DomProp, minprec: int) -> str:
        if isinstance(pd, DTrue):
            return "T"
        if isinstance(pd, DFalse):
            return "F"
        if isinstance(pd, DEq):
            return f"{pd.var}={_print_expr_atom(pd.expr)}"
        if isinstance(pd, DAnd):
            s = f"{go(pd.left, 3)} & {go(pd.right, 2)}"
            return f"({s})" if minprec > 2 else s
        if isinstance(pd, DOr):
            s = f"{go(pd.left, 2)} | {go(pd.right, 1)}"
            return f"({s})" if minprec > 1 else s
        raise TypeError(f"not a domain proposition: {pd!r}")

    return go(pd, 0)


def print_rangeformula(pr: RangeFormula) -> str:
    # precedence: | is 1, & is 2, * is 3, atoms are 4; all right-associative
    def go(pr: RangeFormula, minprec: int) -> str:
        if isinstance(pr, RTrue):
            return "T"
        if isinstance(pr, RFalse):
            return "F"
        if isinstance(pr, RVars):
            return "[" + ",".join(sorted(pr.vars)) + "]"
        if isinstance(pr, RSim):
            return f"{pr.var} ~ bern({pr.dexpr.bias})"
        if isinstance(pr, REq):
            return f"{pr.var}={_print_expr_atom(pr.expr)}"
        if isinstance(pr, RSep):
            s = f"{go(pr.left, 4)} * {go(pr.right, 3)}"
            return f"({s})" if minprec > 3 else s
        if isinstance(pr, RAnd):
            s = f"{go(pr.left, 3)} & {go(pr.right, 2)}"
            return f"({s})" if minprec > 2 else s
        if isinstance(pr, ROr):
            s = f"{go(pr.left, 2)} | {go(pr.right, 1)}"
            return f"({s})" if minprec > 1 else s
        raise TypeError(f"not a range proposition: {pr!r}")

    return go(pr, 0)


_PREC = {Imp: 1, Or: 2, And: 3, Sep: 4, Dep: 5}
_OPTEXT = {Imp: "->", Or: "|", And: "&", Sep: "*", Dep: ";"}


def print_formula(P: Formula) -> str:
    """Canonical textual form; parse_formula(print_formula(P)) == P."""

    def go(P: Formula, minprec: int) -> str:
        if isinstance(P, Top):
            return "T"
        if isinstance(P, Bot):
            return "F"
        if isinstance(P, EmpI):
            return "I"
        if isinstance(P, Atom):
            if isinstance(P.ap, BasicPair):
                return f"({_fmt_varlist(P.ap.dom_vars)} |> {_fmt_varlist(P.ap.rng_vars)})"
            D, R = P.ap.dom, P.ap.rng
            return f"<{_fmt_varlist(D.vars)} : {print_domprop(D.prop)} |> {print_rangeformula(R)}>"
        cls = type(P)
        if cls in _PREC:
            k = _PREC[cls]
            s = f"{go(P.left, k + 1)} {_OPTEXT[cls]} {go(P.right, k)}"
            return f"({s})" if minprec > k else s
        raise ValueError(f"no textual syntax for this connective: {P!r}")

    return go(P, 0)
