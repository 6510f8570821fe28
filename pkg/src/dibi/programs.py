"""A small probabilistic language with a checked proof-outline logic.

Commands assign boolean expressions, sample Bernoulli coins, sequence, and
branch on a guard variable. `denote` interprets a command as an exact
distribution transformer over the full program variable universe, so that
lifted outputs compose with the kernel model.

On top of the language sits a Hoare-style outline checker. Outline nodes
mirror the proof rules (Skip, Assn, Samp, Seqn, DCond, Weak, Frame); the
Weak rule carries explicit chains of named axiom-schema instances, applied
one position at a time by `axiom_step`, rather than an undecided semantic
entailment. `golden_outlines` builds three fully checked example proofs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exprs import (
    TT,
    Bern,
    EAnd,
    EFalse,
    ENot,
    EOr,
    ETrue,
    EVar,
    Expr,
    eval_expr,
    fv_expr,
)
from .formulas import (
    And,
    Atom,
    DAnd,
    DEq,
    Dep,
    DomainFormula,
    DomProp,
    DOr,
    DTrue,
    Enriched,
    Formula,
    Or,
    RangeFormula,
    RAnd,
    REq,
    RFalse,
    ROr,
    RSep,
    RSim,
    RTrue,
    RVars,
    Sep,
    Top,
    enriched,
    eval_domprop,
    fv,
    fvd,
    fvr,
    fv_range,
    print_formula,
    replace_at,
    subformula_at,
    wf_rformula,
)
from .memory import BOOL_UNIVERSE, Value, VarSet, enumerate_memories, update
from .prob import Dist, condition, convex, dist, dist_bind, dist_unit, lift
from .semantics import sat


# ---------------------------------------------------------------------------
# Commands


class Command:
    """Base class for program commands."""

    __slots__ = ()


@dataclass(frozen=True)
class Skip(Command):
    pass


@dataclass(frozen=True)
class Assn(Command):
    """Deterministic assignment x := e."""

    var: str
    expr: Expr


@dataclass(frozen=True)
class Samp(Command):
    """Bernoulli sampling x <$ bern(bias)."""

    var: str
    bias: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bias", Fraction(self.bias))
        if not 0 <= self.bias <= 1:
            raise ValueError(f"bias must lie in [0, 1]: {self.bias}")


@dataclass(frozen=True)
class Seq(Command):
    first: Command
    second: Command


@dataclass(frozen=True)
class Cond(Command):
    """Branch on a single guard variable; tt runs the true branch."""

    guard: str
    true_branch: Command
    false_branch: Command


def cmd_vars(c: Command) -> VarSet:
    """All variables the command mentions."""
    if isinstance(c, Skip):
        return frozenset()
    if isinstance(c, Assn):
        return frozenset({c.var}) | fv_expr(c.expr)
    if isinstance(c, Samp):
        return frozenset({c.var})
    if isinstance(c, Seq):
        return cmd_vars(c.first) | cmd_vars(c.second)
    if isinstance(c, Cond):
        return frozenset({c.guard}) | cmd_vars(c.true_branch) | cmd_vars(c.false_branch)
    raise TypeError(f"not a command: {c!r}")


# ---------------------------------------------------------------------------
# Variable conditions

def rv(c: Command) -> VarSet:
    """Read variables: those whose initial value can influence the output."""
    if isinstance(c, Skip):
        return frozenset()
    if isinstance(c, Assn):
        return fv_expr(c.expr)
    if isinstance(c, Samp):
        return frozenset()
    if isinstance(c, Seq):
        return rv(c.first) | (rv(c.second) - wv(c.first))
    if isinstance(c, Cond):
        return frozenset({c.guard}) | rv(c.true_branch) | rv(c.false_branch)
    raise TypeError(f"not a command: {c!r}")


def wv(c: Command) -> VarSet:
    """Written variables: overwritten on every path before being read."""
    if isinstance(c, Skip):
        return frozenset()
    if isinstance(c, Assn):
        return frozenset({c.var}) - fv_expr(c.expr)
    if isinstance(c, Samp):
        return frozenset({c.var})
    if isinstance(c, Seq):
        return wv(c.first) | (wv(c.second) - rv(c.first))
    if isinstance(c, Cond):
        return (wv(c.true_branch) & wv(c.false_branch)) - frozenset({c.guard})
    raise TypeError(f"not a command: {c!r}")


def mv(c: Command) -> VarSet:
    """Modified variables: assigned or sampled anywhere in the command."""
    if isinstance(c, Skip):
        return frozenset()
    if isinstance(c, (Assn, Samp)):
        return frozenset({c.var})
    if isinstance(c, Seq):
        return mv(c.first) | mv(c.second)
    if isinstance(c, Cond):
        return mv(c.true_branch) | mv(c.false_branch)
    raise TypeError(f"not a command: {c!r}")


# ---------------------------------------------------------------------------
# Denotational semantics

def denote(c: Command, mu: Dist) -> Dist:
    """Run c on an input distribution over the full variable universe.

    Conditionals split the input by the guard's value and recombine with a
    convex mixture whose weight is the guard's tt-mass; a branch with zero
    mass is never entered, so conditioning on it is never attempted.
    """
    if isinstance(c, Skip):
        return mu
    if isinstance(c, Assn):
        return dist_bind(
            mu,
            lambda m: dist_unit(update(m, c.var, eval_expr(c.expr, m)), mu.universe),
        )
    if isinstance(c, Samp):
        bias = c.bias

        def flip(m):
            return dist(
                {update(m, c.var, 1): bias, update(m, c.var, 0): 1 - bias},
                universe=mu.universe,
                dom=mu.dom,
            )

        return dist_bind(mu, flip)
    if isinstance(c, Seq):
        return denote(c.second, denote(c.first, mu))
    if isinstance(c, Cond):
        b = c.guard
        p = sum((w for m, w in mu.entries if m.value(b) == TT), Fraction(0))
        if p == 1:
            return denote(c.true_branch, condition(mu, lambda m: m.value(b) == TT))
        if p == 0:
            return denote(c.false_branch, condition(mu, lambda m: m.value(b) != TT))
        return convex(
            p,
            denote(c.true_branch, condition(mu, lambda m: m.value(b) == TT)),
            denote(c.false_branch, condition(mu, lambda m: m.value(b) != TT)),
        )
    raise TypeError(f"not a command: {c!r}")


# ---------------------------------------------------------------------------
# Random generation, for property tests

def _random_expr(rng: random.Random, pool: tuple[str, ...], depth: int = 2) -> Expr:
    if depth == 0 or rng.random() < 0.4:
        kind = rng.randrange(4)
        if kind == 0:
            return ETrue()
        if kind == 1:
            return EFalse()
        return EVar(rng.choice(pool))
    kind = rng.randrange(3)
    if kind == 0:
        return ENot(_random_expr(rng, pool, depth - 1))
    cls = EAnd if kind == 1 else EOr
    return cls(_random_expr(rng, pool, depth - 1), _random_expr(rng, pool, depth - 1))


def random_command(pool, seed: int, size: int = 8) -> Command:
    """A random command over the pool, mixing all five constructors."""
    pool = tuple(pool)
    rng = random.Random(seed)

    def gen(budget: int) -> Command:
        if budget <= 1:
            kind = rng.randrange(3)
            if kind == 0:
                return Skip()
            x = rng.choice(pool)
            if kind == 1:
                return Samp(x, Fraction(rng.randrange(5), 4))
            return Assn(x, _random_expr(rng, pool))
        split = rng.randrange(1, budget)
        if rng.random() < 0.6:
            return Seq(gen(split), gen(budget - split))
        return Cond(rng.choice(pool), gen(split), gen(budget - split))

    return gen(max(1, size))


def _random_domprop(rng: random.Random, S: VarSet) -> DomProp:
    if not S or rng.random() < 0.5:
        return DTrue()
    v = rng.choice(sorted(S))
    base = DEq(v, ETrue() if rng.random() < 0.5 else EFalse())
    if rng.random() < 0.3:
        w = rng.choice(sorted(S))
        other = DEq(w, ETrue())
        return DAnd(base, other) if rng.random() < 0.5 else DOr(base, other)
    return base


def _random_rangeformula(rng: random.Random, pool: tuple[str, ...]) -> RangeFormula:
    kind = rng.randrange(6)
    if kind == 0:
        return RTrue()
    if kind <= 2:
        k = rng.randrange(0, len(pool) + 1)
        return RVars(frozenset(rng.sample(pool, k)))
    if kind == 3:
        return RSim(rng.choice(pool), Bern(Fraction(rng.randrange(5), 4)))
    if kind == 4:
        return REq(rng.choice(pool), _random_expr(rng, pool, depth=1))
    a = frozenset(rng.sample(pool, rng.randrange(1, len(pool) + 1)))
    b = frozenset(rng.sample(pool, rng.randrange(1, len(pool) + 1)))
    return RSep(RVars(a), RVars(b))


def _random_atom(rng: random.Random, pool: tuple[str, ...]) -> Atom:
    S = frozenset(rng.sample(pool, rng.randrange(0, len(pool))))
    return Atom(Enriched(DomainFormula(S, _random_domprop(rng, S)),
                         _random_rangeformula(rng, pool)))


def random_rformula(pool, seed: int, size: int = 3) -> Formula:
    """A random formula that satisfies the restricted well-formedness grammar.

    Guarded connectives are built constructively: the right side of each
    dependence gets atoms whose domains sit inside the left side's range
    variables, and conjunctions pair atoms with identical variable sets.
    """
    pool = tuple(pool)
    rng = random.Random(seed)

    def gen(budget: int) -> Formula:
        if budget <= 1:
            return _random_atom(rng, pool) if rng.random() < 0.9 else Top()
        kind = rng.randrange(4)
        split = rng.randrange(1, budget)
        if kind == 0:
            return Sep(gen(split), gen(budget - split))
        if kind == 1:
            return Or(gen(split), gen(budget - split))
        if kind == 2:
            left = gen(budget - 1)
            anchor = fvr(left)
            S = frozenset(rng.sample(sorted(anchor), rng.randrange(0, len(anchor) + 1)))
            right = Atom(Enriched(DomainFormula(S, _random_domprop(rng, S)),
                                  _random_rangeformula(rng, pool)))
            return Dep(left, right)
        base = _random_atom(rng, pool)
        ap = base.ap
        twin = Atom(Enriched(ap.dom, RAnd(ap.rng, RTrue())))
        return And(base, twin)

    out = gen(max(1, size))
    if not wf_rformula(out):
        raise AssertionError(f"generator produced an ill-formed formula: {out!r}")
    return out


# ---------------------------------------------------------------------------
# Triples and axiom-chain steps


@dataclass(frozen=True)
class Triple:
    """A Hoare triple over restricted formulas."""

    pre: Formula
    cmd: Command
    post: Formula


class SchemaMismatch(Exception):
    """The formula at the step's position does not match the axiom's shape."""


class SideConditionViolated(Exception):
    """The axiom's shape matched but a side condition failed."""


STEP_NAMES = (
    "Indep-1",
    "Indep-2",
    "Pad",
    "RestExch",
    "RevPar",
    "UnionRan",
    "AtomSeq",
    "UnitL",
    "UnitR",
    "AP-And",
    "AP-Or",
    "AP-Par",
    "AP-Imp",
    "Split",
    "SepComm",
    "SepTopElim",
    "DepTopElim",
    "DepTopIntro",
    "DepAssocL",
    "DepAssocR",
    "AndE1",
    "AndE2",
)


@dataclass(frozen=True)
class AxiomStep:
    """One named axiom-schema instance, applied at a subformula position.

    `at` uses the subformula path syntax ("root", "L", "R.L", ...). The
    optional parameters carry what the schema cannot read off the formula:
    Pad's padding set S, Split's left/right range sets, and AP-Imp's target
    atom.
    """

    name: str
    at: str = "root"
    S: VarSet | None = None
    left: VarSet | None = None
    right: VarSet | None = None
    to: Formula | None = None

    def __post_init__(self):
        if self.name not in STEP_NAMES:
            raise ValueError(f"unknown axiom step: {self.name}")
        for field in ("S", "left", "right"):
            v = getattr(self, field)
            if v is not None:
                object.__setattr__(self, field, frozenset(v))


def dom_entails(S: VarSet, stronger: DomProp, weaker: DomProp,
                universe: tuple[Value, ...] = BOOL_UNIVERSE) -> bool:
    """Decide stronger -> weaker by enumerating memories over S."""
    return all(
        eval_domprop(weaker, m)
        for m in enumerate_memories(S, universe)
        if eval_domprop(stronger, m)
    )


def _rng_floor(pr: RangeFormula) -> VarSet | None:
    """Variables every satisfying distribution must carry; None if none can."""
    if isinstance(pr, RTrue):
        return frozenset()
    if isinstance(pr, RFalse):
        return None
    if isinstance(pr, RVars):
        return pr.vars
    if isinstance(pr, RSim):
        return frozenset({pr.var})
    if isinstance(pr, REq):
        return frozenset({pr.var}) | fv_expr(pr.expr)
    if isinstance(pr, (RAnd, RSep)):
        a, b = _rng_floor(pr.left), _rng_floor(pr.right)
        return None if a is None or b is None else a | b
    if isinstance(pr, ROr):
        a, b = _rng_floor(pr.left), _rng_floor(pr.right)
        if a is None:
            return b
        if b is None:
            return a
        return a & b
    raise TypeError(f"not a range formula: {pr!r}")


def rng_entails(pr: RangeFormula, target: RangeFormula) -> bool:
    """A sound, structural fragment of range-logic entailment.

    Complete enough for the proof outlines: reflexivity, weakening x~d and
    x=e to variable sets, case analysis on disjunctions, and componentwise
    reasoning through the connectives.
    """
    if pr == target:
        return True
    if isinstance(pr, RFalse):
        return True
    if isinstance(pr, ROr):
        return rng_entails(pr.left, target) and rng_entails(pr.right, target)
    if isinstance(target, RTrue):
        return True
    if isinstance(target, RVars):
        floor = _rng_floor(pr)
        return floor is None or target.vars <= floor
    if isinstance(target, RAnd):
        return rng_entails(pr, target.left) and rng_entails(pr, target.right)
    if isinstance(target, ROr):
        return rng_entails(pr, target.left) or rng_entails(pr, target.right)
    if isinstance(pr, RAnd):
        return rng_entails(pr.left, target) or rng_entails(pr.right, target)
    if isinstance(pr, RSep) and isinstance(target, RSep):
        return (rng_entails(pr.left, target.left)
                and rng_entails(pr.right, target.right))
    return False


def _enriched_atom(P: Formula) -> Enriched:
    if not (isinstance(P, Atom) and isinstance(P.ap, Enriched)):
        raise SchemaMismatch(f"expected an enriched atom, found {print_formula(P)}")
    return P.ap


def _vars_range(pr: RangeFormula, what: str) -> VarSet:
    if not isinstance(pr, RVars):
        raise SchemaMismatch(f"{what} must be a plain variable-set range, found "
                             f"{print_formula(Atom(Enriched(DomainFormula(frozenset(), DTrue()), pr)))}")
    return pr.vars


def _require_wf(P: Formula, role: str) -> None:
    if not wf_rformula(P):
        raise SideConditionViolated(f"{role} is not well-formed: {print_formula(P)}")


def axiom_step(P: Formula, step: AxiomStep,
               universe: tuple[Value, ...] = BOOL_UNIVERSE) -> Formula:
    """Apply one axiom-schema instance at step.at inside P.

    Raises SchemaMismatch when the subformula does not have the schema's
    shape, SideConditionViolated when a side condition fails.
    """
    node = subformula_at(P, step.at)
    name = step.name

    if name == "Indep-1":
        if not (isinstance(node, Dep) and isinstance(node.left, Dep)):
            raise SchemaMismatch("Indep-1 needs shape (P ; Q) ; R")
        new = Dep(node.left.left, Sep(node.left.right, node.right))
        _require_wf(node, "Indep-1 antecedent")
        _require_wf(new, "Indep-1 consequent")
    elif name == "Indep-2":
        if not isinstance(node, Dep):
            raise SchemaMismatch("Indep-2 needs shape P ; Q")
        if fvd(node.right) != frozenset():
            raise SideConditionViolated(
                f"Indep-2 needs an empty dependence domain on the right, found "
                f"{sorted(fvd(node.right))}")
        new = Sep(node.left, node.right)
        _require_wf(node, "Indep-2 antecedent")
        _require_wf(new, "Indep-2 consequent")
    elif name == "Pad":
        if not isinstance(node, Dep):
            raise SchemaMismatch("Pad needs shape P ; Q")
        if step.S is None:
            raise SchemaMismatch("Pad needs a padding set S")
        pad = enriched(step.S, DTrue(), RVars(step.S))
        new = Dep(node.left, Sep(node.right, pad))
        _require_wf(node, "Pad antecedent")
        _require_wf(new, "Pad consequent")
    elif name == "RestExch":
        if not (isinstance(node, Dep) and isinstance(node.left, Sep)
                and isinstance(node.right, Sep)):
            raise SchemaMismatch("RestExch needs shape (P * Q) ; (R * S)")
        new = Sep(Dep(node.left.left, node.right.left),
                  Dep(node.left.right, node.right.right))
        _require_wf(node, "RestExch antecedent")
        _require_wf(new, "RestExch consequent")
    elif name == "RevPar":
        ap = _enriched_atom(node)
        if not isinstance(ap.rng, RSep):
            raise SchemaMismatch("RevPar needs range shape [A] * [B]")
        A = _vars_range(ap.rng.left, "RevPar's left range")
        B = _vars_range(ap.rng.right, "RevPar's right range")
        if ap.dom.prop != DTrue():
            raise SideConditionViolated("RevPar needs an unconditional domain")
        if not A & B <= ap.dom.vars:
            raise SideConditionViolated(
                f"RevPar needs the range overlap inside the domain: "
                f"{sorted(A & B)} vs {sorted(ap.dom.vars)}")
        new = Sep(Atom(Enriched(ap.dom, RVars(A))), Atom(Enriched(ap.dom, RVars(B))))
    elif name == "UnionRan":
        ap = _enriched_atom(node)
        if not isinstance(ap.rng, RSep):
            raise SchemaMismatch("UnionRan needs range shape [A] * [B]")
        A = _vars_range(ap.rng.left, "UnionRan's left range")
        B = _vars_range(ap.rng.right, "UnionRan's right range")
        new = Atom(Enriched(ap.dom, RVars(A | B)))
    elif name == "AtomSeq":
        if not isinstance(node, Dep):
            raise SchemaMismatch("AtomSeq needs shape <A |> B> ; <B |> C>")
        first = _enriched_atom(node.left)
        second = _enriched_atom(node.right)
        B = _vars_range(first.rng, "AtomSeq's first range")
        C = _vars_range(second.rng, "AtomSeq's second range")
        if second.dom.vars != B or second.dom.prop != DTrue():
            raise SideConditionViolated(
                "AtomSeq needs the second domain to be exactly the first "
                "range, unconditionally")
        new = Atom(Enriched(first.dom, RVars(C)))
    elif name == "UnitL":
        ap = _enriched_atom(node)
        new = Dep(Atom(Enriched(ap.dom, RVars(ap.dom.vars))), node)
    elif name == "UnitR":
        ap = _enriched_atom(node)
        B = _vars_range(ap.rng, "UnitR's range")
        if ap.dom.prop != DTrue():
            raise SideConditionViolated("UnitR needs an unconditional domain")
        new = Dep(node, Atom(Enriched(DomainFormula(B, DTrue()), RVars(B))))
    elif name in ("AP-And", "AP-Or"):
        if not isinstance(node, And):
            raise SchemaMismatch(f"{name} needs a conjunction of enriched atoms")
        a1 = _enriched_atom(node.left)
        a2 = _enriched_atom(node.right)
        if a1.dom.vars != a2.dom.vars:
            raise SideConditionViolated(f"{name} needs equal atom domains")
        if name == "AP-And":
            if fv_range(a1.rng) != fv_range(a2.rng):
                raise SideConditionViolated(
                    "AP-And needs ranges over the same variables")
            merged = Enriched(DomainFormula(a1.dom.vars, DAnd(a1.dom.prop, a2.dom.prop)),
                              RAnd(a1.rng, a2.rng))
        else:
            merged = Enriched(DomainFormula(a1.dom.vars, DOr(a1.dom.prop, a2.dom.prop)),
                              ROr(a1.rng, a2.rng))
        new = Atom(merged)
    elif name == "AP-Par":
        if not isinstance(node, Sep):
            raise SchemaMismatch("AP-Par needs a separation of enriched atoms")
        a1 = _enriched_atom(node.left)
        a2 = _enriched_atom(node.right)
        new = Atom(Enriched(DomainFormula(a1.dom.vars | a2.dom.vars,
                                          DAnd(a1.dom.prop, a2.dom.prop)),
                            RSep(a1.rng, a2.rng)))
    elif name == "AP-Imp":
        ap = _enriched_atom(node)
        if step.to is None:
            raise SchemaMismatch("AP-Imp needs a target atom")
        target = _enriched_atom(step.to)
        if target.dom.vars != ap.dom.vars:
            raise SideConditionViolated("AP-Imp cannot change the atom domain")
        if not dom_entails(ap.dom.vars, target.dom.prop, ap.dom.prop, universe):
            raise SideConditionViolated(
                "AP-Imp needs the target domain condition to entail the "
                "current one")
        if not rng_entails(ap.rng, target.rng):
            raise SideConditionViolated(
                "AP-Imp needs the current range to entail the target one")
        new = step.to
    elif name == "Split":
        ap = _enriched_atom(node)
        A = _vars_range(ap.rng, "Split's range")
        if step.left is None or step.right is None:
            raise SchemaMismatch("Split needs left and right range sets")
        if step.left | step.right != A:
            raise SideConditionViolated(
                f"Split's parts must cover the range exactly: "
                f"{sorted(step.left)} + {sorted(step.right)} vs {sorted(A)}")
        new = And(Atom(Enriched(ap.dom, RVars(step.left))),
                  Atom(Enriched(ap.dom, RVars(step.right))))
    elif name == "SepComm":
        if not isinstance(node, Sep):
            raise SchemaMismatch("SepComm needs shape P * Q")
        new = Sep(node.right, node.left)
    elif name == "SepTopElim":
        if isinstance(node, Sep) and isinstance(node.left, Top):
            new = node.right
        elif isinstance(node, Sep) and isinstance(node.right, Top):
            new = node.left
        else:
            raise SchemaMismatch("SepTopElim needs a T operand under *")
    elif name == "DepTopElim":
        if not (isinstance(node, Dep) and isinstance(node.right, Top)):
            raise SchemaMismatch("DepTopElim needs shape P ; T")
        new = node.left
    elif name == "DepTopIntro":
        new = Dep(node, Top())
    elif name == "DepAssocL":
        if not (isinstance(node, Dep) and isinstance(node.right, Dep)):
            raise SchemaMismatch("DepAssocL needs shape P ; (Q ; R)")
        new = Dep(Dep(node.left, node.right.left), node.right.right)
    elif name == "DepAssocR":
        if not (isinstance(node, Dep) and isinstance(node.left, Dep)):
            raise SchemaMismatch("DepAssocR needs shape (P ; Q) ; R")
        new = Dep(node.left.left, Dep(node.left.right, node.right))
    elif name in ("AndE1", "AndE2"):
        if not isinstance(node, And):
            raise SchemaMismatch(f"{name} needs shape P & Q")
        new = node.left if name == "AndE1" else node.right
    else:  # pragma: no cover - STEP_NAMES is validated in AxiomStep
        raise SchemaMismatch(f"unknown axiom step: {name}")

    return replace_at(P, step.at, new)


def apply_chain(P: Formula, steps, universe: tuple[Value, ...] = BOOL_UNIVERSE) -> Formula:
    """Fold a sequence of axiom steps over P."""
    out = P
    for step in steps:
        out = axiom_step(out, step, universe)
    return out


# ---------------------------------------------------------------------------
# Proof outlines


class OutlineMismatch(Exception):
    """An outline node that does not follow its proof rule.

    path locates the node: 'root', then child indices, as in 'root.0.1'.
    """

    def __init__(self, message: str, path: str = "root"):
        super().__init__(f"{path}: {message}")
        self.reason = message
        self.path = path


class OutlineNode:
    """Base class for proof-outline nodes; each carries its full triple."""

    __slots__ = ()


@dataclass(frozen=True)
class OSkip(OutlineNode):
    triple: Triple


@dataclass(frozen=True)
class OAssn(OutlineNode):
    triple: Triple


@dataclass(frozen=True)
class OSamp(OutlineNode):
    triple: Triple


@dataclass(frozen=True)
class OSeqn(OutlineNode):
    first: OutlineNode
    second: OutlineNode
    triple: Triple


@dataclass(frozen=True)
class ODCond(OutlineNode):
    true_branch: OutlineNode
    false_branch: OutlineNode
    triple: Triple


@dataclass(frozen=True)
class OWeak(OutlineNode):
    """Weakening justified by explicit axiom chains.

    pre_steps rewrite this node's precondition into the child's; post_steps
    rewrite the child's postcondition into this node's.
    """

    pre_steps: tuple[AxiomStep, ...]
    post_steps: tuple[AxiomStep, ...]
    child: OutlineNode
    triple: Triple

    def __post_init__(self):
        object.__setattr__(self, "pre_steps", tuple(self.pre_steps))
        object.__setattr__(self, "post_steps", tuple(self.post_steps))


@dataclass(frozen=True)
class OFrame(OutlineNode):
    frame: Formula
    child: OutlineNode
    triple: Triple


def outline_children(o: OutlineNode) -> tuple[OutlineNode, ...]:
    if isinstance(o, OSeqn):
        return (o.first, o.second)
    if isinstance(o, ODCond):
        return (o.true_branch, o.false_branch)
    if isinstance(o, (OWeak, OFrame)):
        return (o.child,)
    return ()


def assn_post(pre: Formula, x: str, e: Expr) -> Formula:
    return Dep(pre, Atom(Enriched(DomainFormula(fv_expr(e), DTrue()), REq(x, e))))


def samp_post(pre: Formula, x: str, bias: Fraction) -> Formula:
    return Dep(pre, Atom(Enriched(DomainFormula(frozenset(), DTrue()),
                                  RSim(x, Bern(bias)))))


def _guard_atom(b: str, value: Expr) -> Formula:
    return Atom(Enriched(DomainFormula(frozenset(), DTrue()), REq(b, value)))


def _branch_shapes(b: str, node: OutlineNode, value: Expr, path: str):
    """Destructure a DCond premise, returning its shared pre and range."""
    head = _guard_atom(b, value)
    pre, post = node.triple.pre, node.triple.post
    if not (isinstance(pre, Dep) and pre.left == head):
        raise OutlineMismatch(
            f"branch precondition must fix the guard first: {print_formula(pre)}",
            path)
    if not (isinstance(post, Dep) and post.left == head):
        raise OutlineMismatch(
            f"branch postcondition must fix the guard first: {print_formula(post)}",
            path)
    tail = post.right
    if not (isinstance(tail, Atom) and isinstance(tail.ap, Enriched)
            and tail.ap.dom.vars == frozenset({b})
            and tail.ap.dom.prop == DEq(b, value)):
        raise OutlineMismatch(
            f"branch postcondition must end in a guard-conditioned atom: "
            f"{print_formula(post)}", path)
    return pre.right, tail


def _check_node(o: OutlineNode, path: str,
                universe: tuple[Value, ...]) -> None:
    t = o.triple
    for role, P in (("precondition", t.pre), ("postcondition", t.post)):
        if not wf_rformula(P):
            raise OutlineMismatch(f"{role} is not well-formed: {print_formula(P)}",
                                  path)

    if isinstance(o, OSkip):
        if not isinstance(t.cmd, Skip):
            raise OutlineMismatch("Skip node over a non-skip command", path)
        if t.post != t.pre:
            raise OutlineMismatch("Skip must preserve its precondition", path)
    elif isinstance(o, OAssn):
        if not isinstance(t.cmd, Assn):
            raise OutlineMismatch("Assn node over a non-assignment", path)
        x, e = t.cmd.var, t.cmd.expr
        if x in fv_expr(e) | fv(t.pre):
            raise OutlineMismatch(
                f"assigned variable {x} must be fresh for the expression and "
                f"the precondition", path)
        if t.post != assn_post(t.pre, x, e):
            raise OutlineMismatch("Assn postcondition is not the rule's", path)
    elif isinstance(o, OSamp):
        if not isinstance(t.cmd, Samp):
            raise OutlineMismatch("Samp node over a non-sampling command", path)
        x = t.cmd.var
        if x in fv(t.pre):
            raise OutlineMismatch(
                f"sampled variable {x} must be fresh for the precondition", path)
        if t.post != samp_post(t.pre, x, t.cmd.bias):
            raise OutlineMismatch("Samp postcondition is not the rule's", path)
    elif isinstance(o, OSeqn):
        if not isinstance(t.cmd, Seq):
            raise OutlineMismatch("Seqn node over a non-sequence", path)
        if t.cmd.first != o.first.triple.cmd or t.cmd.second != o.second.triple.cmd:
            raise OutlineMismatch("Seqn children prove different commands", path)
        if t.pre != o.first.triple.pre:
            raise OutlineMismatch("Seqn precondition differs from the first "
                                  "child's", path)
        if o.first.triple.post != o.second.triple.pre:
            raise OutlineMismatch("Seqn children do not meet in the middle",
                                  path)
        if t.post != o.second.triple.post:
            raise OutlineMismatch("Seqn postcondition differs from the second "
                                  "child's", path)
        _check_node(o.first, path + ".0", universe)
        _check_node(o.second, path + ".1", universe)
    elif isinstance(o, ODCond):
        if not isinstance(t.cmd, Cond):
            raise OutlineMismatch("DCond node over a non-conditional", path)
        b = t.cmd.guard
        if t.cmd.true_branch != o.true_branch.triple.cmd \
                or t.cmd.false_branch != o.false_branch.triple.cmd:
            raise OutlineMismatch("DCond children prove different branches", path)
        if b in mv(t.cmd.true_branch) | mv(t.cmd.false_branch):
            raise OutlineMismatch(
                f"branches must not modify the guard {b}", path)
        p_tt, atom_tt = _branch_shapes(b, o.true_branch, ETrue(), path + ".0")
        p_ff, atom_ff = _branch_shapes(b, o.false_branch, EFalse(), path + ".1")
        if p_tt != p_ff:
            raise OutlineMismatch("branch preconditions share no common tail",
                                  path)
        head = Atom(Enriched(DomainFormula(frozenset(), DTrue()),
                             RVars(frozenset({b}))))
        if t.pre != Dep(head, p_tt):
            raise OutlineMismatch("DCond precondition is not the rule's", path)
        if t.post != Dep(head, And(atom_tt, atom_ff)):
            raise OutlineMismatch("DCond postcondition is not the rule's", path)
        _check_node(o.true_branch, path + ".0", universe)
        _check_node(o.false_branch, path + ".1", universe)
    elif isinstance(o, OWeak):
        if t.cmd != o.child.triple.cmd:
            raise OutlineMismatch("Weak must prove its child's command", path)
        try:
            reached = apply_chain(t.pre, o.pre_steps, universe)
        except (SchemaMismatch, SideConditionViolated) as exc:
            raise OutlineMismatch(f"pre chain failed: {exc}", path) from exc
        if reached != o.child.triple.pre:
            raise OutlineMismatch(
                f"pre chain reaches {print_formula(reached)}, not the child "
                f"precondition {print_formula(o.child.triple.pre)}", path)
        try:
            reached = apply_chain(o.child.triple.post, o.post_steps, universe)
        except (SchemaMismatch, SideConditionViolated) as exc:
            raise OutlineMismatch(f"post chain failed: {exc}", path) from exc
        if reached != t.post:
            raise OutlineMismatch(
                f"post chain reaches {print_formula(reached)}, not the node "
                f"postcondition {print_formula(t.post)}", path)
        _check_node(o.child, path + ".0", universe)
    elif isinstance(o, OFrame):
        if t.cmd != o.child.triple.cmd:
            raise OutlineMismatch("Frame must prove its child's command", path)
        c = t.cmd
        inner = o.child.triple
        if t.pre != Sep(inner.pre, o.frame) or t.post != Sep(inner.post, o.frame):
            raise OutlineMismatch("Frame must star the same formula onto both "
                                  "sides", path)
        if fv(o.frame) & mv(c):
            raise OutlineMismatch(
                f"framed formula reads modified variables "
                f"{sorted(fv(o.frame) & mv(c))}", path)
        if not fv(inner.post) <= fvr(inner.pre) | wv(c):
            raise OutlineMismatch(
                "frame rule needs the inner postcondition inside the "
                "precondition's range variables plus written ones", path)
        if not rv(c) <= fvr(inner.pre):
            raise OutlineMismatch(
                "frame rule needs read variables inside the precondition's "
                "range variables", path)
        _check_node(o.child, path + ".0", universe)
    else:
        raise OutlineMismatch(f"not an outline node: {o!r}", path)


def validate_outline(o: OutlineNode,
                     universe: tuple[Value, ...] = BOOL_UNIVERSE) -> None:
    """Check every node; raises OutlineMismatch with a node path on failure."""
    _check_node(o, "root", universe)


def check_outline(o: OutlineNode,
                  universe: tuple[Value, ...] = BOOL_UNIVERSE) -> bool:
    try:
        validate_outline(o, universe)
    except OutlineMismatch:
        return False
    return True


def validate_triple_semantically(t: Triple, inputs,
                                 ) -> bool:
    """Check the triple against the model on each given input distribution.

    Inputs whose lifting fails the precondition are vacuously fine; for the
    rest, the lifted output of the command must satisfy the postcondition.
    """
    for mu in inputs:
        if not sat(lift(mu), t.pre):
            continue
        if not sat(lift(denote(t.cmd, mu)), t.post):
            return False
    return True


# ---------------------------------------------------------------------------
# Node builders


def skip_node(pre: Formula) -> OSkip:
    return OSkip(Triple(pre, Skip(), pre))


def assn_node(pre: Formula, x: str, e: Expr) -> OAssn:
    return OAssn(Triple(pre, Assn(x, e), assn_post(pre, x, e)))


def samp_node(pre: Formula, x: str, bias: Fraction) -> OSamp:
    bias = Fraction(bias)
    return OSamp(Triple(pre, Samp(x, bias), samp_post(pre, x, bias)))


def seqn_node(first: OutlineNode, second: OutlineNode) -> OSeqn:
    cmd = Seq(first.triple.cmd, second.triple.cmd)
    return OSeqn(first, second, Triple(first.triple.pre, cmd, second.triple.post))


def dcond_node(guard: str, true_branch: OutlineNode,
               false_branch: OutlineNode) -> ODCond:
    cmd = Cond(guard, true_branch.triple.cmd, false_branch.triple.cmd)
    p_tt, atom_tt = _branch_shapes(guard, true_branch, ETrue(), "root.0")
    _, atom_ff = _branch_shapes(guard, false_branch, EFalse(), "root.1")
    head = Atom(Enriched(DomainFormula(frozenset(), DTrue()),
                         RVars(frozenset({guard}))))
    return ODCond(true_branch, false_branch,
                  Triple(Dep(head, p_tt), cmd, Dep(head, And(atom_tt, atom_ff))))


def weak_node(pre: Formula, pre_steps, post_steps, child: OutlineNode,
              universe: tuple[Value, ...] = BOOL_UNIVERSE) -> OWeak:
    post = apply_chain(child.triple.post, post_steps, universe)
    return OWeak(tuple(pre_steps), tuple(post_steps), child,
                 Triple(pre, child.triple.cmd, post))


def frame_node(child: OutlineNode, frame: Formula) -> OFrame:
    t = child.triple
    return OFrame(frame, child,
                  Triple(Sep(t.pre, frame), t.cmd, Sep(t.post, frame)))


# ---------------------------------------------------------------------------
# The three worked example programs and their golden outlines


def simple_program() -> Command:
    """Two fair coins, then their disjunction."""
    return Seq(Seq(Samp("x", Fraction(1, 2)), Samp("y", Fraction(1, 2))),
               Assn("z", EOr(EVar("x"), EVar("y"))))


def common_cause_program() -> Command:
    """Three fair coins; a and b each disjoin a private coin with shared z."""
    return Seq(
        Seq(Seq(Seq(Samp("z", Fraction(1, 2)), Samp("x", Fraction(1, 2))),
                Samp("y", Fraction(1, 2))),
            Assn("a", EOr(EVar("x"), EVar("z")))),
        Assn("b", EOr(EVar("y"), EVar("z"))))


def cond_samples_program(p: Fraction = Fraction(3, 4),
                         q: Fraction = Fraction(1, 2)) -> Command:
    """A switch coin selects the bias of two conditionally independent coins."""
    p, q = Fraction(p), Fraction(q)
    return Seq(
        Samp("z", Fraction(1, 2)),
        Cond("z",
             Seq(Samp("x", p), Samp("y", p)),
             Seq(Samp("x", q), Samp("y", q))))


def _ranged(S, vars_) -> Atom:
    return enriched(S, DTrue(), RVars(frozenset(vars_)))


def _golden_simple(universe) -> OWeak:
    s1 = samp_node(Top(), "x", Fraction(1, 2))
    s2 = samp_node(s1.triple.post, "y", Fraction(1, 2))
    a3 = assn_node(s2.triple.post, "z", EOr(EVar("x"), EVar("y")))
    body = seqn_node(seqn_node(s1, s2), a3)
    chain = (
        AxiomStep("AP-Imp", "L.L.R", to=_ranged((), "x")),
        AxiomStep("AP-Imp", "L.R", to=_ranged((), "y")),
        AxiomStep("AP-Imp", "R", to=_ranged(("x", "y"), "z")),
        AxiomStep("Indep-2", "L.L"),
        AxiomStep("SepTopElim", "L.L"),
        AxiomStep("Indep-2", "L"),
    )
    return weak_node(Top(), (), chain, body, universe)


def _golden_common_cause(universe) -> OSeqn:
    sz = samp_node(Top(), "z", Fraction(1, 2))
    sx = samp_node(sz.triple.post, "x", Fraction(1, 2))
    sy = samp_node(sx.triple.post, "y", Fraction(1, 2))
    samples = seqn_node(seqn_node(sz, sx), sy)
    chain1 = (
        AxiomStep("AP-Imp", "L.L.R", to=_ranged((), "z")),
        AxiomStep("AP-Imp", "L.R", to=_ranged((), "x")),
        AxiomStep("AP-Imp", "R", to=_ranged((), "y")),
        AxiomStep("Indep-2", "L.L"),
        AxiomStep("SepTopElim", "L.L"),
        AxiomStep("Pad", "L", S=("z",)),
        AxiomStep("AP-Par", "L.R"),
        AxiomStep("UnionRan", "L.R"),
        AxiomStep("AP-Imp", "L.R", to=_ranged(("z",), ("z", "x"))),
        AxiomStep("Pad", "root", S=("z",)),
        AxiomStep("AP-Par", "R"),
        AxiomStep("UnionRan", "R"),
        AxiomStep("AP-Imp", "R", to=_ranged(("z",), ("z", "y"))),
        AxiomStep("Indep-1", "root"),
    )
    w1 = weak_node(Top(), (), chain1, samples, universe)

    assn_a = assn_node(w1.triple.post, "a", EOr(EVar("x"), EVar("z")))
    chain2 = (
        AxiomStep("AP-Imp", "R", to=_ranged(("x", "z"), "a")),
        AxiomStep("DepAssocR", "root"),
        AxiomStep("Pad", "R", S=("z", "y")),
        AxiomStep("RestExch", "R"),
        AxiomStep("AtomSeq", "R.L"),
        AxiomStep("AtomSeq", "R.R"),
    )
    w2 = weak_node(w1.triple.post, (), chain2, assn_a, universe)

    assn_b = assn_node(w2.triple.post, "b", EOr(EVar("y"), EVar("z")))
    chain3 = (
        AxiomStep("AP-Imp", "R", to=_ranged(("y", "z"), "b")),
        AxiomStep("DepAssocR", "root"),
        AxiomStep("Pad", "R", S=("a",)),
        AxiomStep("SepComm", "R.R"),
        AxiomStep("RestExch", "R"),
        AxiomStep("AtomSeq", "R.L"),
        AxiomStep("AtomSeq", "R.R"),
    )
    w3 = weak_node(w2.triple.post, (), chain3, assn_b, universe)
    return seqn_node(seqn_node(w1, w2), w3)


def _branch_chain(value: Expr) -> tuple[AxiomStep, ...]:
    """The shared shape of both conditional-branch weakening chains."""
    fixed = DEq("z", value)
    zx = Atom(Enriched(DomainFormula(frozenset({"z"}), fixed),
                       RVars(frozenset({"z", "x"}))))
    zy = Atom(Enriched(DomainFormula(frozenset({"z"}), fixed),
                       RVars(frozenset({"z", "y"}))))
    both = Atom(Enriched(DomainFormula(frozenset({"z"}), fixed),
                         RSep(RVars(frozenset({"z", "x"})),
                              RVars(frozenset({"z", "y"})))))
    return (
        AxiomStep("AP-Imp", "L.R", to=_ranged((), "x")),
        AxiomStep("AP-Imp", "R", to=_ranged((), "y")),
        AxiomStep("DepTopElim", "L.L"),
        AxiomStep("Pad", "L", S=("z",)),
        AxiomStep("AP-Par", "L.R"),
        AxiomStep("UnionRan", "L.R"),
        AxiomStep("AP-Imp", "L.R", to=zx),
        AxiomStep("Pad", "root", S=("z",)),
        AxiomStep("AP-Par", "R"),
        AxiomStep("UnionRan", "R"),
        AxiomStep("AP-Imp", "R", to=zy),
        AxiomStep("Indep-1", "root"),
        AxiomStep("AP-Par", "R"),
        AxiomStep("AP-Imp", "R", to=both),
    )


def _golden_cond_samples(p: Fraction, q: Fraction, universe) -> OWeak:
    sz = samp_node(Top(), "z", Fraction(1, 2))
    chain0 = (
        AxiomStep("AP-Imp", "R", to=_ranged((), "z")),
        AxiomStep("Indep-2", "root"),
        AxiomStep("SepTopElim", "root"),
        AxiomStep("DepTopIntro", "root"),
    )
    w0 = weak_node(Top(), (), chain0, sz, universe)

    def branch(value: Expr, bias: Fraction) -> OWeak:
        pre = Dep(_guard_atom("z", value), Top())
        sx = samp_node(pre, "x", bias)
        sy = samp_node(sx.triple.post, "y", bias)
        return weak_node(pre, (), _branch_chain(value), seqn_node(sx, sy),
                         universe)

    cond = dcond_node("z", branch(ETrue(), Fraction(p)),
                      branch(EFalse(), Fraction(q)))
    body = seqn_node(w0, cond)
    both = RSep(RVars(frozenset({"z", "x"})), RVars(frozenset({"z", "y"})))
    final = (
        AxiomStep("AP-Or", "R"),
        AxiomStep("AP-Imp", "R", to=Atom(Enriched(
            DomainFormula(frozenset({"z"}), DTrue()), both))),
        AxiomStep("RevPar", "R"),
        AxiomStep("Split", "R.L", left=("z",), right=("x",)),
        AxiomStep("AndE2", "R.L"),
        AxiomStep("Split", "R.R", left=("z",), right=("y",)),
        AxiomStep("AndE2", "R.R"),
    )
    return weak_node(Top(), (), final, body, universe)


def golden_outlines(p: Fraction = Fraction(3, 4), q: Fraction = Fraction(1, 2),
                    universe: tuple[Value, ...] = BOOL_UNIVERSE,
                    ) -> dict[str, OutlineNode]:
    """Three checked proof outlines: an or of two coins, a common cause, and
    a conditional whose branches sample with switched biases."""
    return {
        "simple": _golden_simple(universe),
        "common-cause": _golden_common_cause(universe),
        "cond-samples": _golden_cond_samples(Fraction(p), Fraction(q), universe),
    }
