"""Hilbert-style sequent derivations and their checker.

A derivation is a tree of rule applications, each node carrying its stated
conclusion sequent. Checking is first-order and purely structural: rule
schemas match whole subformulas, with no implicit associativity or
commutativity, so reassociation must appear as explicit rule applications.
Cut nodes are validated by macro-expansion into the three core rules that
derive them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from .formulas import (
    And,
    Atom,
    BasicPair,
    Bot,
    Dep,
    DepWandL,
    DepWandR,
    EmpI,
    Formula,
    Imp,
    Or,
    Sep,
    SepWand,
    Top,
    atom,
    print_formula,
)


class RuleName(Enum):
    """Rule tags, valued by their file-surface spellings."""

    AX = "Ax"
    TOP = "Top"
    BOT = "Bot"
    AND_R = "And-R"
    AND_L = "And-L"
    AND_E1 = "And-E1"
    AND_E2 = "And-E2"
    OR_L = "Or-L"
    OR_R = "Or-R"
    IMP_R = "Imp-R"
    MP = "MP"
    SEPIMP_R = "SepImp-R"
    SEPIMP_MP = "SepImp-MP"
    DEPIMPR_R = "DepImpR-R"
    DEPIMPR_MP = "DepImpR-MP"
    DEPIMPL_R = "DepImpL-R"
    DEPIMPL_MP = "DepImpL-MP"
    SEP_UNIT = "Sep-Unit"
    SEP_CONJ = "Sep-Conj"
    SEP_COMM = "Sep-Comm"
    SEP_ASSOC = "Sep-Assoc"
    DEP_LUNIT = "Dep-LUnit"
    DEP_RUNIT = "Dep-RUnit"
    DEP_CONJ = "Dep-Conj"
    DEP_ASSOC = "Dep-Assoc"
    REV_EX = "RevEx"
    CUT = "Cut"
    SPLIT = "Split"


RULE_ARITY: dict[RuleName, int] = {
    RuleName.AX: 0,
    RuleName.TOP: 0,
    RuleName.BOT: 0,
    RuleName.SEP_UNIT: 0,
    RuleName.SEP_COMM: 0,
    RuleName.SEP_ASSOC: 0,
    RuleName.DEP_LUNIT: 0,
    RuleName.DEP_RUNIT: 0,
    RuleName.DEP_ASSOC: 0,
    RuleName.REV_EX: 0,
    RuleName.SPLIT: 0,
    RuleName.AND_L: 1,
    RuleName.AND_E1: 1,
    RuleName.AND_E2: 1,
    RuleName.OR_R: 1,
    RuleName.IMP_R: 1,
    RuleName.SEPIMP_R: 1,
    RuleName.DEPIMPR_R: 1,
    RuleName.DEPIMPL_R: 1,
    RuleName.AND_R: 2,
    RuleName.OR_L: 2,
    RuleName.MP: 2,
    RuleName.SEPIMP_MP: 2,
    RuleName.DEPIMPR_MP: 2,
    RuleName.DEPIMPL_MP: 2,
    RuleName.SEP_CONJ: 2,
    RuleName.DEP_CONJ: 2,
    RuleName.CUT: 2,
}

RULE_BY_NAME: dict[str, RuleName] = {r.value: r for r in RuleName}


@dataclass(frozen=True)
class Sequent:
    ante: Formula
    cons: Formula


@dataclass(frozen=True)
class Derivation:
    rule: RuleName
    premises: tuple
    conclusion: Sequent

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        for p in self.premises:
            if not isinstance(p, Derivation):
                raise TypeError(f"premise is not a derivation: {p!r}")


def leaf(rule: RuleName, ante: Formula, cons: Formula) -> Derivation:
    return Derivation(rule, (), Sequent(ante, cons))


def node(rule: RuleName, premises: Sequence[Derivation], ante: Formula,
         cons: Formula) -> Derivation:
    return Derivation(rule, tuple(premises), Sequent(ante, cons))


def _show(P: Formula) -> str:
    try:
        return print_formula(P)
    except ValueError:
        return repr(P)


def show_sequent(s: Sequent) -> str:
    return f"{_show(s.ante)} |- {_show(s.cons)}"


class RuleMismatch(Exception):
    """A rule application whose shape does not fit its schema.

    path locates the offending node: 'root', then premise indices, as in
    'root.1.0'.
    """

    def __init__(self, message: str, path: str = "root"):
        super().__init__(f"{path}: {message}")
        self.reason = message
        self.path = path


# ---------------------------------------------------------------- rule schemas

def check_rule(rule: RuleName, prems: Sequence[Sequent], concl: Sequent,
               path: str = "root") -> None:
    """Validate one rule application; raises RuleMismatch when it fails."""

    def fail(message: str):
        raise RuleMismatch(f"{rule.value}: {message}", path)

    if len(prems) != RULE_ARITY[rule]:
        fail(f"expected {RULE_ARITY[rule]} premises, got {len(prems)}")

    a, c = concl.ante, concl.cons

    if rule is RuleName.AX:
        if a != c:
            fail("both sides must be the same formula")
    elif rule is RuleName.TOP:
        if c != Top():
            fail("consequent must be T")
    elif rule is RuleName.BOT:
        if a != Bot():
            fail("antecedent must be F")
    elif rule is RuleName.AND_R:
        if prems[0].ante != a or prems[1].ante != a:
            fail("premises must share the conclusion's antecedent")
        if c != And(prems[0].cons, prems[1].cons):
            fail("consequent must conjoin the premise consequents in order")
    elif rule is RuleName.AND_L:
        if not isinstance(a, And):
            fail("antecedent must be a conjunction")
        if prems[0] != Sequent(a.right, c):
            fail("premise must prove the consequent from the right conjunct")
    elif rule is RuleName.AND_E1 or rule is RuleName.AND_E2:
        pc = prems[0].cons
        if not isinstance(pc, And):
            fail("premise consequent must be a conjunction")
        if prems[0].ante != a:
            fail("antecedent must match the premise")
        want = pc.left if rule is RuleName.AND_E1 else pc.right
        if c != want:
            fail("consequent must be the selected conjunct")
    elif rule is RuleName.OR_L:
        if not isinstance(a, Or):
            fail("antecedent must be a disjunction")
        if prems[0] != Sequent(a.left, c) or prems[1] != Sequent(a.right, c):
            fail("premises must prove the consequent from each disjunct in order")
    elif rule is RuleName.OR_R:
        if not isinstance(c, Or):
            fail("consequent must be a disjunction")
        if prems[0].ante != a:
            fail("antecedent must match the premise")
        if prems[0].cons != c.left and prems[0].cons != c.right:
            fail("premise consequent must be one of the disjuncts")
    elif rule is RuleName.IMP_R:
        if not isinstance(c, Imp):
            fail("consequent must be an implication")
        if prems[0] != Sequent(And(a, c.left), c.right):
            fail("premise must move the hypothesis into the antecedent conjunction")
    elif rule is RuleName.MP:
        pc = prems[0].cons
        if not isinstance(pc, Imp):
            fail("first premise must conclude an implication")
        if prems[0].ante != a or prems[1].ante != a:
            fail("premises must share the conclusion's antecedent")
        if prems[1].cons != pc.left:
            fail("second premise must prove the hypothesis")
        if c != pc.right:
            fail("consequent must be the implication's conclusion")
    elif rule is RuleName.SEPIMP_R:
        if not isinstance(c, SepWand):
            fail("consequent must be a separating implication")
        if prems[0] != Sequent(Sep(a, c.left), c.right):
            fail("premise must separate the hypothesis onto the antecedent")
    elif rule is RuleName.SEPIMP_MP:
        pc = prems[0].cons
        if not isinstance(pc, SepWand):
            fail("first premise must conclude a separating implication")
        if a != Sep(prems[0].ante, prems[1].ante):
            fail("antecedent must separate the premise antecedents in order")
        if prems[1].cons != pc.left:
            fail("second premise must prove the hypothesis")
        if c != pc.right:
            fail("consequent must be the implication's conclusion")
    elif rule is RuleName.DEPIMPR_R:
        if not isinstance(c, DepWandR):
            fail("consequent must be a right sequencing implication")
        if prems[0] != Sequent(Dep(a, c.left), c.right):
            fail("premise must sequence the hypothesis after the antecedent")
    elif rule is RuleName.DEPIMPR_MP:
        pc = prems[0].cons
        if not isinstance(pc, DepWandR):
            fail("first premise must conclude a right sequencing implication")
        if a != Dep(prems[0].ante, prems[1].ante):
            fail("antecedent must sequence the premise antecedents in order")
        if prems[1].cons != pc.left:
            fail("second premise must prove the hypothesis")
        if c != pc.right:
            fail("consequent must be the implication's conclusion")
    elif rule is RuleName.DEPIMPL_R:
        if not isinstance(c, DepWandL):
            fail("consequent must be a left sequencing implication")
        if prems[0] != Sequent(Dep(c.left, a), c.right):
            fail("premise must sequence the hypothesis before the antecedent")
    elif rule is RuleName.DEPIMPL_MP:
        pc = prems[0].cons
        if not isinstance(pc, DepWandL):
            fail("first premise must conclude a left sequencing implication")
        if a != Dep(prems[1].ante, prems[0].ante):
            fail("antecedent must sequence second premise before first")
        if prems[1].cons != pc.left:
            fail("second premise must prove the hypothesis")
        if c != pc.right:
            fail("consequent must be the implication's conclusion")
    elif rule is RuleName.SEP_UNIT:
        if c != Sep(a, EmpI()) and a != Sep(c, EmpI()):
            fail("one side must be the other separated with the unit on the right")
    elif rule is RuleName.SEP_CONJ:
        if not isinstance(a, Sep) or not isinstance(c, Sep):
            fail("both sides must be separations")
        if prems[0] != Sequent(a.left, c.left) or prems[1] != Sequent(a.right, c.right):
            fail("premises must prove the components in order")
    elif rule is RuleName.SEP_COMM:
        if not isinstance(a, Sep) or c != Sep(a.right, a.left):
            fail("consequent must swap the antecedent separation")
    elif rule is RuleName.SEP_ASSOC:
        ok = (isinstance(a, Sep) and isinstance(a.right, Sep)
              and c == Sep(Sep(a.left, a.right.left), a.right.right)) or \
             (isinstance(a, Sep) and isinstance(a.left, Sep)
              and c == Sep(a.left.left, Sep(a.left.right, a.right)))
        if not ok:
            fail("sides must be the two associations of one separation")
    elif rule is RuleName.DEP_LUNIT:
        if c != Dep(EmpI(), a):
            fail("consequent must prefix the antecedent with the unit")
    elif rule is RuleName.DEP_RUNIT:
        if c != Dep(a, EmpI()) and a != Dep(c, EmpI()):
            fail("one side must be the other sequenced with the unit on the right")
    elif rule is RuleName.DEP_CONJ:
        if not isinstance(a, Dep) or not isinstance(c, Dep):
            fail("both sides must be sequencings")
        if prems[0] != Sequent(a.left, c.left) or prems[1] != Sequent(a.right, c.right):
            fail("premises must prove the components in order")
    elif rule is RuleName.DEP_ASSOC:
        ok = (isinstance(a, Dep) and isinstance(a.right, Dep)
              and c == Dep(Dep(a.left, a.right.left), a.right.right)) or \
             (isinstance(a, Dep) and isinstance(a.left, Dep)
              and c == Dep(a.left.left, Dep(a.left.right, a.right)))
        if not ok:
            fail("sides must be the two associations of one sequencing")
    elif rule is RuleName.REV_EX:
        if not (isinstance(a, Sep) and isinstance(a.left, Dep) and isinstance(a.right, Dep)):
            fail("antecedent must separate two sequencings")
        p, q = a.left.left, a.left.right
        r, s = a.right.left, a.right.right
        if c != Dep(Sep(p, r), Sep(q, s)):
            fail("consequent must exchange the separation and the sequencing")
    elif rule is RuleName.CUT:
        if prems[0].cons != prems[1].ante:
            fail("premises must chain through one middle formula")
        if a != prems[0].ante or c != prems[1].cons:
            fail("conclusion must join the outer formulas of the chain")
    elif rule is RuleName.SPLIT:
        if not _split_shape(a, c) and not _split_shape(c, a):
            fail("sides must be one atom and its conjunction of range splits")
    else:  # pragma: no cover
        fail("unknown rule")


def _split_shape(whole: Formula, parts: Formula) -> bool:
    """whole = <Z |> Y u W>, parts = <Z |> Y> & <Z |> W>."""
    if not (isinstance(whole, Atom) and isinstance(whole.ap, BasicPair)):
        return False
    if not (isinstance(parts, And)
            and isinstance(parts.left, Atom) and isinstance(parts.left.ap, BasicPair)
            and isinstance(parts.right, Atom) and isinstance(parts.right.ap, BasicPair)):
        return False
    z, yw = whole.ap.dom_vars, whole.ap.rng_vars
    l, r = parts.left.ap, parts.right.ap
    return l.dom_vars == z and r.dom_vars == z and l.rng_vars | r.rng_vars == yw


# ------------------------------------------------------------------- checking

def expand_cut(d: Derivation) -> Derivation:
    """Replace every Cut node by its three-rule derivation.

    Cut(d1: P |- Q, d2: Q |- R) becomes modus ponens on the implication
    P |- Q -> R, itself obtained by weakening d2's antecedent to P & Q and
    introducing the implication.
    """
    premises = tuple(expand_cut(p) for p in d.premises)
    if d.rule is not RuleName.CUT:
        return Derivation(d.rule, premises, d.conclusion)
    d1, d2 = premises
    p = d1.conclusion.ante
    q = d1.conclusion.cons
    r = d2.conclusion.cons
    weakened = Derivation(RuleName.AND_L, (d2,), Sequent(And(p, q), r))
    imp = Derivation(RuleName.IMP_R, (weakened,), Sequent(p, Imp(q, r)))
    return Derivation(RuleName.MP, (imp, d1), Sequent(p, r))


def check_derivation(d: Derivation, path: str = "root") -> bool:
    """Validate the whole tree; True on success, RuleMismatch on failure.

    The Cut schema in check_rule accepts exactly the applications whose
    expansion passes under the core rules, which the test suite pins down.
    """
    if len(d.premises) != RULE_ARITY[d.rule]:
        raise RuleMismatch(
            f"{d.rule.value}: expected {RULE_ARITY[d.rule]} premises, got {len(d.premises)}",
            path)
    for i, p in enumerate(d.premises):
        check_derivation(p, f"{path}.{i}")
    check_rule(d.rule, [p.conclusion for p in d.premises], d.conclusion, path)
    return True


def derivation_ok(d: Derivation) -> bool:
    """Non-raising wrapper around check_derivation."""
    try:
        return check_derivation(d)
    except RuleMismatch:
        return False


# ------------------------------------------------------------------ traversal

def positions(d: Derivation) -> Iterator[tuple[int, ...]]:
    """All node positions as premise-index paths, root first."""
    yield ()
    for i, p in enumerate(d.premises):
        for pos in positions(p):
            yield (i,) + pos


def node_at(d: Derivation, pos: tuple[int, ...]) -> Derivation:
    for i in pos:
        d = d.premises[i]
    return d


def replace_node(d: Derivation, pos: tuple[int, ...], new: Derivation) -> Derivation:
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    premises = list(d.premises)
    premises[i] = replace_node(premises[i], rest, new)
    return Derivation(d.rule, tuple(premises), d.conclusion)


# ------------------------------------------------------------------ mutations

FRESH_ATOM = atom(set(), {"mutantvar"})

_MAJOR_PREMISE_SHAPE = {
    RuleName.MP: Imp,
    RuleName.SEPIMP_MP: SepWand,
    RuleName.DEPIMPR_MP: DepWandR,
    RuleName.DEPIMPL_MP: DepWandL,
}


def mutations(d: Derivation, seed: int, count: int = 50) -> list[Derivation]:
    """Deterministically sample invalid variants of a valid derivation.

    Operates on the cut-free expansion. Three constructions, each broken by
    its schema with no checker consultation: renaming a node's rule to one of
    a different premise count; replacing one side of a node's conclusion with
    an atom over a variable fresh to the whole tree; and swapping the
    premises of a node whose two premise conclusions differ.
    """
    base = expand_cut(d)
    out: list[Derivation] = []

    for pos in positions(base):
        n = node_at(base, pos)
        for other in RuleName:
            if other is RuleName.CUT or RULE_ARITY[other] == RULE_ARITY[n.rule]:
                continue
            out.append(replace_node(
                base, pos, Derivation(other, n.premises, n.conclusion)))

    for pos in positions(base):
        n = node_at(base, pos)
        if n.rule is not RuleName.TOP:
            mutated = Sequent(n.conclusion.ante, FRESH_ATOM)
            out.append(replace_node(
                base, pos, Derivation(n.rule, n.premises, mutated)))
        if n.rule is not RuleName.BOT:
            mutated = Sequent(FRESH_ATOM, n.conclusion.cons)
            out.append(replace_node(
                base, pos, Derivation(n.rule, n.premises, mutated)))

    for pos in positions(base):
        n = node_at(base, pos)
        if len(n.premises) != 2:
            continue
        p0, p1 = n.premises
        if p0.conclusion == p1.conclusion:
            continue
        # swapping an implication-elimination pair can stay well-shaped when
        # the minor premise itself concludes the right implication form
        cls = _MAJOR_PREMISE_SHAPE.get(n.rule)
        if cls is not None and isinstance(p1.conclusion.cons, cls):
            continue
        out.append(replace_node(
            base, pos, Derivation(n.rule, (p1, p0), n.conclusion)))

    rng = random.Random(seed)
    rng.shuffle(out)
    return out[:count]


# ------------------------------------------------------------ the golden trees

def sep_to_dep_derivation(P: Formula | None = None,
                          Q: Formula | None = None) -> Derivation:
    """P * Q |- P ; Q, routed through the exchange of units."""
    if P is None:
        P = atom(set(), {"p"})
    if Q is None:
        Q = atom(set(), {"q"})
    I = EmpI()
    n1 = leaf(RuleName.DEP_RUNIT, P, Dep(P, I))
    n2 = leaf(RuleName.DEP_LUNIT, Q, Dep(I, Q))
    n3 = node(RuleName.SEP_CONJ, (n1, n2), Sep(P, Q), Sep(Dep(P, I), Dep(I, Q)))
    n4 = leaf(RuleName.REV_EX, Sep(Dep(P, I), Dep(I, Q)), Dep(Sep(P, I), Sep(I, Q)))
    n5 = node(RuleName.CUT, (n3, n4), Sep(P, Q), Dep(Sep(P, I), Sep(I, Q)))
    n6 = leaf(RuleName.SEP_UNIT, Sep(P, I), P)
    n7 = leaf(RuleName.SEP_COMM, Sep(I, Q), Sep(Q, I))
    n8 = leaf(RuleName.SEP_UNIT, Sep(Q, I), Q)
    n9 = node(RuleName.CUT, (n7, n8), Sep(I, Q), Q)
    n10 = node(RuleName.DEP_CONJ, (n6, n9), Dep(Sep(P, I), Sep(I, Q)), Dep(P, Q))
    return node(RuleName.CUT, (n5, n10), Sep(P, Q), Dep(P, Q))


def cut_derivation() -> Derivation:
    """P |- I * P by chaining the unit introduction with commutativity."""
    P = atom(set(), {"x"})
    I = EmpI()
    d1 = leaf(RuleName.SEP_UNIT, P, Sep(P, I))
    d2 = leaf(RuleName.SEP_COMM, Sep(P, I), Sep(I, P))
    return node(RuleName.CUT, (d1, d2), P, Sep(I, P))


def _entailment_glue(d: Derivation) -> Derivation:
    """From P |- Q derive T |- P -> Q: weaken the antecedent, then introduce."""
    s = d.conclusion
    weakened = node(RuleName.AND_L, (d,), And(Top(), s.ante), s.cons)
    return node(RuleName.IMP_R, (weakened,), Top(), Imp(s.ante, s.cons))


def symmetry_derivation() -> Derivation:
    """T |- (z first; x and y split) -> (z first; y and x split)."""
    P = atom(set(), {"z"})
    Q = atom({"z"}, {"x"})
    R = atom({"z"}, {"y"})
    swap = leaf(RuleName.SEP_COMM, Sep(Q, R), Sep(R, Q))
    keep = leaf(RuleName.AX, P, P)
    body = node(RuleName.DEP_CONJ, (keep, swap),
                Dep(P, Sep(Q, R)), Dep(P, Sep(R, Q)))
    return _entailment_glue(body)


def decomposition_derivation() -> Derivation:
    """T |- (joint split off z) -> (each component split off z)."""
    P = atom(set(), {"z"})
    Q = atom({"z"}, {"x"})
    R = atom({"z"}, {"y"})
    S = atom({"z"}, {"w"})
    RS = atom({"z"}, {"y", "w"})

    split = leaf(RuleName.SPLIT, RS, And(R, S))
    b4 = node(RuleName.SEP_CONJ, (leaf(RuleName.AX, Q, Q), split),
              Sep(Q, RS), Sep(Q, And(R, S)))
    b5 = node(RuleName.DEP_CONJ, (leaf(RuleName.AX, P, P), b4),
              Dep(P, Sep(Q, RS)), Dep(P, Sep(Q, And(R, S))))

    def project(selector: RuleName, picked: Formula) -> Derivation:
        pick = node(selector, (leaf(RuleName.AX, And(R, S), And(R, S)),),
                    And(R, S), picked)
        inner = node(RuleName.SEP_CONJ, (leaf(RuleName.AX, Q, Q), pick),
                     Sep(Q, And(R, S)), Sep(Q, picked))
        return node(RuleName.DEP_CONJ, (leaf(RuleName.AX, P, P), inner),
                    Dep(P, Sep(Q, And(R, S))), Dep(P, Sep(Q, picked)))

    c5 = project(RuleName.AND_E1, R)
    c10 = project(RuleName.AND_E2, S)
    c11 = node(RuleName.AND_R, (c5, c10),
               Dep(P, Sep(Q, And(R, S))),
               And(Dep(P, Sep(Q, R)), Dep(P, Sep(Q, S))))
    d1 = node(RuleName.CUT, (b5, c11),
              Dep(P, Sep(Q, RS)),
              And(Dep(P, Sep(Q, R)), Dep(P, Sep(Q, S))))
    return _entailment_glue(d1)


def golden_proofs() -> dict[str, Derivation]:
    """The four reference derivations shipped as proof fixtures."""
    return {
        "sep2dep": sep_to_dep_derivation(),
        "cut": cut_derivation(),
        "graphoid-symmetry": symmetry_derivation(),
        "graphoid-decomposition": decomposition_derivation(),
    }
