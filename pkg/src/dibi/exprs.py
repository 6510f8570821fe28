"""Boolean expressions over program variables, shared by assertions and programs.

Truth values are encoded as integers: tt is 1 and ff is 0. This matches the
default value universe, so expressions evaluate inside any memory whose values
are drawn from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .memory import DomainError, Memory, Value, VarSet


class Expr:
    """Base class for boolean expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class EVar(Expr):
    name: str


@dataclass(frozen=True)
class ETrue(Expr):
    pass


@dataclass(frozen=True)
class EFalse(Expr):
    pass


@dataclass(frozen=True)
class ENot(Expr):
    arg: Expr


@dataclass(frozen=True)
class EAnd(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class EOr(Expr):
    left: Expr
    right: Expr


TT: Value = 1
FF: Value = 0


def eval_expr(e: Expr, m: Memory) -> Value:
    """Evaluate e in memory m, yielding 1 or 0."""
    if isinstance(e, EVar):
        v = m.value(e.name)
        return TT if v == TT else FF
    if isinstance(e, ETrue):
        return TT
    if isinstance(e, EFalse):
        return FF
    if isinstance(e, ENot):
        return TT if eval_expr(e.arg, m) == FF else FF
    if isinstance(e, EAnd):
        return TT if eval_expr(e.left, m) == TT and eval_expr(e.right, m) == TT else FF
    if isinstance(e, EOr):
        return TT if eval_expr(e.left, m) == TT or eval_expr(e.right, m) == TT else FF
    raise TypeError(f"not an expression: {e!r}")


def fv_expr(e: Expr) -> VarSet:
    if isinstance(e, EVar):
        return frozenset({e.name})
    if isinstance(e, (ETrue, EFalse)):
        return frozenset()
    if isinstance(e, ENot):
        return fv_expr(e.arg)
    if isinstance(e, (EAnd, EOr)):
        return fv_expr(e.left) | fv_expr(e.right)
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True)
class Bern:
    """A Bernoulli sampling expression with an exact rational bias.

    Closed (no free variables): the bias is a constant, so the denoted
    distribution of the sampled variable does not depend on the memory.
    """

    bias: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bias", Fraction(self.bias))
        if not 0 <= self.bias <= 1:
            raise ValueError(f"bias must lie in [0, 1]: {self.bias}")


DistExpr = Bern


def fv_dist_expr(d: DistExpr) -> VarSet:
    if isinstance(d, Bern):
        return frozenset()
    raise TypeError(f"not a distribution expression: {d!r}")
