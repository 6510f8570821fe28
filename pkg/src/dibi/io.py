"""Reading and writing the on-disk object formats.

Distributions, relations, and kernels use line-oriented tables; programs,
proof outlines, and derivations use parenthesized forms over the shared
lexer.  Every printer is a canonical inverse of its parser, so for any
object x, parse(print(x)) == x.  Malformed syntax raises ParseError; text
that parses but denotes no valid object raises ValidationError.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .exprs import fv_expr
from .formulas import (
    Formula,
    _parse_expr,
    _parse_primary,
    _parse_rational,
    parse_formula,
    print_expr,
    print_formula,
)
from .lex import ParseError, Token, TokenStream, tokenize
from .memory import BOOL_UNIVERSE, Memory, Value, VarSet, memory
from .prob import Dist, MarkovKernel, dist
from .programs import (
    STEP_NAMES,
    Assn,
    AxiomStep,
    Command,
    Cond,
    OAssn,
    ODCond,
    OFrame,
    OSamp,
    OSeqn,
    OSkip,
    OutlineNode,
    OWeak,
    Samp,
    Seq,
    Skip,
    Triple,
    cmd_vars,
)
from .proof import RULE_BY_NAME, Derivation, Sequent, show_sequent
from .rel import Relation

__all__ = [
    "ParseError",
    "ValidationError",
    "Workspace",
    "value_universe",
    "parse_dist",
    "print_dist",
    "parse_rel",
    "print_rel",
    "parse_kernel",
    "print_kernel",
    "parse_program",
    "parse_program_with_vars",
    "print_program",
    "print_command",
    "parse_outline",
    "print_outline",
    "parse_derivation",
    "print_derivation",
]


class ValidationError(Exception):
    """Well-formed syntax carrying a value the object's invariants reject."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


def value_universe() -> tuple[Value, ...]:
    """The ambient value alphabet for distributions and kernels.

    Booleans unless DIBI_VALUE_UNIVERSE gives a comma-separated list;
    entries made only of digits are read as integers.
    """
    raw = os.environ.get("DIBI_VALUE_UNIVERSE")
    if raw is None:
        return BOOL_UNIVERSE
    vals: list[Value] = []
    for part in raw.split(","):
        part = part.strip()
        if part:
            vals.append(int(part) if part.isdigit() else part)
    if not vals:
        raise ValidationError("DIBI_VALUE_UNIVERSE names no values")
    return tuple(dict.fromkeys(vals))


# ---------------------------------------------------------------------------
# Line-oriented table formats


def _lines(text: str) -> list[list[Token]]:
    groups: dict[int, list[Token]] = {}
    for tok in tokenize(text):
        if tok.kind != "eof":
            groups.setdefault(tok.line, []).append(tok)
    return [groups[n] for n in sorted(groups)]


def _line_stream(toks: list[Token]) -> TokenStream:
    last = toks[-1]
    end = Token("eof", "", last.line, last.col + max(len(last.text), 1))
    return TokenStream(toks + [end])


def _end_of_line(ts: TokenStream):
    if not ts.at("eof"):
        ts.error("unexpected text at end of line")


def _parse_header(toks: list[Token], keyword: str) -> list[str]:
    ts = _line_stream(toks)
    head = ts.expect("id", f"'{keyword}:' header")
    if head.text != keyword:
        raise ParseError(f"expected a '{keyword}:' header", head.line, head.col)
    ts.expect(":", f"':' after '{keyword}'")
    names: list[str] = []
    while ts.at("id"):
        tok = ts.next()
        if tok.text in names:
            raise ParseError(f"{tok.text!r} listed twice", tok.line, tok.col)
        names.append(tok.text)
    _end_of_line(ts)
    return names


def _parse_value(ts: TokenStream) -> Value:
    tok = ts.peek()
    if tok.kind == "int":
        ts.next()
        return int(tok.text)
    if tok.kind in ("id", "str"):
        ts.next()
        return tok.text
    ts.error("expected a value")


def _parse_assignments(ts: TokenStream) -> dict[str, Value]:
    out: dict[str, Value] = {}
    while ts.at("id"):
        name = ts.next()
        if name.text in out:
            raise ParseError(f"{name.text!r} assigned twice", name.line, name.col)
        ts.expect("=", "'=' after the variable")
        out[name.text] = _parse_value(ts)
    return out


def _weighted_rows(rowlines: list[list[Token]], dom: VarSet,
                   universe: tuple[Value, ...]) -> Dist:
    """Build a distribution from `x=0 y=1 : 3/8` lines; weights must sum to 1."""
    weights: dict[Memory, Fraction] = {}
    last = rowlines[-1][0].line if rowlines else None
    for toks in rowlines:
        ts = _line_stream(toks)
        where = toks[0].line
        assigns = _parse_assignments(ts)
        ts.expect(":", "':' before the weight")
        w = _parse_rational(ts)
        _end_of_line(ts)
        if set(assigns) != dom:
            raise ValidationError(
                f"row must assign exactly {sorted(dom)}", where)
        bad = sorted(str(v) for v in assigns.values() if v not in universe)
        if bad:
            raise ValidationError(
                f"value(s) {', '.join(bad)} outside the universe", where)
        m = memory(assigns)
        if m in weights:
            raise ValidationError("duplicate row", where)
        if w < 0:
            raise ValidationError("weights cannot be negative", where)
        weights[m] = w
    total = sum(weights.values(), Fraction(0))
    if total != 1:
        raise ValidationError(f"weights sum to {total}, not 1", last)
    try:
        return dist(weights, universe=universe, dom=dom)
    except ValueError as exc:
        raise ValidationError(str(exc), last) from exc


def parse_dist(text: str, universe: tuple[Value, ...] | None = None) -> Dist:
    """Read a `vars:` header and one weighted assignment per line."""
    if universe is None:
        universe = value_universe()
    lines = _lines(text)
    if not lines:
        raise ParseError("empty distribution file", 1, 1)
    names = _parse_header(lines[0], "vars")
    return _weighted_rows(lines[1:], frozenset(names), universe)


def _show_value(v: Value) -> str:
    if isinstance(v, int):
        return str(v)
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*(-[A-Za-z0-9][A-Za-z0-9_']*)*", v):
        return v
    return f'"{v}"'


def _show_row(m: Memory, names: list[str]) -> str:
    return " ".join(f"{x}={_show_value(m.value(x))}" for x in names)


def print_dist(mu: Dist) -> str:
    names = sorted(mu.dom)
    out = ["vars: " + " ".join(names)]
    for m, p in mu.entries:
        cells = _show_row(m, names)
        out.append(f"{cells} : {p}" if cells else f": {p}")
    return "\n".join(out) + "\n"


def _value_key(v: Value):
    return (isinstance(v, str), v)


def parse_rel(text: str, universe: tuple[Value, ...] | None = None) -> Relation:
    """Read an `attrs:` header and one tuple per line.

    Unless a universe is supplied, the value alphabet defaults to exactly
    the values that appear in the rows.
    """
    lines = _lines(text)
    if not lines:
        raise ParseError("empty relation file", 1, 1)
    names = _parse_header(lines[0], "attrs")
    rows: set[Memory] = set()
    observed: set[Value] = set()
    for toks in lines[1:]:
        ts = _line_stream(toks)
        where = toks[0].line
        vals = []
        while not ts.at("eof"):
            vals.append(_parse_value(ts))
        if len(vals) != len(names):
            raise ValidationError(
                f"row has {len(vals)} values for {len(names)} attributes", where)
        m = memory(dict(zip(names, vals)))
        if m in rows:
            raise ValidationError("duplicate row", where)
        rows.add(m)
        observed.update(vals)
    if universe is None:
        universe = tuple(sorted(observed, key=_value_key))
    return Relation(frozenset(names), frozenset(rows), universe)


def print_rel(R: Relation) -> str:
    names = sorted(R.attrs)
    out = ["attrs: " + " ".join(names)]
    for m in R.sorted_rows():
        out.append(" ".join(_show_value(m.value(x)) for x in names))
    return "\n".join(out) + "\n"


def parse_kernel(text: str,
                 universe: tuple[Value, ...] | None = None) -> MarkovKernel:
    """Read `dom:` and `range:` headers, then `given ...:` blocks of rows.

    Blocks may cover only part of the domain; inputs without a block are the
    kernel's freely-choosable ones.  'given' is reserved in this format.
    """
    if universe is None:
        universe = value_universe()
    lines = _lines(text)
    if len(lines) < 2:
        raise ParseError("kernel files need 'dom:' and 'range:' headers", 1, 1)
    dom = frozenset(_parse_header(lines[0], "dom"))
    rng = frozenset(_parse_header(lines[1], "range"))
    blocks: list[tuple[int, Memory, list[list[Token]]]] = []
    for toks in lines[2:]:
        if toks[0].kind == "id" and toks[0].text == "given":
            ts = _line_stream(toks)
            ts.next()
            assigns = _parse_assignments(ts)
            ts.expect(":", "':' after the block input")
            _end_of_line(ts)
            if set(assigns) != dom:
                raise ValidationError(
                    f"block input must assign exactly {sorted(dom)}",
                    toks[0].line)
            m = memory(assigns)
            if any(m == seen for _, seen, _ in blocks):
                raise ValidationError("duplicate block input", toks[0].line)
            blocks.append((toks[0].line, m, []))
        else:
            if not blocks:
                raise ParseError("row before any 'given' block",
                                 toks[0].line, toks[0].col)
            blocks[-1][2].append(toks)
    rows = []
    for where, m, rowlines in blocks:
        if not rowlines:
            raise ValidationError("block has no rows", where)
        rows.append((m, _weighted_rows(rowlines, rng, universe)))
    try:
        return MarkovKernel(dom, rng, tuple(rows), universe)
    except ValueError as exc:
        raise ValidationError(str(exc), lines[0][0].line) from exc


def print_kernel(f: MarkovKernel) -> str:
    dnames, rnames = sorted(f.dom), sorted(f.rng)
    out = ["dom: " + " ".join(dnames), "range: " + " ".join(rnames)]
    for m, mu in f.rows:
        head = _show_row(m, dnames)
        out.append(f"given {head}:" if head else "given:")
        for m2, p in mu.entries:
            out.append(f"{_show_row(m2, rnames)} : {p}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Programs


def _check_declared(tok: Token, declared: VarSet | None):
    if declared is not None and tok.text not in declared:
        raise ValidationError(f"variable {tok.text!r} is not declared", tok.line)


def _parse_stmt(ts: TokenStream, declared: VarSet | None) -> Command:
    def item() -> Command:
        if ts.accept("{"):
            c = _parse_stmt(ts, declared)
            ts.expect("}")
            return c
        tok = ts.expect("id", "a statement")
        if tok.text == "skip":
            return Skip()
        if tok.text == "if":
            guard = ts.expect("id", "a guard variable")
            _check_declared(guard, declared)
            kw = ts.expect("id", "'then'")
            if kw.text != "then":
                raise ParseError("expected 'then'", kw.line, kw.col)
            ts.expect("{", "'{' around the branch")
            true_branch = _parse_stmt(ts, declared)
            ts.expect("}")
            kw = ts.expect("id", "'else'")
            if kw.text != "else":
                raise ParseError("expected 'else'", kw.line, kw.col)
            ts.expect("{", "'{' around the branch")
            false_branch = _parse_stmt(ts, declared)
            ts.expect("}")
            return Cond(guard.text, true_branch, false_branch)
        _check_declared(tok, declared)
        if ts.accept(":="):
            e = _parse_expr(ts)
            if declared is not None and not fv_expr(e) <= declared:
                raise ValidationError(
                    f"expression reads undeclared {sorted(fv_expr(e) - declared)}",
                    tok.line)
            return Assn(tok.text, e)
        ts.expect("<$", "':=' or '<$'")
        kw = ts.expect("id", "'bern'")
        if kw.text != "bern":
            raise ParseError("only bern(...) sampling is supported",
                             kw.line, kw.col)
        ts.expect("(")
        bias = _parse_rational(ts)
        ts.expect(")")
        try:
            return Samp(tok.text, bias)
        except ValueError as exc:
            raise ValidationError(str(exc), tok.line) from exc

    c = item()
    while ts.accept(";"):
        c = Seq(c, item())
    return c


def parse_program_with_vars(text: str) -> tuple[Command, VarSet]:
    """Parse a `vars ...;` header and a command; also return the header set.

    Running a program uses the declared variables as the memory domain, so
    they may strictly contain the variables the body mentions.
    """
    ts = TokenStream(tokenize(text))
    head = ts.expect("id", "'vars' header")
    if head.text != "vars":
        raise ParseError("program files start with 'vars'", head.line, head.col)
    names: list[str] = []
    while ts.at("id"):
        tok = ts.next()
        if tok.text in names:
            raise ParseError(f"{tok.text!r} declared twice", tok.line, tok.col)
        names.append(tok.text)
    ts.expect(";", "';' after the variable list")
    c = _parse_stmt(ts, frozenset(names))
    if not ts.at("eof"):
        ts.error("unexpected text after the program")
    return c, frozenset(names)


def parse_program(text: str) -> Command:
    return parse_program_with_vars(text)[0]


def print_command(c: Command) -> str:
    """Single-line command form, as used inside triples and branches."""
    if isinstance(c, Skip):
        return "skip"
    if isinstance(c, Assn):
        return f"{c.var} := {print_expr(c.expr)}"
    if isinstance(c, Samp):
        return f"{c.var} <$ bern({c.bias})"
    if isinstance(c, Seq):
        right = print_command(c.second)
        if isinstance(c.second, Seq):
            right = "{ " + right + " }"
        return f"{print_command(c.first)} ; {right}"
    if isinstance(c, Cond):
        return (f"if {c.guard} then {{ {print_command(c.true_branch)} }} "
                f"else {{ {print_command(c.false_branch)} }}")
    raise TypeError(f"not a command: {c!r}")


def print_program(c: Command, declared: Iterable[str]) -> str:
    declared = frozenset(declared)
    if not cmd_vars(c) <= declared:
        raise ValueError(
            f"program uses undeclared {sorted(cmd_vars(c) - declared)}")
    items: list[Command] = []

    def flatten(node: Command):
        if isinstance(node, Seq):
            flatten(node.first)
            items.append(node.second)
        else:
            items.append(node)

    flatten(c)
    body = " ;\n".join(
        "{ " + print_command(i) + " }" if isinstance(i, Seq) else print_command(i)
        for i in items)
    return "vars " + " ".join(sorted(declared)) + ";\n" + body + "\n"


# ---------------------------------------------------------------------------
# Derivations


def _parse_sequent(tok: Token) -> Sequent:
    parts = tok.text.split("|-")
    if len(parts) != 2:
        raise ParseError("a sequent is 'antecedent |- consequent'",
                         tok.line, tok.col)
    try:
        return Sequent(parse_formula(parts[0]), parse_formula(parts[1]))
    except ParseError as exc:
        raise ParseError(f"inside the sequent: {exc}", tok.line, tok.col) from exc


def _parse_deriv(ts: TokenStream) -> Derivation:
    ts.expect("(", "'('")
    name = ts.expect("id", "a rule name")
    rule = RULE_BY_NAME.get(name.text)
    if rule is None:
        raise ParseError(f"unknown rule {name.text!r}", name.line, name.col)
    premises = []
    while ts.at("("):
        premises.append(_parse_deriv(ts))
    conclusion = _parse_sequent(ts.expect("str", "a quoted sequent"))
    ts.expect(")")
    return Derivation(rule, tuple(premises), conclusion)


def parse_derivation(text: str) -> Derivation:
    """Read a parenthesized proof tree with quoted sequents at each node.

    Premise counts are not enforced here; the proof checker reports arity
    mismatches as rejections rather than syntax errors.
    """
    ts = TokenStream(tokenize(text))
    d = _parse_deriv(ts)
    if not ts.at("eof"):
        ts.error("unexpected text after the derivation")
    return d


def print_derivation(d: Derivation) -> str:
    def go(d: Derivation, pad: str) -> str:
        seq = f'"{show_sequent(d.conclusion)}"'
        if not d.premises:
            return f"{pad}({d.rule.value} {seq})"
        inner = "\n".join(go(p, pad + "  ") for p in d.premises)
        return f"{pad}({d.rule.value}\n{inner}\n{pad}  {seq})"

    return go(d, "") + "\n"


# ---------------------------------------------------------------------------
# Proof outlines


_LIST_PARAMS = ("S", "left", "right")


def _parse_path(ts: TokenStream) -> str:
    parts = [ts.expect("id", "a path segment").text]
    while ts.accept("."):
        parts.append(ts.expect("id", "a path segment").text)
    return ".".join(parts)


def _parse_name_list(ts: TokenStream) -> tuple[str, ...]:
    names: list[str] = []
    if ts.at("id"):
        names.append(ts.next().text)
        while ts.accept(","):
            names.append(ts.expect("id", "a variable name").text)
    return tuple(names)


def _parse_step(ts: TokenStream) -> AxiomStep:
    name = ts.expect("id", "an axiom step name")
    if name.text not in STEP_NAMES:
        raise ParseError(f"unknown axiom step {name.text!r}",
                         name.line, name.col)
    params: dict = {}
    if ts.accept("@"):
        ts.expect("{", "'{' after '@'")
        while True:
            key = ts.expect("id", "a parameter name")
            if key.text in params:
                raise ParseError(f"parameter {key.text!r} given twice",
                                 key.line, key.col)
            ts.expect("=", "'=' after the parameter name")
            if key.text == "at":
                params["at"] = _parse_path(ts)
            elif key.text in _LIST_PARAMS:
                params[key.text] = _parse_name_list(ts)
            elif key.text == "to":
                params["to"] = _parse_primary(ts)
            else:
                raise ParseError(f"unknown parameter {key.text!r}",
                                 key.line, key.col)
            if not ts.accept(";"):
                break
        ts.expect("}")
    return AxiomStep(name.text, **params)


def _parse_steps(ts: TokenStream) -> tuple[AxiomStep, ...]:
    ts.expect("[", "'[' before the step list")
    steps = []
    if not ts.at("]"):
        steps.append(_parse_step(ts))
        while ts.accept(","):
            steps.append(_parse_step(ts))
    ts.expect("]")
    return tuple(steps)


def _parse_triple(tok: Token) -> Triple:
    s = tok.text.strip()

    def bad(msg: str):
        raise ParseError(msg, tok.line, tok.col)

    if not (s.startswith("{") and s.endswith("}")):
        bad("a triple is '{pre} command {post}'")
    depth, i = 0, 0
    for i, ch in enumerate(s):
        depth += (ch == "{") - (ch == "}")
        if depth == 0:
            break
    depth, j = 0, len(s) - 1
    for j in range(len(s) - 1, -1, -1):
        depth += (s[j] == "}") - (s[j] == "{")
        if depth == 0:
            break
    cmd_text = s[i + 1:j].strip()
    if i >= j or not cmd_text:
        bad("a triple needs a command between its assertions")
    try:
        pre = parse_formula(s[1:i])
        post = parse_formula(s[j + 1:-1])
        cts = TokenStream(tokenize(cmd_text))
        cmd = _parse_stmt(cts, None)
        if not cts.at("eof"):
            cts.error("unexpected text after the command")
    except ParseError as exc:
        bad(f"inside the triple: {exc}")
    return Triple(pre, cmd, post)


_OUTLINE_ARITY = {"Skip": 0, "Assn": 0, "Samp": 0, "Seqn": 2, "DCond": 2}


def _parse_onode(ts: TokenStream) -> OutlineNode:
    ts.expect("(", "'('")
    head = ts.expect("id", "an outline node name")
    kind = head.text
    if kind == "Weak":
        pre_steps: tuple[AxiomStep, ...] = ()
        post_steps: tuple[AxiomStep, ...] = ()
        seen = set()
        while ts.at("id"):
            label = ts.next()
            if label.text not in ("pre", "axioms") or label.text in seen:
                raise ParseError("expected 'pre [...]', 'axioms [...]', or a "
                                 "subproof", label.line, label.col)
            seen.add(label.text)
            if label.text == "pre":
                pre_steps = _parse_steps(ts)
            else:
                post_steps = _parse_steps(ts)
        child = _parse_onode(ts)
        t = _parse_triple(ts.expect("str", "a quoted triple"))
        ts.expect(")")
        return OWeak(pre_steps, post_steps, child, t)
    if kind == "Frame":
        ftok = ts.expect("str", "a quoted frame formula")
        try:
            frame = parse_formula(ftok.text)
        except ParseError as exc:
            raise ParseError(f"inside the frame formula: {exc}",
                             ftok.line, ftok.col) from exc
        child = _parse_onode(ts)
        t = _parse_triple(ts.expect("str", "a quoted triple"))
        ts.expect(")")
        return OFrame(frame, child, t)
    if kind not in _OUTLINE_ARITY:
        raise ParseError(f"unknown outline node {kind!r}", head.line, head.col)
    children = []
    while ts.at("("):
        children.append(_parse_onode(ts))
    t = _parse_triple(ts.expect("str", "a quoted triple"))
    ts.expect(")")
    if len(children) != _OUTLINE_ARITY[kind]:
        raise ParseError(
            f"{kind} takes {_OUTLINE_ARITY[kind]} subproofs, found "
            f"{len(children)}", head.line, head.col)
    if kind == "Skip":
        return OSkip(t)
    if kind == "Assn":
        return OAssn(t)
    if kind == "Samp":
        return OSamp(t)
    if kind == "Seqn":
        return OSeqn(children[0], children[1], t)
    return ODCond(children[0], children[1], t)


def parse_outline(text: str) -> OutlineNode:
    """Read a parenthesized outline; each node quotes its full triple.

    Only the tree shape is checked here; whether the triples actually fit
    the proof rules is the outline checker's question.
    """
    ts = TokenStream(tokenize(text))
    o = _parse_onode(ts)
    if not ts.at("eof"):
        ts.error("unexpected text after the outline")
    return o


def _show_target(P: Formula) -> str:
    s = print_formula(P)
    return s if s == print_formula(_parse_primary_text(s)) else f"({s})"


def _parse_primary_text(s: str) -> Formula:
    ts = TokenStream(tokenize(s))
    P = _parse_primary(ts)
    if not ts.at("eof"):
        ts.error("not a primary formula")
    return P


def _show_step(st: AxiomStep) -> str:
    parts = []
    if st.at != "root":
        parts.append(f"at={st.at}")
    for key in _LIST_PARAMS:
        v = getattr(st, key)
        if v is not None:
            parts.append(f"{key}=" + ",".join(sorted(v)))
    if st.to is not None:
        try:
            target = _show_target(st.to)
        except ParseError:
            target = f"({print_formula(st.to)})"
        parts.append(f"to={target}")
    if not parts:
        return st.name
    return st.name + "@{" + "; ".join(parts) + "}"


def _show_triple(t: Triple) -> str:
    return (f"{{{print_formula(t.pre)}}} {print_command(t.cmd)} "
            f"{{{print_formula(t.post)}}}")


def print_outline(o: OutlineNode) -> str:
    def go(o: OutlineNode, pad: str) -> str:
        trip = f'"{_show_triple(o.triple)}"'
        deeper = pad + "  "
        if isinstance(o, OSkip):
            return f"{pad}(Skip {trip})"
        if isinstance(o, OAssn):
            return f"{pad}(Assn {trip})"
        if isinstance(o, OSamp):
            return f"{pad}(Samp {trip})"
        if isinstance(o, OSeqn):
            return (f"{pad}(Seqn\n{go(o.first, deeper)}\n"
                    f"{go(o.second, deeper)}\n{deeper}{trip})")
        if isinstance(o, ODCond):
            return (f"{pad}(DCond\n{go(o.true_branch, deeper)}\n"
                    f"{go(o.false_branch, deeper)}\n{deeper}{trip})")
        if isinstance(o, OWeak):
            head = f"{pad}(Weak"
            if o.pre_steps:
                head += " pre [" + ", ".join(map(_show_step, o.pre_steps)) + "]"
            if o.post_steps:
                head += (" axioms ["
                         + ", ".join(map(_show_step, o.post_steps)) + "]")
            return f"{head}\n{go(o.child, deeper)}\n{deeper}{trip})"
        if isinstance(o, OFrame):
            return (f'{pad}(Frame "{print_formula(o.frame)}"\n'
                    f"{go(o.child, deeper)}\n{deeper}{trip})")
        raise TypeError(f"not an outline node: {o!r}")

    return go(o, "") + "\n"


# ---------------------------------------------------------------------------
# The workspace


_LOADERS = {
    ".dist": "dists",
    ".rel": "rels",
    ".kern": "kernels",
    ".dibi": "formulas",
    ".prog": "programs",
    ".outline": "outlines",
    ".proof": "derivations",
}


@dataclass
class Workspace:
    """Named objects read from disk, sharing one value universe.

    File stems become object names, unique within each pool; the same stem
    may name, say, both a program and the outline that proves it.
    Everything is parsed, and therefore validated, at load time.
    """

    universe: tuple[Value, ...] = field(default_factory=value_universe)
    dists: dict[str, Dist] = field(default_factory=dict)
    rels: dict[str, Relation] = field(default_factory=dict)
    kernels: dict[str, MarkovKernel] = field(default_factory=dict)
    formulas: dict[str, Formula] = field(default_factory=dict)
    programs: dict[str, tuple[Command, VarSet]] = field(default_factory=dict)
    outlines: dict[str, OutlineNode] = field(default_factory=dict)
    derivations: dict[str, Derivation] = field(default_factory=dict)

    def _pool(self, suffix: str) -> dict:
        kind = _LOADERS.get(suffix)
        if kind is None:
            raise ValidationError(f"no format with suffix {suffix!r}")
        return getattr(self, kind)

    def load(self, path: str | Path) -> str:
        """Parse one file chosen by suffix; returns the new object's name."""
        path = Path(path)
        pool = self._pool(path.suffix)
        name = path.stem
        if name in pool:
            raise ValidationError(
                f"name {name!r} is already loaded for this kind")
        text = path.read_text()
        if path.suffix == ".dist":
            pool[name] = parse_dist(text, self.universe)
        elif path.suffix == ".rel":
            pool[name] = parse_rel(text)
        elif path.suffix == ".kern":
            pool[name] = parse_kernel(text, self.universe)
        elif path.suffix == ".dibi":
            pool[name] = parse_formula(text)
        elif path.suffix == ".prog":
            pool[name] = parse_program_with_vars(text)
        elif path.suffix == ".outline":
            pool[name] = parse_outline(text)
        else:
            pool[name] = parse_derivation(text)
        return name
