"""Command-line front end.

Every subcommand reads files in the formats of the io module and prints a
short, deterministic report.  Exit status 0 means the checked property holds
or the object was accepted, 1 that it fails or was rejected, and 2 that the
input could not be used at all.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .dep import CITriple, ci_oracle, ci_via_formula, jd_oracle, jd_via_formula, random_dist
from .formulas import fv, parse_formula, print_formula
from .frames import run_suite
from .io import (
    ParseError,
    ValidationError,
    _show_triple,
    parse_derivation,
    parse_dist,
    parse_kernel,
    parse_outline,
    parse_program_with_vars,
    parse_rel,
    print_dist,
    value_universe,
)
from .memory import Value, enumerate_memories
from .prob import ZERO_MASS, DomainError, condition, dist, lift, marginal
from .programs import OutlineMismatch, cmd_vars, denote, validate_outline, validate_triple_semantically
from .proof import RuleMismatch, check_derivation, show_sequent
from .semantics import UnsupportedConnective, sat

__all__ = ["cli_main"]


def _read(path: str) -> str:
    return Path(path).read_text()


def _comma_vars(s: str | None) -> frozenset[str]:
    if s is None:
        return frozenset()
    return frozenset(p.strip() for p in s.split(",") if p.strip())


def _verdict(b: bool) -> str:
    return "holds" if b else "fails"


def _cmd_check_sat(args) -> int:
    universe = value_universe()
    path = Path(args.state)
    if path.suffix == ".dist":
        state = lift(parse_dist(path.read_text(), universe))
    elif path.suffix == ".kern":
        state = parse_kernel(path.read_text(), universe)
    else:
        raise ValidationError(
            f"check-sat reads .dist or .kern states, not {path.suffix!r}")
    if args.formula.endswith(".dibi"):
        P = parse_formula(_read(args.formula))
    else:
        P = parse_formula(args.formula)
    ok = sat(state, P)
    print(f"state: {path.name}")
    print(f"formula: {print_formula(P)}")
    print(f"satisfied: {'yes' if ok else 'no'}")
    return 0 if ok else 1


def _cmd_check_ci(args) -> int:
    mu = parse_dist(_read(args.dist), value_universe())
    t = CITriple(_comma_vars(args.x), _comma_vars(args.y), _comma_vars(args.z))
    ci = ci_oracle(mu, t)
    res = ci_via_formula(mu, t)
    print(f"CI {_verdict(ci)}; formula {_verdict(res.formula_holds)}; "
          f"side condition {_verdict(res.side_condition)}")
    if res.formula_holds != (ci and res.side_condition):
        print("warning: formula route disagrees with the oracle route")
        return 1
    return 0 if ci and res.formula_holds and res.side_condition else 1


def _cmd_check_jd(args) -> int:
    R = parse_rel(_read(args.rel))
    X, Y = _comma_vars(args.x), _comma_vars(args.y)
    jd = jd_oracle(R, X, Y)
    via = jd_via_formula(R, X, Y)
    print(f"JD {_verdict(jd)}; formula {_verdict(via)}")
    if jd != via:
        print("warning: formula route disagrees with the oracle route")
        return 1
    return 0 if jd else 1


def _cmd_check_proof(args) -> int:
    d = parse_derivation(_read(args.proof))
    try:
        check_derivation(d)
    except RuleMismatch as exc:
        print(f"rejected: {exc}")
        return 1
    print("accepted")
    print(f"conclusion: {show_sequent(d.conclusion)}")
    return 0


def _cmd_verify_program(args) -> int:
    o = parse_outline(_read(args.outline))
    universe = value_universe()
    try:
        validate_outline(o, universe)
    except OutlineMismatch as exc:
        print(f"rejected: {exc}")
        return 1
    print("accepted")
    print(f"conclusion: {_show_triple(o.triple)}")
    if args.semantic_trials:
        if args.seed is None:
            raise ValidationError("--semantic-trials needs --seed")
        t = o.triple
        pool = cmd_vars(t.cmd) | fv(t.pre) | fv(t.post)
        inputs = [random_dist(pool, args.seed + i, universe)
                  for i in range(args.semantic_trials)]
        if not validate_triple_semantically(t, inputs):
            print("semantic check failed")
            return 1
        print(f"semantic check: {args.semantic_trials} random inputs agree")
    return 0


def _cmd_axiom_fuzz(args) -> int:
    report = run_suite(args.model, args.trials, args.seed)
    width = max(len(c.name) for c in report.checks)
    for c in report.checks:
        status = "ok" if c.ok else f"{c.violations} violation(s)"
        print(f"{c.name:<{width}}  {c.trials} trials  {status}")
        for ex in c.examples:
            print(f"    example: {ex}")
    verdict = "all checks passed" if report.ok else "FAILED"
    print(f"frame suite ({report.model}, seed {report.seed}): {verdict}")
    return 0 if report.ok else 1


def _parse_pin(spec: str) -> dict[str, Value]:
    pins: dict[str, Value] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        var, eq, val = part.partition("=")
        var, val = var.strip(), val.strip()
        if not eq or not var or not val:
            raise ValidationError(f"conditions look like 'z=0', not {part!r}")
        if var in pins:
            raise ValidationError(f"condition pins {var!r} twice")
        pins[var] = int(val) if val.isdigit() else val
    if not pins:
        raise ValidationError("empty condition")
    return pins


def _cmd_run_program(args) -> int:
    cmd, declared = parse_program_with_vars(_read(args.prog))
    universe = value_universe()
    mems = enumerate_memories(declared, universe)
    mu0 = dist({m: Fraction(1, len(mems)) for m in mems},
               universe=universe, dom=declared)
    out = denote(cmd, mu0)
    if args.condition:
        pins = _parse_pin(args.condition)
        if not set(pins) <= declared:
            raise ValidationError(
                f"condition mentions undeclared {sorted(set(pins) - declared)}")
        conditioned = condition(
            out, lambda m: all(m.value(x) == v for x, v in pins.items()))
        if conditioned is ZERO_MASS:
            print("condition has zero mass")
            return 1
        out = conditioned
    if args.marginal:
        V = _comma_vars(args.marginal)
        if not V <= out.dom:
            raise ValidationError(
                f"marginal mentions undeclared {sorted(V - out.dom)}")
        out = marginal(out, V)
    sys.stdout.write(print_dist(out))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dibi",
        description="Check dependence and independence properties of "
                    "distributions, relations, programs, and proofs.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("check-sat",
                       help="does a .dist or .kern state satisfy a formula")
    q.add_argument("state", help="a .dist or .kern file")
    q.add_argument("formula", help="a .dibi file, or the formula itself")
    q.set_defaults(fn=_cmd_check_sat)

    q = sub.add_parser("check-ci",
                       help="conditional independence in a distribution, "
                            "by oracle and by formula")
    q.add_argument("dist", help="a .dist file")
    q.add_argument("--x", required=True, help="comma-separated variables")
    q.add_argument("--y", required=True, help="comma-separated variables")
    q.add_argument("--z", default=None, help="conditioning variables")
    q.set_defaults(fn=_cmd_check_ci)

    q = sub.add_parser("check-jd",
                       help="join dependence in a relation, by oracle and "
                            "by formula")
    q.add_argument("rel", help="a .rel file")
    q.add_argument("--x", required=True, help="comma-separated attributes")
    q.add_argument("--y", required=True, help="comma-separated attributes")
    q.set_defaults(fn=_cmd_check_jd)

    q = sub.add_parser("check-proof", help="check a .proof derivation tree")
    q.add_argument("proof", help="a .proof file")
    q.set_defaults(fn=_cmd_check_proof)

    q = sub.add_parser("verify-program",
                       help="check a .outline program proof, optionally "
                            "cross-validating against the semantics")
    q.add_argument("outline", help="a .outline file")
    q.add_argument("--semantic-trials", type=int, default=0, metavar="N",
                   help="also test the triple on N random input states")
    q.add_argument("--seed", type=int, default=None, metavar="K")
    q.set_defaults(fn=_cmd_verify_program)

    q = sub.add_parser("axiom-fuzz",
                       help="run the frame-condition suite on random kernels")
    q.add_argument("--model", required=True, choices=("prob", "rel"))
    q.add_argument("--trials", required=True, type=int, metavar="N")
    q.add_argument("--seed", required=True, type=int, metavar="K")
    q.set_defaults(fn=_cmd_axiom_fuzz)

    q = sub.add_parser("run-program",
                       help="run a .prog file from uniform inputs and print "
                            "the output distribution")
    q.add_argument("prog", help="a .prog file")
    q.add_argument("--condition", default=None, metavar="PINS",
                   help="condition the output, e.g. 'z=0' or 'x=1,y=0'")
    q.add_argument("--marginal", default=None, metavar="VARS",
                   help="project the output onto these variables")
    q.set_defaults(fn=_cmd_run_program)

    return p


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.fn(args)
    except (ParseError, ValidationError, OSError, DomainError,
            UnsupportedConnective, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
