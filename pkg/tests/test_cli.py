"""Tests for the file formats, the workspace, and the command line.

Every parser is exercised as the inverse of its printer, the shipped fixture
files are pinned to the objects they should denote, and the subcommands are
driven end to end through cli_main.
"""

from fractions import Fraction as F
from pathlib import Path

import pytest

from dibi.cli import cli_main
from dibi.dep import random_dist, random_relation, random_table_kernel
from dibi.formulas import parse_formula, print_formula
from dibi.io import (
    ParseError,
    ValidationError,
    Workspace,
    parse_derivation,
    parse_dist,
    parse_kernel,
    parse_outline,
    parse_program,
    parse_program_with_vars,
    parse_rel,
    print_command,
    print_derivation,
    print_dist,
    print_kernel,
    print_outline,
    print_program,
    print_rel,
    value_universe,
)
from dibi.kernels import k_disintegrate
from dibi.memory import BOOL_UNIVERSE, memory
from dibi.prob import dist, lift
from dibi.programs import (
    cmd_vars,
    common_cause_program,
    cond_samples_program,
    golden_outlines,
    random_command,
    simple_program,
    validate_outline,
)
from dibi.proof import check_derivation, golden_proofs, mutations
from dibi.rel import Relation

from .data import mem, pub_relation, switched_pair_dist, switched_pair_kernel

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


# ---------------------------------------------------------------------------
# Round trips: parse is the inverse of print for every object kind


def test_dist_round_trips_over_random_instances():
    for seed in range(40):
        pools = [("x",), ("x", "y"), ("x", "y", "z"), ()]
        mu = random_dist(pools[seed % 4], seed)
        assert parse_dist(print_dist(mu)) == mu


def test_dist_round_trips_over_string_universes():
    u = ("no", "yes")
    mu = dist({memory({"a": "no", "b": "yes"}): F(1, 3),
               memory({"a": "yes", "b": "yes"}): F(2, 3)}, universe=u)
    assert parse_dist(print_dist(mu), u) == mu


def test_rel_round_trips_over_random_instances():
    for seed in range(40):
        R = random_relation(("u", "v", "w"), seed)
        assert parse_rel(print_rel(R), R.universe) == R


def test_rel_round_trip_infers_the_observed_universe():
    R = pub_relation()
    assert parse_rel(print_rel(R)) == R


def test_kernel_round_trips_including_partial_kernels():
    for seed in range(20):
        f = random_table_kernel(("z",), ("x", "y"), seed)
        assert parse_kernel(print_kernel(f)) == f
    mu = switched_pair_dist()
    f1, g = k_disintegrate(lift(mu), frozenset({"z"}))
    for k in (lift(mu), f1, g):
        assert parse_kernel(print_kernel(k)) == k


def test_program_round_trips_over_random_commands():
    pool = ("a", "b", "c")
    for seed in range(60):
        c = random_command(pool, seed, size=6)
        text = print_program(c, pool)
        c2, declared = parse_program_with_vars(text)
        assert c2 == c
        assert declared == frozenset(pool)


def test_command_round_trips_preserve_right_nested_sequencing():
    from dibi.exprs import ETrue
    from dibi.programs import Assn, Seq

    c = Seq(Assn("a", ETrue()), Seq(Assn("b", ETrue()), Assn("c", ETrue())))
    assert parse_program(print_program(c, "abc")) == c


def test_derivation_round_trips_over_goldens_and_their_mutations():
    for name, d in golden_proofs().items():
        assert parse_derivation(print_derivation(d)) == d
        for bad in mutations(d, seed=11, count=10):
            assert parse_derivation(print_derivation(bad)) == bad


def test_outline_round_trips_over_goldens():
    for p, q in ((F(3, 4), F(1, 2)), (F(1), F(0))):
        for name, o in golden_outlines(p, q).items():
            assert parse_outline(print_outline(o)) == o


def test_formula_file_comments_are_ignored():
    text = "# the independence shape\n<0 : T |> [z]> ; (<z : T |> [x]> * <z : T |> [y]>)\n"
    P = parse_formula(text)
    assert parse_formula(print_formula(P)) == P


# ---------------------------------------------------------------------------
# Format validation


def test_dist_that_does_not_sum_to_one_is_rejected_with_a_line():
    text = FIXTURES.joinpath("fig4b.dist").read_text().replace("9/32", "8/32")
    with pytest.raises(ValidationError, match=r"31/32.*line"):
        parse_dist(text)


def test_dist_row_validation():
    with pytest.raises(ValidationError, match="assign exactly"):
        parse_dist("vars: x y\nx=0 : 1\n")
    with pytest.raises(ValidationError, match="duplicate row"):
        parse_dist("vars: x\nx=0 : 1/2\nx=0 : 1/2\n")
    with pytest.raises(ValidationError, match="outside the universe"):
        parse_dist("vars: x\nx=7 : 1\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_dist("vars: x\nx=0 1\n")


def test_rel_rows_must_match_the_header_arity():
    with pytest.raises(ValidationError, match="2 values for 3"):
        parse_rel("attrs: a b c\n0 1\n")


def test_kernel_blocks_are_validated():
    good = ("dom: z\nrange: x z\n"
            "given z=0:\nx=0 z=0 : 1/2\nx=1 z=0 : 1/2\n")
    f = parse_kernel(good)
    assert f.dom == frozenset({"z"}) and f.row(mem(z=1)) is None
    with pytest.raises(ValidationError, match="duplicate block"):
        parse_kernel(good + "given z=0:\nx=0 z=0 : 1\n")
    with pytest.raises(ValidationError, match="sum to 1/2"):
        parse_kernel("dom: z\nrange: x z\ngiven z=0:\nx=0 z=0 : 1/2\n")
    with pytest.raises(ParseError, match="before any 'given'"):
        parse_kernel("dom: z\nrange: x z\nx=0 z=0 : 1\n")


def test_program_validation_catches_undeclared_variables():
    with pytest.raises(ValidationError, match="not declared"):
        parse_program("vars x;\ny := tt")
    with pytest.raises(ValidationError, match="undeclared"):
        parse_program("vars x;\nx := y")
    with pytest.raises(ValidationError, match="bias"):
        parse_program("vars x;\nx <$ bern(3/2)")
    with pytest.raises(ParseError, match="declared twice"):
        parse_program("vars x x;\nskip")


def test_derivation_files_reject_unknown_rules_but_not_bad_arity():
    from dibi.proof import RuleMismatch

    with pytest.raises(ParseError, match="unknown rule"):
        parse_derivation('(Frobnicate "T |- T")')
    # a premise-count mismatch still parses; the checker rejects it
    d = parse_derivation('(And-R "T |- T & T")')
    with pytest.raises(RuleMismatch, match="premises"):
        check_derivation(d)


def test_outline_files_reject_malformed_nodes():
    with pytest.raises(ParseError, match="unknown outline node"):
        parse_outline('(Loop "{T} skip {T}")')
    with pytest.raises(ParseError, match="unknown axiom step"):
        parse_outline('(Weak axioms [Abracadabra] (Skip "{T} skip {T}") "{T} skip {T}")')
    with pytest.raises(ParseError, match="takes 2 subproofs"):
        parse_outline('(Seqn (Skip "{T} skip {T}") "{T} skip {T}")')
    with pytest.raises(ParseError, match="triple"):
        parse_outline('(Skip "no braces here")')


# ---------------------------------------------------------------------------
# The workspace


def test_workspace_loads_every_fixture_kind(tmp_path):
    ws = Workspace()
    names = sorted(ws.load(p) for p in FIXTURES.iterdir())
    assert ws.dists["fig4b"] == switched_pair_dist()
    assert ws.rels["fig5"] == pub_relation()
    assert ws.programs["fig4a"] == (cond_samples_program(F(3, 4), F(1, 2)),
                                    frozenset({"x", "y", "z"}))
    assert ws.programs["simple"][0] == simple_program()
    assert ws.programs["common-cause"][0] == common_cause_program()
    assert set(ws.outlines) == {"simple", "common-cause", "cond-samples"}
    assert set(ws.derivations) == {"sep2dep", "cut", "graphoid-symmetry",
                                   "graphoid-decomposition"}
    assert len(names) == 12
    kern = tmp_path / "pair.kern"
    kern.write_text(print_kernel(switched_pair_kernel()))
    ws.load(kern)
    assert ws.kernels["pair"] == switched_pair_kernel()


def test_workspace_names_are_unique_within_a_pool(tmp_path):
    ws = Workspace()
    ws.load(FIXTURES / "fig4b.dist")
    clash = tmp_path / "fig4b.dist"
    clash.write_text("vars: x\nx=0 : 1\n")
    with pytest.raises(ValidationError, match="already loaded"):
        ws.load(clash)
    # the same stem is fine for a different kind
    other = tmp_path / "fig4b.prog"
    other.write_text("vars x;\nskip\n")
    ws.load(other)
    with pytest.raises(ValidationError, match="suffix"):
        ws.load(tmp_path / "notes.txt")


def test_workspace_universe_follows_the_environment(monkeypatch):
    monkeypatch.setenv("DIBI_VALUE_UNIVERSE", "0, 1, 2")
    assert value_universe() == (0, 1, 2)
    mu = parse_dist("vars: x\nx=0 : 1/2\nx=2 : 1/2\n")
    assert mu.universe == (0, 1, 2)
    monkeypatch.setenv("DIBI_VALUE_UNIVERSE", "lo,hi")
    assert value_universe() == ("lo", "hi")
    monkeypatch.delenv("DIBI_VALUE_UNIVERSE")
    assert value_universe() == BOOL_UNIVERSE


# ---------------------------------------------------------------------------
# Subcommands, end to end


def run_cli(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


FIG4B_TEXT = """\
vars: x y z
x=0 y=0 z=0 : 1/8
x=0 y=0 z=1 : 1/32
x=0 y=1 z=0 : 1/8
x=0 y=1 z=1 : 3/32
x=1 y=0 z=0 : 1/8
x=1 y=0 z=1 : 3/32
x=1 y=1 z=0 : 1/8
x=1 y=1 z=1 : 9/32
"""


def test_run_program_reproduces_the_switched_pair_table(capsys):
    code, out, _ = run_cli(capsys, "run-program", str(FIXTURES / "fig4a.prog"))
    assert code == 0
    assert out == FIG4B_TEXT


def test_run_program_conditioning_and_marginals(capsys):
    code, out, _ = run_cli(capsys, "run-program", str(FIXTURES / "fig4a.prog"),
                           "--condition", "z=0", "--marginal", "x,y")
    assert code == 0
    assert out == ("vars: x y\n"
                   "x=0 y=0 : 1/4\nx=0 y=1 : 1/4\n"
                   "x=1 y=0 : 1/4\nx=1 y=1 : 1/4\n")
    code, out, _ = run_cli(capsys, "run-program", str(FIXTURES / "fig4a.prog"),
                           "--condition", "z=1", "--marginal", "x")
    assert code == 0
    assert out == "vars: x\nx=0 : 1/4\nx=1 : 3/4\n"


def test_run_program_zero_mass_condition_fails(capsys, tmp_path):
    prog = tmp_path / "pinned.prog"
    prog.write_text("vars z;\nz := tt\n")
    code, out, _ = run_cli(capsys, "run-program", str(prog),
                           "--condition", "z=0")
    assert code == 1
    assert "zero mass" in out


def test_run_program_is_byte_deterministic(capsys):
    runs = {run_cli(capsys, "run-program", str(FIXTURES / "fig4a.prog"))
            for _ in range(2)}
    assert len(runs) == 1


def test_check_ci_reports_all_three_parts(capsys):
    fig4b = str(FIXTURES / "fig4b.dist")
    code, out, _ = run_cli(capsys, "check-ci", fig4b,
                           "--x", "x", "--y", "y", "--z", "z")
    assert code == 0
    assert out == "CI holds; formula holds; side condition holds\n"
    code, out, _ = run_cli(capsys, "check-ci", fig4b, "--x", "x", "--y", "y")
    assert code == 1
    assert out == "CI fails; formula fails; side condition holds\n"
    # overlapping components: fine when the overlap is conditioned on,
    # and triply rejected when it is not
    code, out, _ = run_cli(capsys, "check-ci", fig4b,
                           "--x", "x,z", "--y", "y,z", "--z", "z")
    assert code == 0
    assert out == "CI holds; formula holds; side condition holds\n"
    code, out, _ = run_cli(capsys, "check-ci", fig4b,
                           "--x", "x,z", "--y", "y,z")
    assert code == 1
    assert out == "CI fails; formula fails; side condition fails\n"


def test_check_ci_outside_the_domain_is_an_input_error(capsys):
    code, _, err = run_cli(capsys, "check-ci", str(FIXTURES / "fig4b.dist"),
                           "--x", "x", "--y", "w")
    assert code == 2
    assert err.startswith("error:")


def test_check_jd_reports_both_routes(capsys):
    fig5 = str(FIXTURES / "fig5.rel")
    code, out, _ = run_cli(capsys, "check-jd", fig5,
                           "--x", "Researcher,Field", "--y", "Conference,Field")
    assert code == 0
    assert out == "JD holds; formula holds\n"
    code, out, _ = run_cli(capsys, "check-jd", fig5,
                           "--x", "Researcher", "--y", "Conference,Field")
    assert code == 1
    assert out == "JD fails; formula fails\n"
    code, _, err = run_cli(capsys, "check-jd", fig5,
                           "--x", "Researcher", "--y", "Conference")
    assert code == 2
    assert err.startswith("error:")


def test_check_sat_on_distributions_and_kernels(capsys, tmp_path):
    fig4b = str(FIXTURES / "fig4b.dist")
    shape = "<0 : T |> [z]> ; (<z : T |> [x]> * <z : T |> [y]>)"
    code, out, _ = run_cli(capsys, "check-sat", fig4b, shape)
    assert code == 0
    assert out.endswith("satisfied: yes\n")
    code, out, _ = run_cli(capsys, "check-sat", fig4b,
                           "<0 : T |> [x]> * <0 : T |> [y]>")
    assert code == 1
    assert out.endswith("satisfied: no\n")

    # the conditional kernel {z} -> {x,y,z} splits into independent halves
    _, g = k_disintegrate(switched_pair_kernel(), frozenset({"z"}))
    kern = tmp_path / "cond.kern"
    kern.write_text(print_kernel(g))
    formula = tmp_path / "indep.dibi"
    formula.write_text("# the coins are independent given the switch\n"
                       "<z : T |> [x,z]> * <z : T |> [y,z]>\n")
    code, out, _ = run_cli(capsys, "check-sat", str(kern), str(formula))
    assert code == 0
    assert "satisfied: yes" in out


def test_check_proof_accepts_the_fixture_proofs(capsys):
    for name in ("sep2dep", "cut", "graphoid-symmetry",
                 "graphoid-decomposition"):
        code, out, _ = run_cli(capsys, "check-proof",
                               str(FIXTURES / f"{name}.proof"))
        assert code == 0, name
        assert out.startswith("accepted\n")


def test_check_proof_rejects_a_tampered_file(capsys, tmp_path):
    bad = mutations(golden_proofs()["sep2dep"], seed=5, count=1)[0]
    path = tmp_path / "tampered.proof"
    path.write_text(print_derivation(bad))
    code, out, _ = run_cli(capsys, "check-proof", str(path))
    assert code == 1
    assert out.startswith("rejected:")


def test_verify_program_accepts_the_fixture_outlines(capsys):
    for name in ("simple", "common-cause", "cond-samples"):
        code, out, _ = run_cli(capsys, "verify-program",
                               str(FIXTURES / f"{name}.outline"),
                               "--semantic-trials", "4", "--seed", "2")
        assert code == 0, name
        assert out.startswith("accepted\n")
        assert "4 random inputs agree" in out


def test_verify_program_rejects_a_tampered_outline(capsys, tmp_path):
    text = print_outline(golden_outlines()["simple"])
    tampered = text.replace("[x]> * <0 : T |> [y]", "[x]> * <0 : T |> [x]")
    assert tampered != text
    path = tmp_path / "tampered.outline"
    path.write_text(tampered)
    code, out, _ = run_cli(capsys, "verify-program", str(path))
    assert code == 1
    assert out.startswith("rejected:")


def test_verify_program_semantic_trials_need_a_seed(capsys):
    code, _, err = run_cli(capsys, "verify-program",
                           str(FIXTURES / "simple.outline"),
                           "--semantic-trials", "3")
    assert code == 2
    assert "seed" in err


def test_axiom_fuzz_runs_both_models_deterministically(capsys):
    outputs = set()
    for _ in range(2):
        code, out, _ = run_cli(capsys, "axiom-fuzz", "--model", "rel",
                               "--trials", "3", "--seed", "7")
        assert code == 0
        outputs.add(out)
    assert len(outputs) == 1
    assert "all checks passed" in out
    code, out, _ = run_cli(capsys, "axiom-fuzz", "--model", "prob",
                           "--trials", "2", "--seed", "7")
    assert code == 0


def test_axiom_fuzz_requires_a_seed(capsys):
    code, _, _ = run_cli(capsys, "axiom-fuzz", "--model", "rel",
                         "--trials", "3")
    assert code == 2


def test_unreadable_and_malformed_inputs_exit_2(capsys, tmp_path):
    code, _, err = run_cli(capsys, "check-proof", str(tmp_path / "nope.proof"))
    assert code == 2 and err.startswith("error:")
    short = tmp_path / "short.dist"
    short.write_text("vars: x\nx=0 : 31/32\n")
    code, _, err = run_cli(capsys, "check-ci", str(short), "--x", "x", "--y", "x")
    assert code == 2
    assert "31/32" in err


def test_environment_universe_reaches_run_program(capsys, monkeypatch,
                                                  tmp_path):
    monkeypatch.setenv("DIBI_VALUE_UNIVERSE", "0,1,2")
    prog = tmp_path / "coin.prog"
    prog.write_text("vars c;\nc <$ bern(1/3)\n")
    code, out, _ = run_cli(capsys, "run-program", str(prog))
    assert code == 0
    assert out == "vars: c\nc=0 : 2/3\nc=1 : 1/3\n"


def test_print_command_matches_the_program_surface_syntax():
    c = cond_samples_program(F(3, 4), F(1, 2))
    assert print_command(c) == (
        "z <$ bern(1/2) ; if z then { x <$ bern(3/4) ; y <$ bern(3/4) } "
        "else { x <$ bern(1/2) ; y <$ bern(1/2) }")


def test_fixture_outlines_match_the_golden_objects():
    for name, o in golden_outlines().items():
        text = (FIXTURES / f"{name}.outline").read_text()
        assert parse_outline(text) == o
        validate_outline(o)


def test_fixture_proofs_match_the_golden_objects():
    for name, d in golden_proofs().items():
        text = (FIXTURES / f"{name}.proof").read_text()
        assert parse_derivation(text) == d
