"""CI and JD decision procedures: oracles, formula routes, and their agreement."""

from fractions import Fraction

import pytest

from dibi.dep import (
    CITriple,
    GraphoidAxiom,
    ci_oracle,
    ci_via_formula,
    disjoint_triples,
    jd_oracle,
    jd_via_formula,
    random_ci_dist,
    random_dist,
    random_jd_relation,
    random_kernel,
    random_relation,
    random_table_kernel,
    semigraphoid_instance,
    subset_triples,
)
from dibi.memory import DomainError
from dibi.prob import MarkovKernel, dist, lift, marginal, product
from dibi.rel import PowersetKernel, Relation, natural_join, rel_lift, rel_project

from .data import fair_dist, mem, pub_relation, switched_pair_dist

XYZ = {"x", "y", "z"}


# ------------------------------------------------------------- ci oracle

def test_switched_pair_is_conditionally_independent():
    assert ci_oracle(switched_pair_dist(), CITriple({"x"}, {"y"}, {"z"}))


def test_switched_pair_is_unconditionally_dependent():
    mu = switched_pair_dist()
    assert not ci_oracle(mu, CITriple({"x"}, {"y"}, set()))
    # the unconditional marginals that break the product equation
    assert marginal(mu, {"x"}).mass(mem(x=1)) == Fraction(5, 8)
    assert marginal(mu, {"y"}).mass(mem(y=1)) == Fraction(5, 8)
    assert marginal(mu, {"x", "y"}).mass(mem(x=1, y=1)) == Fraction(13, 32)
    assert Fraction(13, 32) != Fraction(5, 8) * Fraction(5, 8)


def test_product_coins_are_independent():
    mu = product(fair_dist("x"), fair_dist("y"))
    assert ci_oracle(mu, CITriple({"x"}, {"y"}, set()))


def test_ci_oracle_rejects_foreign_variables():
    with pytest.raises(DomainError):
        ci_oracle(fair_dist("x"), CITriple({"x"}, {"w"}, set()))


def test_overlap_forces_determinism():
    coin = fair_dist("x")
    assert not ci_oracle(coin, CITriple({"x"}, {"x"}, set()))
    point = dist({mem(x=1): Fraction(1)})
    assert ci_oracle(point, CITriple({"x"}, {"x"}, set()))
    # copying z into x makes x self-independent given z
    copy = dist({mem(x=0, z=0): Fraction(1, 2),
                 mem(x=1, z=1): Fraction(1, 2)})
    assert ci_oracle(copy, CITriple({"x"}, {"x"}, {"z"}))
    assert not ci_oracle(copy, CITriple({"x"}, {"x"}, set()))


def test_determined_overlap_is_a_point_mass_given_z():
    # whenever the oracle accepts an overlapping triple, the shared block
    # must be determined by each conditioning value with positive mass
    found = 0
    for s in range(40):
        mu = random_dist(XYZ, seed=s)
        for t in [CITriple({"x", "y"}, {"y", "z"}, {"z"}),
                  CITriple({"x"}, {"x"}, {"z"}),
                  CITriple({"x", "z"}, {"x"}, set())]:
            if not ci_oracle(mu, t):
                continue
            found += 1
            shared = t.X & t.Y
            mz = marginal(mu, t.Z | shared)
            for z, _ in marginal(mu, t.Z).entries:
                fibers = [m for m, p in mz.entries
                          if all(m.value(v) == z.value(v) for v in t.Z)]
                assert len(fibers) == 1
    assert found > 0


# ------------------------------------------------------- ci formula route

def test_formula_route_on_the_switched_pair():
    mu = switched_pair_dist()
    r = ci_via_formula(mu, CITriple({"x"}, {"y"}, {"z"}))
    assert r.formula_holds and r.side_condition


def test_formula_route_rejects_overlap_outside_z():
    r = ci_via_formula(switched_pair_dist(), CITriple({"x"}, {"x"}, set()))
    assert not r.formula_holds and not r.side_condition


def test_routes_agree_on_seeded_distributions():
    triples = disjoint_triples(XYZ) + [
        (frozenset({"x"}), frozenset({"x"}), frozenset()),
        (frozenset({"x", "y"}), frozenset({"y", "z"}), frozenset({"z"})),
        (frozenset({"x"}), frozenset({"x", "y"}), frozenset({"x"})),
        (frozenset({"x", "z"}), frozenset({"y", "z"}), frozenset({"z"})),
    ]
    for s in range(25):
        mu = random_dist(XYZ, seed=s)
        for (X, Y, Z) in triples:
            t = CITriple(X, Y, Z)
            r = ci_via_formula(mu, t)
            assert r.formula_holds == (ci_oracle(mu, t) and X & Y <= Z), \
                f"seed {s} triple {sorted(X)},{sorted(Y)},{sorted(Z)}"


def test_constructive_ci_passes_both_routes():
    for s in range(15):
        mu = random_ci_dist({"x"}, {"y"}, {"z"}, seed=s)
        t = CITriple({"x"}, {"y"}, {"z"})
        assert ci_oracle(mu, t)
        assert ci_via_formula(mu, t).formula_holds


# -------------------------------------------------------------- jd routes

RF = frozenset({"Researcher", "Field"})
CF = frozenset({"Conference", "Field"})


def test_publication_relation_satisfies_the_join_dependency():
    R = pub_relation()
    assert jd_oracle(R, RF, CF)
    assert jd_oracle(R, CF, RF)
    assert jd_via_formula(R, RF, CF)
    assert jd_via_formula(R, CF, RF)


def test_researcher_only_split_loses_information():
    R = pub_relation()
    rejoined = natural_join(rel_project(R, {"Researcher"}),
                            rel_project(R, CF))
    assert len(R.rows) == 5 and len(rejoined.rows) == 6
    assert not jd_oracle(R, frozenset({"Researcher"}), CF)
    assert not jd_via_formula(R, frozenset({"Researcher"}), CF)


def test_jd_requires_covering_components():
    with pytest.raises(DomainError):
        jd_oracle(pub_relation(), {"Researcher"}, {"Conference"})
    with pytest.raises(DomainError):
        jd_via_formula(pub_relation(), {"Researcher"}, {"Conference"})


def test_jd_routes_agree_on_seeded_relations():
    abc = {"a", "b", "c"}
    splits = [(frozenset({"a", "b"}), frozenset({"b", "c"})),
              (frozenset({"a"}), frozenset({"b", "c"})),
              (frozenset({"a", "b"}), frozenset({"c"})),
              (frozenset({"a", "b", "c"}), frozenset({"c"}))]
    for s in range(60):
        R = random_relation(abc, seed=s)
        for X, Y in splits:
            assert jd_via_formula(R, X, Y) == jd_oracle(R, X, Y), \
                f"seed {s} split {sorted(X)}|{sorted(Y)}"


def test_constructive_jd_passes_both_routes():
    for s in range(15):
        R = random_jd_relation({"a", "b"}, {"b", "c"}, seed=s)
        assert jd_oracle(R, {"a", "b"}, {"b", "c"})
        assert jd_via_formula(R, {"a", "b"}, {"b", "c"})


# ---------------------------------------------------------- semi-graphoids

def test_symmetry_on_the_switched_pair():
    f = lift(switched_pair_dist())
    assert semigraphoid_instance(f, GraphoidAxiom.SYMMETRY,
                                 {"x"}, {"y"}, {"z"})


def test_weak_union_vacuous_when_antecedent_fails():
    f = lift(switched_pair_dist())
    # x and y are dependent with no conditioning, so the implication is vacuous
    assert semigraphoid_instance(f, GraphoidAxiom.WEAK_UNION,
                                 {"x"}, {"y"}, set(), set())


def test_contraction_exhaustive_on_the_switched_pair():
    f = lift(switched_pair_dist())
    vs = sorted(XYZ)
    # assign each variable to one of X, Y, Z, W, or none
    for bx in range(5):
        for by in range(5):
            for bz in range(5):
                sets = [set(), set(), set(), set()]
                for v, b in zip(vs, (bx, by, bz)):
                    if b < 4:
                        sets[b].add(v)
                X, Y, Z, W = sets
                assert semigraphoid_instance(
                    f, GraphoidAxiom.CONTRACTION, X, Y, Z, W)


def test_all_axioms_on_seeded_states_in_both_models():
    cases = [(random_kernel("prob", s), s) for s in range(8)]
    cases += [(random_kernel("rel", s), s) for s in range(8)]
    picks = [({"u"}, {"v"}, {"w"}, set()),
             ({"u"}, {"v", "w"}, set(), {"s"}),
             ({"u", "v"}, {"w"}, {"s"}, set())]
    for f, s in cases:
        for X, Y, Z, W in picks:
            for ax in GraphoidAxiom:
                assert semigraphoid_instance(f, ax, X, Y, Z, W), \
                    f"{ax.value} seed {s} on {sorted(X)},{sorted(Y)},{sorted(Z)},{sorted(W)}"


# -------------------------------------------------------------- generators

def test_random_dist_is_deterministic_and_normalized():
    a = random_dist({"x", "y"}, seed=1)
    b = random_dist({"x", "y"}, seed=1)
    assert a == b
    assert sum(p for _, p in a.entries) == 1
    assert random_dist({"x", "y"}, seed=2) != a
    denominators = {p.denominator for _, p in a.entries}
    assert all(d <= 4 * len(a.entries) for d in denominators)


def test_random_relation_is_deterministic_and_nonempty():
    a = random_relation({"a", "b"}, seed=3)
    assert a == random_relation({"a", "b"}, seed=3)
    assert a.rows


def test_random_kernels_pass_construction_invariants():
    for s in range(30):
        f = random_kernel("prob", seed=s)
        assert isinstance(f, MarkovKernel)
        g = random_kernel("rel", seed=s)
        assert isinstance(g, PowersetKernel)
    with pytest.raises(ValueError):
        random_kernel("quantum", seed=0)


def test_random_table_kernel_preserves_inputs():
    k = random_table_kernel({"x"}, {"y"}, seed=9)
    for m, mu in k.rows:
        assert marginal(mu, {"x"}).mass(m) == 1


def test_triple_enumerators():
    ts = subset_triples(XYZ)
    assert len(ts) == 512
    dts = disjoint_triples(XYZ)
    assert len(dts) == 64
    for X, Y, Z in dts:
        assert not (X & Y) and not (X & Z) and not (Y & Z)
    assert len(set(dts)) == 64
