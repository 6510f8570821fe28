"""Distributions, the probability monad, and Markov kernel algebra."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dibi.memory import DomainError, enumerate_memories, memory, project
from dibi.prob import (
    ZERO_MASS,
    Dist,
    MarkovKernel,
    Undefined,
    condition,
    convex,
    disintegrate,
    dist,
    dist_bind,
    dist_unit,
    kernel_from_fn,
    kernel_marginal,
    kernel_unit,
    lift,
    marginal,
    par,
    preceq,
    product,
    seq,
)

from .data import (
    SWITCHED_PAIR_GIVEN_OFF,
    SWITCHED_PAIR_GIVEN_ON,
    X_MARGINAL,
    XY_BOTH_HEADS,
    Z_MARGINAL,
    coin_given_switch,
    fair_dist,
    mem,
    or_program_dist,
    switched_pair_dist,
    switched_pair_kernel,
)

F = Fraction


# ------------------------------------------------------------- construction

def test_dist_must_sum_to_one():
    with pytest.raises(ValueError):
        Dist(frozenset({"x"}), ((mem(x=0), F(1, 2)),))


def test_dist_rejects_nonpositive_entries():
    with pytest.raises(ValueError):
        Dist(frozenset({"x"}), ((mem(x=0), F(3, 2)), (mem(x=1), F(-1, 2))))


def test_dist_builder_drops_zero_weights():
    mu = dist({mem(x=0): F(1), mem(x=1): F(0)})
    assert mu.support == (mem(x=0),)
    assert mu == dist_unit(mem(x=0))


def test_dist_rows_must_share_domain():
    with pytest.raises(ValueError):
        dist({mem(x=0): F(1, 2), mem(y=1): F(1, 2)})


def test_mass_of_absent_memory_is_zero():
    mu = fair_dist("x")
    assert mu.mass(mem(x=0)) == F(1, 2)
    assert mu.mass(mem(x=1)) == F(1, 2)


# ------------------------------------------------------------- monad laws

def weights(vars):
    """Distributions over the given variables with small rational weights."""
    ms = enumerate_memories(frozenset(vars))
    return (
        st.lists(st.integers(min_value=0, max_value=4), min_size=len(ms), max_size=len(ms))
        .filter(lambda ws: sum(ws) > 0)
        .map(lambda ws: dist(
            {m: F(w, sum(ws)) for m, w in zip(ms, ws)},
            dom=frozenset(vars),
        ))
    )


def tables(dom_vars, rng_vars):
    """Memory-indexed distribution families, as bind continuations."""
    ms = enumerate_memories(frozenset(dom_vars))
    return st.tuples(*(weights(rng_vars) for _ in ms)).map(
        lambda ds: lambda m: ds[ms.index(m)]
    )


@given(st.sampled_from(list(enumerate_memories(frozenset({"a", "b"})))), tables({"a", "b"}, {"c"}))
def test_bind_left_identity(m, k):
    assert dist_bind(dist_unit(m), k) == k(m)


@given(weights({"a", "b"}))
def test_bind_right_identity(mu):
    assert dist_bind(mu, dist_unit) == mu


@settings(max_examples=25)
@given(weights({"a"}), tables({"a"}, {"b"}), tables({"b"}, {"c"}))
def test_bind_associativity(mu, k1, k2):
    lhs = dist_bind(dist_bind(mu, k1), k2)
    rhs = dist_bind(mu, lambda m: dist_bind(k1(m), k2))
    assert lhs == rhs


def test_bind_rejects_mismatched_output_domains():
    mu = fair_dist("x")

    def k(m):
        return dist_unit(mem(y=0)) if m.value("x") == 0 else dist_unit(mem(z=0))

    with pytest.raises(DomainError):
        dist_bind(mu, k)


# ----------------------------------------------- marginals and conditioning

def test_switch_marginal_is_fair():
    mu = marginal(switched_pair_dist(), {"z"})
    assert {m.value("z"): p for m, p in mu.entries} == Z_MARGINAL


def test_coin_marginal_is_biased():
    mu = marginal(switched_pair_dist(), {"x"})
    assert {m.value("x"): p for m, p in mu.entries} == X_MARGINAL


def test_coins_are_marginally_correlated():
    mu = marginal(switched_pair_dist(), {"x", "y"})
    assert mu.mass(mem(x=1, y=1)) == XY_BOTH_HEADS
    assert XY_BOTH_HEADS != X_MARGINAL[1] * X_MARGINAL[1]


def test_conditioning_on_switch_values():
    mu = switched_pair_dist()
    off = condition(mu, lambda m: m.value("z") == 0)
    on = condition(mu, lambda m: m.value("z") == 1)
    off_xy = marginal(off, {"x", "y"})
    on_xy = marginal(on, {"x", "y"})
    assert {(m.value("x"), m.value("y")): p for m, p in off_xy.entries} == SWITCHED_PAIR_GIVEN_OFF
    assert {(m.value("x"), m.value("y")): p for m, p in on_xy.entries} == SWITCHED_PAIR_GIVEN_ON


def test_conditioning_on_impossible_event_reports_zero_mass():
    mu = or_program_dist()
    assert condition(mu, lambda m: m.value("x") == 1 and m.value("z") == 0) is ZERO_MASS


@given(weights({"a", "b"}))
def test_event_decomposition_inverts_conditioning(mu):
    e = lambda m: m.value("a") == 1
    p = sum((q for m, q in mu.entries if e(m)), F(0))
    pos = condition(mu, e)
    neg = condition(mu, lambda m: not e(m))
    if p == 0:
        assert convex(p, dist_unit(mem(a=0, b=0)), neg) == mu
    elif p == 1:
        assert convex(p, pos, dist_unit(mem(a=0, b=0))) == mu
    else:
        assert convex(p, pos, neg) == mu


def test_convex_is_lazy_at_endpoints():
    mu = fair_dist("x")
    clash = fair_dist("y")
    # mismatched domains are tolerated in the branch that gets weight zero
    assert convex(F(1), mu, clash) == mu
    assert convex(F(0), clash, mu) == mu
    with pytest.raises(DomainError):
        convex(F(1, 2), mu, clash)


def test_product_multiplies_masses():
    mu = product(fair_dist("x"), fair_dist("y"))
    assert mu.mass(mem(x=0, y=1)) == F(1, 4)
    with pytest.raises(DomainError):
        product(fair_dist("x"), fair_dist("x"))


def test_or_program_table_is_mixture_of_its_conditionals():
    mu = or_program_dist()
    assert marginal(mu, {"x"}) == fair_dist("x")
    assert marginal(mu, {"y"}) == fair_dist("y")
    assert mu.mass(mem(x=0, y=0, z=0)) == F(1, 4)
    assert mu.mass(mem(x=0, y=0, z=1)) == F(0)


# ------------------------------------------------------------- kernel basics

def test_kernel_construction_requires_input_preservation():
    def forgetful(m):
        return dist_unit(mem(x=0, y=0))

    with pytest.raises(ValueError):
        kernel_from_fn({"x"}, {"x", "y"}, forgetful)


def test_kernel_rows_may_be_partial_but_not_duplicated_or_empty():
    row = (mem(x=0), dist_unit(mem(x=0)))
    partial = MarkovKernel(frozenset({"x"}), frozenset({"x"}), (row,))
    assert partial.row(mem(x=0)) == dist_unit(mem(x=0))
    assert partial.row(mem(x=1)) is None
    with pytest.raises(ValueError):
        MarkovKernel(frozenset({"x"}), frozenset({"x"}), (row, row))
    with pytest.raises(ValueError):
        MarkovKernel(frozenset({"x"}), frozenset({"x"}), ())
    stray = (mem(y=0), dist_unit(mem(y=0)))
    with pytest.raises(ValueError):
        MarkovKernel(frozenset({"x"}), frozenset({"x"}), (stray,))


def test_kernel_call_outside_domain():
    k = kernel_unit({"x"})
    with pytest.raises(DomainError):
        k(mem(y=0))


def test_lift_and_unit_shapes():
    f = switched_pair_kernel()
    assert f.dom == frozenset()
    assert f.rng == frozenset({"x", "y", "z"})
    u = kernel_unit({"a"})
    assert u(mem(a=1)) == dist_unit(mem(a=1))


def test_kernel_marginal_of_parallel_pair_recovers_factor():
    kx = coin_given_switch("x")
    ky = coin_given_switch("y")
    both = par(kx, ky)
    assert isinstance(both, MarkovKernel)
    assert kernel_marginal(both, {"x", "z"}) == kx
    assert kernel_marginal(both, {"y", "z"}) == ky


def test_kernel_marginal_domain_guard():
    kx = coin_given_switch("x")
    with pytest.raises(DomainError):
        kernel_marginal(kx, {"x"})


# ------------------------------------------------------ parallel composition

def test_par_requires_matching_overlap():
    kx = coin_given_switch("x")
    ky = coin_given_switch("y")
    assert isinstance(par(kx, ky), MarkovKernel)
    # ranges overlap on {x, z} but domains only on {z}
    assert isinstance(par(kx, kx), Undefined)


def test_par_is_commutative_here():
    kx = coin_given_switch("x")
    ky = coin_given_switch("y")
    assert par(kx, ky) == par(ky, kx)


def test_par_of_lifted_factors_is_lifted_product():
    f = par(lift(fair_dist("x")), lift(fair_dist("y")))
    assert f == lift(product(fair_dist("x"), fair_dist("y")))


def test_par_with_unit_pads_without_changing_behaviour():
    kx = coin_given_switch("x")
    padded = par(kx, kernel_unit({"z"}))
    assert padded == kx
    assert par(kx, kernel_unit(set())) == kx


# ---------------------------------------------------- sequential composition

def test_seq_requires_interface_match():
    kx = coin_given_switch("x")
    assert isinstance(seq(kx, kx), Undefined)
    assert seq(kx, kernel_unit({"x", "z"})) == kx


def test_switch_then_coins_rebuilds_the_joint():
    both = par(coin_given_switch("x"), coin_given_switch("y"))
    assert seq(lift(fair_dist("z")), both) == switched_pair_kernel()


def test_fair_coins_then_disjunction_rebuilds_or_table():
    coins = par(lift(fair_dist("x")), lift(fair_dist("y")))

    def store_or(m):
        return dist_unit(mem(x=m.value("x"), y=m.value("y"),
                             z=m.value("x") | m.value("y")))

    f_z = kernel_from_fn({"x", "y"}, {"x", "y", "z"}, store_or)
    assert seq(coins, f_z) == lift(or_program_dist())


# ------------------------------------------------------------------ ordering

def test_preceq_is_reflexive():
    for f in (switched_pair_kernel(), coin_given_switch("x"), kernel_unit({"a"})):
        assert preceq(f, f)


def test_marginal_lift_sits_below_joint_lift():
    f = switched_pair_kernel()
    assert preceq(lift(marginal(switched_pair_dist(), {"x"})), f)
    assert preceq(lift(marginal(switched_pair_dist(), {"x", "y"})), f)


def test_conditional_coin_is_not_below_the_lifted_joint():
    # domains must be contained: a kernel that consumes z cannot sit below a
    # state that consumes nothing
    assert not preceq(coin_given_switch("x"), switched_pair_kernel())


def test_conditional_coin_sits_below_the_conditional_factor():
    f = switched_pair_kernel()
    _, k = disintegrate(f, {"z"})
    assert preceq(coin_given_switch("x"), k)
    assert preceq(coin_given_switch("y"), k)
    assert kernel_marginal(f, {"x", "z"}) == seq(lift(fair_dist("z")), coin_given_switch("x"))


def test_preceq_rejects_wrong_conditional():
    f = switched_pair_kernel()
    _, k = disintegrate(f, {"z"})
    fixed = kernel_from_fn({"z"}, {"x", "z"}, lambda m: dist({
        mem(z=m.value("z"), x=1): F(3, 4),
        mem(z=m.value("z"), x=0): F(1, 4),
    }))
    assert not preceq(fixed, k)


def test_preceq_is_transitive_on_a_chain():
    f = switched_pair_kernel()
    _, k = disintegrate(f, {"z"})
    kx = coin_given_switch("x")
    kxz = kernel_marginal(kx, {"z"})
    assert preceq(kxz, kx) and preceq(kx, k)
    assert preceq(kxz, k)


def test_subkernels_with_equal_interfaces_are_equal():
    # below a fixed state, the (dom, rng) pair determines the subkernel
    f = switched_pair_kernel()
    _, k = disintegrate(f, {"z"})
    kx = coin_given_switch("x")
    assert preceq(kx, k)
    assert kernel_marginal(k, {"x", "z"}) == kx


# ------------------------------------------------------------ disintegration

def test_disintegration_law():
    f = switched_pair_kernel()
    for R1 in ({"z"}, {"x", "y"}, {"x", "y", "z"}, set()):
        f1, g = disintegrate(f, R1)
        assert f1 == kernel_marginal(f, R1)
        assert seq(f1, g) == f


def test_disintegration_on_zero_mass_fiber_leaves_no_row():
    mu = dist_unit(mem(x=0, y=0))
    _, g = disintegrate(lift(mu), {"x"})
    assert g(mem(x=0)) == dist_unit(mem(x=0, y=0))
    assert g.row(mem(x=1)) is None
    with pytest.raises(DomainError):
        g(mem(x=1))


def test_disintegration_domain_guard():
    kx = coin_given_switch("x")
    with pytest.raises(DomainError):
        disintegrate(kx, {"x"})


@settings(max_examples=30)
@given(weights({"a", "b", "c"}), st.sets(st.sampled_from(["a", "b", "c"])))
def test_disintegration_law_on_random_joints(mu, R1):
    f = lift(mu)
    f1, g = disintegrate(f, R1)
    assert seq(f1, g) == f


# ----------------------------------------------------- algebraic interaction

def test_padding_then_sequencing_recovers_parallel():
    # f + g over disjoint extensions equals padded f composed with padded g
    kx = coin_given_switch("x")
    ky = coin_given_switch("y")
    both = par(kx, ky)
    padded_x = par(kx, kernel_unit({"z"}))
    step2 = par(kernel_unit({"x", "z"}), ky)
    assert isinstance(step2, MarkovKernel)
    assert seq(padded_x, step2) == both


def test_exchange_on_lifted_blocks():
    # (f1 ; f2) + (g1 ; g2) == (f1 + g1) ; (f2 + g2) when both sides exist
    f1, f2 = lift(fair_dist("x")), kernel_unit({"x"})
    g1, g2 = lift(fair_dist("y")), kernel_unit({"y"})
    left = par(seq(f1, f2), seq(g1, g2))
    right = seq(par(f1, g1), par(f2, g2))
    assert left == right
    assert par(lift(fair_dist("x")), lift(fair_dist("y"))) == right
