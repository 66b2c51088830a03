from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from tpmc.cardinality import (
        min_rejections, multiplier_bound, penalized, solve_cc, sweep_cardinality)
from tpmc.enumeration import optimal_support, solve_exact
from tpmc.instance import (
        AT_LEAST, AT_MOST, EXACTLY, SENSES, CardinalitySense, PreconditionError, TpmcInstance,
        check_feasible, random_instance, split_supplies)
from tpmc.matching import complete_graph, reduce_matching
from tpmc.rational import parse_rational
from tpmc.replay import demand_three_instance


def triangle():
    inst, _ = reduce_matching(complete_graph(3))
    return inst


def check_certificate(inst, card, sol, cert):
    assert cert.status == 'optimal'
    cmin, cmax = cert.straddle
    if card.sense == AT_MOST: assert cmin <= card.k
    elif card.sense == AT_LEAST: assert cmax >= card.k
    else: assert cmin <= card.k <= cmax
    lam = parse_rational(cert.multiplier)
    assert 0 <= lam
    split, _ = split_supplies(inst)
    priced = penalized(split, cert.sign, lam)
    assert solve_exact(priced).objective == parse_rational(cert.penalized_value)
    assert sol.objective + cert.sign*lam*sol.cardinality() == parse_rational(cert.penalized_value)
    assert len(cert.iterations) <= len(inst.market_ids) + 4


# --------------------------------------------------------------------------------
# Small cases

def test_triangle():
    inst = triangle()
    sol, cert = solve_cc(inst, CardinalitySense(AT_MOST, 3))
    assert sol.objective == 2
    assert sol.cardinality() == 2
    assert sweep_cardinality(inst) == [(0, None), (1, None), (2, 2), (3, 3)]


def test_triangle_infeasible_bound():
    sol, cert = solve_cc(triangle(), CardinalitySense(AT_MOST, 1))
    assert sol is None
    assert cert.status == 'infeasible'
    assert cert.min_rejections == 2


def test_exact_cardinality_needs_a_multiplier():
    # Serving a market is worth 1 unless it costs more; with every cost at 5
    # the unconstrained optimum rejects everything.
    inst = random_instance(2, (4, 3), demand_cap=1, cost_range=(5, 5), revenue_range=(1, 1))
    sol, cert = solve_cc(inst, CardinalitySense(EXACTLY, 1))
    assert sol.cardinality() == 1
    assert cert.sign == 1
    assert parse_rational(cert.multiplier) > 0
    assert sol.objective == solve_exact(inst, CardinalitySense(EXACTLY, 1)).objective


def test_exact_cardinality_at_top_of_tied_interval():
    # Free markets: every selection is optimal, so the inner optima span 0..2.
    edges = [('a', 'm'), ('b', 'n')]
    free = TpmcInstance(['a', 'b'], ['m', 'n'], {'a': 1, 'b': 1}, {'m': 1, 'n': 1}, edges,
                        {e: 0 for e in edges}, {'m': 0, 'n': 0})
    for k in range(3):
        sol, cert = solve_cc(free, CardinalitySense(EXACTLY, k))
        assert sol.cardinality() == k
        assert sol.objective == 0
        assert cert.straddle == [0, 2]
        check_certificate(free, CardinalitySense(EXACTLY, k), sol, cert)
    assert sweep_cardinality(free) == [(0, 0), (1, 0), (2, 0)]


def test_requires_simple_instance():
    with pytest.raises(PreconditionError):
        solve_cc(demand_three_instance(), CardinalitySense(AT_MOST, 2))
    with pytest.raises(PreconditionError):
        solve_cc(triangle(), CardinalitySense(AT_MOST, 4))


def test_helpers():
    inst = demand_three_instance()
    assert min_rejections(inst) == 1
    assert multiplier_bound(inst) == 9 + 40 + 1
    priced = penalized(inst, -1, Fraction(1, 2))
    assert all(r == Fraction(19, 2) for r in priced.revenues.values())
    assert priced.costs == inst.costs


def test_custom_inner_solver():
    calls = []
    def inner(priced):
        calls.append(priced)
        return optimal_support(priced)
    inst = random_instance(8, (5, 4), cost_range=(-2, 6), revenue_range=(0, 10))
    sol, cert = solve_cc(inst, CardinalitySense(AT_LEAST, 2), inner=inner)
    assert len(calls) == len(cert.iterations)
    assert sol.objective == solve_exact(inst, CardinalitySense(AT_LEAST, 2)).objective


# --------------------------------------------------------------------------------
# Against the brute-force oracle

@settings(max_examples=500, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 5), st.integers(1, 2))
def test_matches_exhaustive_search(seed, supplies, markets, supply_cap):
    inst = random_instance(seed, (supplies, markets), demand_cap=2, supply_cap=supply_cap,
            cost_range=(-3, 6), revenue_range=(0, 10))
    for sense in SENSES:
        for k in range(markets + 1):
            card = CardinalitySense(sense, k)
            sol, cert = solve_cc(inst, card)
            expected = solve_exact(inst, card)
            if expected is None:
                assert sol is None
                assert cert.status == 'infeasible'
                continue
            assert sol.objective == expected.objective
            assert card.admits(sol.cardinality())
            assert check_feasible(inst, sol, integral=True).feasible
            check_certificate(inst, card, sol, cert)


@pytest.mark.parametrize('seed', range(10))
def test_sweep_matches_exhaustive_search(seed):
    inst = random_instance(seed, (5, 4), supply_cap=2, cost_range=(-1, 4), revenue_range=(0, 6),
            denominator=2)
    expected = []
    for k in range(len(inst.market_ids) + 1):
        sol = solve_exact(inst, CardinalitySense(EXACTLY, k))
        expected.append((k, None if sol is None else sol.objective))
    assert sweep_cardinality(inst) == expected


def test_sweep_of_small_instances():
    empty = TpmcInstance([], [], {}, {}, [], {}, {})
    assert sweep_cardinality(empty) == [(0, 0)]
    edges = [('a', 'm'), ('b', 'n')]
    disjoint = TpmcInstance(['a', 'b'], ['m', 'n'], {'a': 1, 'b': 1}, {'m': 1, 'n': 1}, edges,
                            {('a', 'm'): 1, ('b', 'n'): 2}, {'m': 3, 'n': 5})
    assert sweep_cardinality(disjoint) == [(0, 3), (1, 5), (2, 8)]
