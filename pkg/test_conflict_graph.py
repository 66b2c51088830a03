import numpy as np
import pytest

from tpmc.conflict import (
        EVEN_CYCLE, FULL_U1, FULL_U2, PARTIAL_U1, PATH, ConflictGraph, ConflictNode,
        apply_swap, build_conflict_graph, check_claims, classify_components,
        edge_property_witness, find_swap_subgraph, graph_document, total_value, verify_swap_set)
from tpmc.enumeration import optimal_support, solve_exact
from tpmc.instance import (
        EXACTLY, CardinalitySense, FalsificationError, PreconditionError, TpmcInstance,
        check_feasible, complete_solution, random_instance)


def two_markets(w=(1, 2), r=(3, 5)):
    edges = [('a', 'm'), ('b', 'n')]
    return TpmcInstance(['a', 'b'], ['m', 'n'], {'a': 1, 'b': 1}, {'m': 1, 'n': 1}, edges,
                        dict(zip(edges, w)), dict(zip(['m', 'n'], r)))


def serve_both(inst):
    return complete_solution(inst, {('a', 'm'): 1, ('b', 'n'): 1}, {'m': 0, 'n': 0})


def reject_both(inst):
    return complete_solution(inst, {}, {'m': 1, 'n': 1})


def shared_market():
    """Market m (demand 2) served by {a, b} in the first solution and {b, c} in
    the second; the second also serves n from a."""
    edges = [('a', 'm'), ('b', 'm'), ('c', 'm'), ('a', 'n'), ('c', 'p')]
    inst = TpmcInstance(['a', 'b', 'c'], ['m', 'n', 'p'], {'a': 1, 'b': 1, 'c': 1},
                        {'m': 2, 'n': 1, 'p': 1}, edges, {e: 0 for e in edges},
                        {'m': 0, 'n': 0, 'p': 0})
    sol1 = complete_solution(inst, {('a', 'm'): 1, ('b', 'm'): 1}, {'m': 0, 'n': 1, 'p': 1})
    sol2 = complete_solution(inst, {('b', 'm'): 1, ('c', 'm'): 1, ('a', 'n'): 1},
                             {'m': 0, 'n': 0, 'p': 1})
    return inst, sol1, sol2


def optimum_pair(seed):
    """Optimal solutions at the lowest and highest optimal cardinality of a
    small random unit-supply instance, or None if they are less than two apart."""
    rng = np.random.default_rng(seed)
    sizes = (int(rng.integers(3, 7)), int(rng.integers(3, 6)))
    inst = random_instance(seed, sizes, demand_cap=2, cost_range=(0, 1), revenue_range=(0, 2))
    support = optimal_support(inst)
    if support[-1][0] - support[0][0] < 2:
        inst = inst.with_objective({e: 0 for e in inst.edges}, {j: 0 for j in inst.market_ids})
        support = optimal_support(inst)
    if support[-1][0] - support[0][0] < 2:
        return None
    return inst, support[0][1], support[-1][1]


# --------------------------------------------------------------------------------
# Construction

def test_shared_market_graph():
    inst, sol1, sol2 = shared_market()
    G = build_conflict_graph(inst, sol1, sol2)
    assert G.W1 == [] and G.W2 == ['n'] and G.P == ['m'] and G.P2 == ['m'] and G.R == ['p']
    assert [a.id for a in G.nodes] == [('m', 'j1'), ('m', 'j2'), ('m', 'j3'), ('m', 'j4'), ('n', '')]
    assert G.node(('m', 'j1')).kind == PARTIAL_U1
    assert G.node(('n', '')).kind == FULL_U2
    assert G.edges == {(('m', 'j1'), ('n', '')), (('m', 'j2'), ('m', 'j3'))}
    assert total_value(G) == -1
    assert check_claims(G) == []

    doc = graph_document(G)
    assert doc['edges'] == [['m_j1', 'n'], ['m_j2', 'm_j3']]
    assert doc['total_value'] == -1
    assert [c['kind'] for c in doc['components']] == [PATH, PATH, PATH]
    assert [c['value'] for c in doc['components']] == ["-1/2", 0, "-1/2"]


def test_swap_needs_total_value_two():
    inst, sol1, sol2 = shared_market()
    with pytest.raises(PreconditionError):
        find_swap_subgraph(build_conflict_graph(inst, sol1, sol2))
    with pytest.raises(PreconditionError):
        find_swap_subgraph(build_conflict_graph(inst, sol2, sol1))


def test_preconditions():
    inst = TpmcInstance(['a'], ['m'], {'a': 2}, {'m': 2}, [('a', 'm')], {('a', 'm'): 0}, {'m': 0})
    sol = complete_solution(inst, {}, {'m': 1})
    with pytest.raises(PreconditionError, match="unit supplies"):
        build_conflict_graph(inst, sol, sol)
    inst = two_markets()
    broken = complete_solution(inst, {}, {'m': 0, 'n': 1})
    with pytest.raises(PreconditionError, match="not a feasible"):
        build_conflict_graph(inst, broken, reject_both(inst))


def test_malformed_component_is_reported():
    edges = [('s', j) for j in 'abcd']
    inst = TpmcInstance(['s'], list('abcd'), {'s': 1}, {j: 1 for j in 'abcd'}, edges,
                        {e: 0 for e in edges}, {j: 0 for j in 'abcd'})
    everything = complete_solution(inst, {}, {j: 1 for j in 'abcd'})
    nodes = [ConflictNode('a', '', FULL_U1, ['s'])]
    nodes += [ConflictNode(j, '', FULL_U2, ['s']) for j in 'bcd']
    G = ConflictGraph(inst, everything, everything, nodes, [(('a', ''), (j, '')) for j in 'bcd'])
    with pytest.raises(FalsificationError):
        classify_components(G)
    assert any("neither a path" in v for v in check_claims(G))


def test_double_shared_suppliers_form_one_edge():
    edges = [('a', 'm'), ('b', 'm'), ('a', 'n'), ('b', 'n')]
    inst = TpmcInstance(['a', 'b'], ['m', 'n'], {'a': 1, 'b': 1}, {'m': 2, 'n': 2}, edges,
                        {e: 0 for e in edges}, {'m': 0, 'n': 0})
    sol1 = complete_solution(inst, {('a', 'm'): 1, ('b', 'm'): 1}, {'m': 0, 'n': 1})
    sol2 = complete_solution(inst, {('a', 'n'): 1, ('b', 'n'): 1}, {'m': 1, 'n': 0})
    G = build_conflict_graph(inst, sol1, sol2)
    assert [c.kind for c in classify_components(G)] == [PATH]
    assert check_claims(G) == []


def test_even_cycle():
    pairs = {'m1': 'ab', 'm2': 'cd', 'n1': 'bc', 'n2': 'da'}
    edges = [(i, j) for j, suppliers in pairs.items() for i in suppliers]
    inst = TpmcInstance(list('abcd'), list(pairs), {i: 1 for i in 'abcd'},
                        {j: 2 for j in pairs}, edges, {e: 0 for e in edges}, {j: 0 for j in pairs})
    def serving(markets):
        x = {(i, j): 1 for j in markets for i in pairs[j]}
        return complete_solution(inst, x, {j: int(j not in markets) for j in pairs})
    G = build_conflict_graph(inst, serving(['m1', 'm2']), serving(['n1', 'n2']))
    assert [c.kind for c in classify_components(G)] == [EVEN_CYCLE]
    assert check_claims(G) == []
    assert graph_document(G)['components'][0]['nodes'] == ['m1', 'n1', 'm2', 'n2']


# --------------------------------------------------------------------------------
# Swaps

def test_swap_on_two_markets():
    inst = two_markets()
    G = build_conflict_graph(inst, serve_both(inst), reject_both(inst))
    assert [a.kind for a in G.nodes] == [FULL_U1, FULL_U1]
    chosen = find_swap_subgraph(G)
    assert chosen == {('m', '')}
    assert verify_swap_set(G, chosen).holds
    outcome = apply_swap(G, chosen)
    assert outcome.cardinalities == (1, 1)
    assert outcome.sol3.z == {'m': 1, 'n': 0}
    assert outcome.sol4.z == {'m': 0, 'n': 1}
    assert outcome.rho == 3
    assert outcome.delta == -2
    assert outcome.sol4.objective - reject_both(inst).objective == -2


def test_swap_rejects_unqualified_sets():
    inst = two_markets()
    G = build_conflict_graph(inst, serve_both(inst), reject_both(inst))
    assert not verify_swap_set(G, {('m', ''), ('n', '')}).full_surplus
    with pytest.raises(PreconditionError):
        apply_swap(G, {('m', ''), ('n', '')})


def test_witness_requires_optimal_inputs():
    inst = two_markets()
    with pytest.raises(FalsificationError):
        edge_property_witness(inst, None, None, serve_both(inst), reject_both(inst))
    tied = two_markets(w=(1, 2), r=(1, 2))
    witness = edge_property_witness(tied, None, None, serve_both(tied), reject_both(tied))
    assert witness.cardinality() == 1
    assert witness.objective == 3
    with pytest.raises(PreconditionError):
        edge_property_witness(tied, None, None, serve_both(tied), witness)


def test_witness_with_override_objective():
    inst = two_markets()
    w = {('a', 'm'): 2, ('b', 'n'): 2}
    r = {'m': 2, 'n': 2}
    priced = inst.with_objective(w, r)
    witness = edge_property_witness(inst, w, r, serve_both(priced), reject_both(priced))
    assert witness.objective == 4


@pytest.mark.parametrize('seed', range(200))
def test_claims_on_optimum_pairs(seed):
    pair = optimum_pair(seed)
    if pair is None: return
    inst, sol1, sol2 = pair
    k1, k2 = sol1.cardinality(), sol2.cardinality()
    for rng in (None, np.random.default_rng(seed)):
        G = build_conflict_graph(inst, sol1, sol2, rng=rng)
        assert check_claims(G) == []
        assert total_value(G) == k2 - k1
        chosen = find_swap_subgraph(G)
        assert verify_swap_set(G, chosen).holds
        outcome = apply_swap(G, chosen)
        assert outcome.delta == 0
        assert outcome.cardinalities == (k1 + 1, k2 - 1)
        exact = solve_exact(inst, CardinalitySense(EXACTLY, int(k1) + 1))
        assert outcome.sol3.objective == exact.objective


@pytest.mark.parametrize('seed', range(0, 200, 5))
def test_walk_visits_every_cardinality(seed):
    pair = optimum_pair(seed)
    if pair is None: return
    inst, sol1, sol2 = pair
    current = sol1
    while current.cardinality() < sol2.cardinality() - 1:
        current = edge_property_witness(inst, None, None, current, sol2)
        assert current.objective == sol1.objective
        assert check_feasible(inst, current, integral=True).feasible
    assert current.cardinality() == sol2.cardinality() - 1
