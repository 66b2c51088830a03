from fractions import Fraction
import json

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from tpmc.instance import CapExceededError, InstanceError, PreconditionError, is_simple
from tpmc.matching import (
        SimpleGraph, all_matchings, brute_force_matchings, check_reduction_bijection,
        complete_graph, graph_document, max_weight_matching_card, parse_graph, petersen_graph,
        random_graph, reduce_matching)
from tpmc.polytope import audit_matching_cardinality


def is_matching(edges):
    ends = [v for e in edges for v in e]
    return len(ends) == len(set(ends))


# --------------------------------------------------------------------------------
# Graphs

def test_parse_graph():
    G = parse_graph('{"vertices": 4, "edges": [{"u": 1, "v": 0, "w": "3/2"}, {"u": 2, "v": 3}]}')
    assert G.edges == [(0, 1), (2, 3)]
    assert G.weights == {(0, 1): Fraction(3, 2), (2, 3): 1}
    assert parse_graph(json.dumps(graph_document(G))).weights == G.weights


@pytest.mark.parametrize('text, message', [
    ('{"vertices": 2, "edges": [{"u": 0, "v": 0}]}', "Loop"),
    ('{"vertices": 2, "edges": [{"u": 0, "v": 2}]}', "outside"),
    ('{"vertices": 2, "edges": [{"u": 0, "v": 1}, {"u": 1, "v": 0}]}', "Duplicate"),
    ('{"edges": []}', "vertices"),
    ('{"vertices": 2, "edges": [{"u": 0, "v": 1, "w": "a"}]}', "unparsable"),
    ('{"vertices": 2,', "Syntax error"),
])
def test_parse_graph_errors(text, message):
    with pytest.raises(InstanceError, match=message):
        parse_graph(text)


def test_named_graphs():
    assert complete_graph(4).m == 6
    P = petersen_graph()
    assert (P.n, P.m) == (10, 15)
    degrees = [sum(v in e for e in P.edges) for v in range(P.n)]
    assert degrees == [3] * 10
    G = random_graph(5, 8, max_edges=6)
    assert G.m <= 6
    assert random_graph(5, 8, max_edges=6).edges == G.edges


# --------------------------------------------------------------------------------
# Reduction

def test_reduction_of_triangle():
    inst, coords = reduce_matching(complete_graph(3))
    assert inst.supply_ids == ('0', '1', '2')
    assert inst.market_ids == ('0-1', '0-2', '1-2')
    assert len(inst.edges) == 6
    assert is_simple(inst)
    assert all(d == 2 for d in inst.demands.values())
    assert all(w == 0 for w in inst.costs.values())
    assert coords.constant == 3
    assert coords.edge_of_market['1-2'] == (1, 2)


@pytest.mark.parametrize('G', [complete_graph(3), complete_graph(4),
                               petersen_graph().subgraph(petersen_graph().edges[:6])])
def test_reduction_bijection(G):
    report = check_reduction_bijection(G)
    assert report.holds
    assert report.solutions == report.matchings == len(list(all_matchings(G)))


def test_all_matchings_of_triangle():
    assert list(all_matchings(complete_graph(3))) == [(), (0,), (1,), (2,)]


# --------------------------------------------------------------------------------
# Heaviest matchings

def test_triangle_and_square():
    for k, weight in [(0, 0), (1, 1), (2, 1), (3, 1)]:
        result = max_weight_matching_card(complete_graph(3), k)
        assert result.weight == weight
        assert len(result.matching) <= k
    result = max_weight_matching_card(complete_graph(4), 2)
    assert result.weight == 2
    assert is_matching(result.matching)


def test_negative_weights_are_never_matched():
    G = SimpleGraph(4, [(0, 1), (2, 3)], {(0, 1): -1, (2, 3): Fraction(5, 2)})
    result = max_weight_matching_card(G, 2)
    assert result.matching == [(2, 3)]
    assert result.weight == Fraction(5, 2)
    assert brute_force_matchings(G, 2).weight == Fraction(5, 2)


def test_zero_weight_edges_tie_with_rejection():
    G = SimpleGraph(6, [(0, 1), (2, 3), (4, 5), (1, 2)],
                    {(0, 1): 2, (2, 3): 0, (4, 5): 0, (1, 2): 1})
    for k in range(G.m + 1):
        result = max_weight_matching_card(G, k)
        assert result.weight == brute_force_matchings(G, k).weight
        assert len(result.matching) <= k
        assert is_matching(result.matching)


def test_bounds():
    with pytest.raises(PreconditionError):
        max_weight_matching_card(complete_graph(3), 4)
    with pytest.raises(CapExceededError):
        brute_force_matchings(complete_graph(7), 3)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8))
def test_matches_brute_force(seed, n):
    G = random_graph(seed, n, max_edges=8)
    assert check_reduction_bijection(G).holds
    for k in range(G.m + 1):
        expected = brute_force_matchings(G, k)
        result = max_weight_matching_card(G, k)
        assert result.weight == expected.weight
        assert len(result.matching) <= k
        assert is_matching(result.matching)
        assert G.weight(result.matching) == result.weight


# --------------------------------------------------------------------------------
# Audits

@pytest.mark.parametrize('G', [complete_graph(3), complete_graph(4),
                               petersen_graph().subgraph(petersen_graph().edges[:10])],
                         ids=['K3', 'K4', 'petersen10'])
def test_cardinality_cut_is_integral(G):
    for k in range(G.m + 1):
        verdict = audit_matching_cardinality(G, k)
        assert verdict.holds, verdict.gaps


def test_audit_cap():
    with pytest.raises(CapExceededError):
        audit_matching_cardinality(petersen_graph(), 2)
