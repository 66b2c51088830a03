"""Matchings of a general graph as simple TPMC instances.

Every vertex becomes a unit supply and every edge (u, v) a market "u-v" with
demand 2 served only by u and v.  A market is accepted exactly when its edge
is matched, so y = 1 - z maps integral solutions onto matchings.
"""
from fractions import Fraction
import json
import logging

from bunch import Bunch
import numpy as np

from tpmc.cardinality import solve_cc
from tpmc.enumeration import enumerate_flows
from tpmc.flow import Selection, rejection_vectors
from tpmc.instance import (
        AT_LEAST, CapExceededError, CardinalitySense, InstanceError, PreconditionError,
        TpmcInstance)
from tpmc.rational import format_rational, parse_rational, rational_range_inclusive

log = logging.getLogger(__name__)

MATCHING_EDGE_CAP = 20


class SimpleGraph:
    def __init__(self, n, edges, weights=None):
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise InstanceError(f"Vertex count must be a nonnegative integer, got {n!r}")
        self.n = n
        self.edges = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"Edge ({u},{v}) has an endpoint outside 0..{n-1}")
            if u == v: raise InstanceError(f"Loop at vertex {u}")
            e = (min(u, v), max(u, v))
            if e in self.edges: raise InstanceError(f"Duplicate edge {e}")
            self.edges.append(e)
        if weights is None: weights = {}
        self.weights = {e: Fraction(weights.get(e, 1)) for e in self.edges}

    @property
    def m(self):
        return len(self.edges)

    def weight(self, edges):
        return sum((self.weights[e] for e in edges), Fraction(0))

    def subgraph(self, edges):
        return SimpleGraph(self.n, edges, {e: self.weights[e] for e in edges})


def parse_graph(text):
    try: doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"Syntax error at line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(doc, dict) or 'vertices' not in doc:
        raise InstanceError("Graph document needs 'vertices'.")
    edges, weights = [], {}
    for n, item in enumerate(doc.get('edges', [])):
        if not isinstance(item, dict) or 'u' not in item or 'v' not in item:
            raise InstanceError(f"edges[{n}]: needs 'u' and 'v'")
        u, v = item['u'], item['v']
        if any(isinstance(a, bool) or not isinstance(a, int) for a in (u, v)):
            raise InstanceError(f"edges[{n}]: endpoints must be integers")
        w = parse_rational(item.get('w', 1))
        if w is None: raise InstanceError(f"edges[{n}]: unparsable weight {item['w']!r}")
        e = (min(u, v), max(u, v))
        edges.append(e)
        weights[e] = w
    return SimpleGraph(doc['vertices'], edges, weights)


def graph_document(G):
    return {'vertices': G.n,
            'edges': [{'u': u, 'v': v, 'w': format_rational(G.weights[(u, v)])} for u, v in G.edges]}


def complete_graph(n):
    return SimpleGraph(n, [(u, v) for u in range(n) for v in range(u+1, n)])


def petersen_graph():
    outer = [(i, (i+1) % 5) for i in range(5)]
    spokes = [(i, i+5) for i in range(5)]
    inner = [(5+i, 5+(i+2) % 5) for i in range(5)]
    return SimpleGraph(10, outer + spokes + inner)


def random_graph(seed, n, density=Fraction(1, 2), weight_range=(-2, 6), denominator=2,
        max_edges=None):
    rng = np.random.default_rng(seed)
    density = Fraction(density)
    values = rational_range_inclusive(weight_range[0], weight_range[1], denominator)
    edges = [(u, v) for u in range(n) for v in range(u+1, n)
             if rng.integers(density.denominator) < density.numerator]
    if max_edges is not None and len(edges) > max_edges:
        keep = sorted(rng.choice(len(edges), size=max_edges, replace=False))
        edges = [edges[int(idx)] for idx in keep]
    weights = {e: values[int(rng.integers(len(values)))] for e in edges}
    return SimpleGraph(n, edges, weights)


# --------------------------------------------------------------------------------
# Reduction

def market_name(e):
    return f"{e[0]}-{e[1]}"


def reduce_matching(G):
    """The simple instance of a graph, plus the map between markets and edges.
    Costs are 0 and each market's lost revenue is its edge weight."""
    supply_ids = [str(u) for u in range(G.n)]
    market_ids = [market_name(e) for e in G.edges]
    edges, costs = [], {}
    for u, v in G.edges:
        for endpoint in (u, v):
            edges.append((str(endpoint), market_name((u, v))))
            costs[edges[-1]] = 0
    inst = TpmcInstance(supply_ids, market_ids,
            {i: 1 for i in supply_ids}, {j: 2 for j in market_ids},
            edges, costs, {market_name(e): G.weights[e] for e in G.edges})
    coords = Bunch(edge_of_market={market_name(e): e for e in G.edges},
            market_of_edge={e: market_name(e) for e in G.edges},
            constant=G.weight(G.edges))
    return inst, coords


def matching_of_solution(coords, sol):
    """y = 1 - z: the matched edges, in edge order."""
    return [coords.edge_of_market[j] for j in sol.accepted()]


def max_weight_matching_card(G, k, inner=None, jobs=1):
    """The heaviest matching with at most k edges, found through the
    cardinality-constrained instance with at least m - k rejections."""
    if k < 0 or k > G.m:
        raise PreconditionError(f"Matching bound {k} is outside 0..{G.m}")
    inst, coords = reduce_matching(G)
    sol, cert = solve_cc(inst, CardinalitySense(AT_LEAST, G.m - k), inner=inner, jobs=jobs)
    assert sol is not None, "Rejecting every edge is always feasible."
    matching = matching_of_solution(coords, sol)
    weight = coords.constant - sol.objective
    assert weight == G.weight(matching), "Reduced objective disagrees with the matching weight."
    return Bunch(matching=matching, weight=weight, certificate=cert)


# --------------------------------------------------------------------------------
# Brute force

def all_matchings(G):
    """Every matching as a tuple of edge indices, in lexicographic order."""
    used = [False] * G.n
    current = []
    def extend(start):
        yield tuple(current)
        for idx in range(start, G.m):
            u, v = G.edges[idx]
            if used[u] or used[v]: continue
            used[u] = used[v] = True
            current.append(idx)
            yield from extend(idx+1)
            current.pop()
            used[u] = used[v] = False
    yield from extend(0)


def brute_force_matchings(G, k, cap=MATCHING_EDGE_CAP):
    """The heaviest matching with at most k edges; the lexicographically first
    one among ties."""
    if G.m > cap:
        raise CapExceededError(f"{G.m} edges exceed the brute-force cap of {cap}.")
    best, best_weight = (), Fraction(0)
    for idxs in all_matchings(G):
        if len(idxs) > k: continue
        w = G.weight(G.edges[i] for i in idxs)
        if w > best_weight:
            best, best_weight = idxs, w
    return Bunch(matching=[G.edges[i] for i in best], weight=best_weight)


def check_reduction_bijection(G):
    """Checks that integral solutions of the reduced instance map one-to-one onto
    matchings of G."""
    inst, _ = reduce_matching(G)
    images = []
    for z in rejection_vectors(inst):
        for _flow in enumerate_flows(inst, Selection.of_rejections(inst, z)):
            images.append(tuple(1 - zj for zj in z))
    matchings = set()
    for idxs in all_matchings(G):
        y = [0] * G.m
        for i in idxs: y[i] = 1
        matchings.add(tuple(y))
    found = set(images)
    return Bunch(holds=(found == matchings and len(images) == len(found)),
            solutions=len(images), matchings=len(matchings),
            missing=sorted(matchings - found), extra=sorted(found - matchings))
