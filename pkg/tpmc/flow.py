"""Exact min-cost transportation for a fixed market selection.

The network is source -> supplies (capacity s_i) -> accepted markets
(capacity min(s_i, d_j), cost w_ij) -> sink (capacity d_j).  Rejected markets
are left out.  Flows are found by successive shortest augmenting paths over
exact rational reduced costs, so they are always integral.
"""
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
import functools
import heapq
import itertools
import logging
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

log = logging.getLogger(__name__)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'


class Selection(frozenset):
    """S(z): the set of accepted markets."""
    @classmethod
    def of_solution(cls, sol):
        return cls(sol.accepted())

    @classmethod
    def of_rejections(cls, inst, z):
        """From a 0/1 tuple in market order."""
        return cls(j for j, zj in zip(inst.market_ids, z) if zj == 0)


class FlowResult:
    def __init__(self, status, flow, cost):
        self.status = status
        self.flow = flow
        self.cost = Fraction(cost)

    def is_optimal(self):
        return self.status == OPTIMAL

    def __repr__(self):
        return f"FlowResult({self.status}, cost={self.cost})"


def _infeasible(inst):
    return FlowResult(INFEASIBLE, {e: 0 for e in inst.edges}, 0)


class _Network:
    """Residual network with paired arcs: arc a and a^1 are each other's reverse."""
    def __init__(self, n):
        self.n = n
        self.head, self.cap, self.cost = [], [], []
        self.out = [[] for _ in range(n)]

    def add_arc(self, u, v, cap, cost):
        a = len(self.head)
        for tail, head, c, w in ((u, v, cap, cost), (v, u, 0, -cost)):
            self.out[tail].append(len(self.head))
            self.head.append(head)
            self.cap.append(c)
            self.cost.append(Fraction(w))
        return a

    def tail(self, a):
        return self.head[a ^ 1]


def min_cost_transport(inst, sel):
    accepted = [j for j in inst.market_ids if j in sel]
    assert len(accepted) == len(sel), "Selection names unknown markets."
    if not accepted:
        return FlowResult(OPTIMAL, {e: 0 for e in inst.edges}, 0)
    if any(not inst.market_edges(j) for j in accepted):
        return _infeasible(inst)

    # Node numbering: 0 source, then supplies, then accepted markets, then sink.
    supply_node = {i: 1+n for n, i in enumerate(inst.supply_ids)}
    market_node = {j: 1+len(supply_node)+n for n, j in enumerate(accepted)}
    source, sink = 0, 1 + len(supply_node) + len(market_node)
    net = _Network(sink+1)
    for i in inst.supply_ids:
        net.add_arc(source, supply_node[i], inst.supplies[i], 0)
    edge_arc = {}
    for e in inst.edges:
        i, j = e
        if j in market_node:
            cap = min(inst.supplies[i], inst.demands[j])
            edge_arc[e] = net.add_arc(supply_node[i], market_node[j], cap, inst.costs[e])
    for j in accepted:
        net.add_arc(market_node[j], sink, inst.demands[j], 0)

    # Initial potentials: shortest distances in the layered DAG, so negative
    # costs leave every reduced cost nonnegative.
    potential = [Fraction(0)] * net.n
    for j in accepted:
        v = market_node[j]
        potential[v] = min(inst.costs[e] for e in inst.market_edges(j))
    potential[sink] = min(potential[market_node[j]] for j in accepted)

    required = sum(inst.demands[j] for j in accepted)
    shipped = 0
    while shipped < required:
        dist, parent = _shortest_paths(net, potential, source)
        if dist[sink] is None:
            log.debug("Selection %s is infeasible: shipped %d of %d", sorted(sel), shipped, required)
            return _infeasible(inst)
        for v in range(net.n):
            potential[v] += dist[sink] if dist[v] is None else min(dist[v], dist[sink])
        path = []
        v = sink
        while v != source:
            a = parent[v]
            path.append(a)
            v = net.tail(a)
        amount = min(min(net.cap[a] for a in path), required - shipped)
        for a in path:
            net.cap[a] -= amount
            net.cap[a ^ 1] += amount
        shipped += amount

    flow = {e: 0 for e in inst.edges}
    cost = Fraction(0)
    for e, a in edge_arc.items():
        flow[e] = net.cap[a ^ 1]
        cost += inst.costs[e] * flow[e]
    return FlowResult(OPTIMAL, flow, cost)


def lexmin_transport(inst, sel):
    """The min-cost flow for sel that is lexicographically smallest in edge
    order.  Costs get a base-(B+1) perturbation, B the largest edge capacity,
    scaled below the smallest possible cost gap between integral flows."""
    result = min_cost_transport(inst, sel)
    if not result.is_optimal() or not inst.edges:
        return result
    base = 1 + max(min(inst.supplies[i], inst.demands[j]) for i, j in inst.edges)
    scale = functools.reduce(lambda a, b: a*b // math.gcd(a, b),
            (Fraction(w).denominator for w in inst.costs.values()), 1)
    eps = Fraction(1, 2 * scale * base**len(inst.edges))
    last = len(inst.edges) - 1
    perturbed = inst.with_objective(costs={
            e: inst.costs[e] + eps * base**(last-t) for t, e in enumerate(inst.edges)})
    lex = min_cost_transport(perturbed, sel)
    cost = sum((inst.costs[e] * x for e, x in lex.flow.items()), Fraction(0))
    assert cost == result.cost, "Perturbed flow is not cost-optimal."
    return FlowResult(OPTIMAL, lex.flow, cost)



def _shortest_paths(net, potential, source):
    """Dijkstra on reduced costs.  Ties go to the lower node, then the earlier arc."""
    dist = [None] * net.n
    parent = [None] * net.n
    dist[source] = Fraction(0)
    done = [False] * net.n
    heap = [(dist[source], source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]: continue
        done[u] = True
        for a in net.out[u]:
            if net.cap[a] <= 0: continue
            v = net.head[a]
            reduced = net.cost[a] + potential[u] - potential[v]
            assert reduced >= 0, "Negative reduced cost; potentials are stale."
            nd = d + reduced
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                parent[v] = a
                heapq.heappush(heap, (nd, v))
    return dist, parent


def selection_feasible(inst, sel):
    """Max-flow check that the accepted demands can all be met."""
    accepted = [j for j in inst.market_ids if j in sel]
    if not accepted: return True
    required = sum(inst.demands[j] for j in accepted)
    if required > sum(inst.supplies.values()): return False
    supply_node = {i: 1+n for n, i in enumerate(inst.supply_ids)}
    market_node = {j: 1+len(supply_node)+n for n, j in enumerate(accepted)}
    sink = 1 + len(supply_node) + len(market_node)
    rows, cols, caps = [], [], []
    def arc(u, v, c):
        rows.append(u); cols.append(v); caps.append(c)
    for i in inst.supply_ids:
        arc(0, supply_node[i], inst.supplies[i])
    for i, j in inst.edges:
        if j in market_node:
            arc(supply_node[i], market_node[j], min(inst.supplies[i], inst.demands[j]))
    for j in accepted:
        arc(market_node[j], sink, inst.demands[j])
    graph = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(sink+1, sink+1))
    return int(maximum_flow(graph, 0, sink).flow_value) == required


# --------------------------------------------------------------------------------
# Transport tables: the optimum for every selection.  Transport cost does not
# depend on the lost revenues, so tables are keyed on the instance with r = 0.

def rejection_vectors(inst):
    """All 0/1 rejection vectors in lexicographic order."""
    return itertools.product((0, 1), repeat=len(inst.market_ids))


def _solve_rejections(inst, z):
    sel = Selection.of_rejections(inst, z)
    if not selection_feasible(inst, sel):
        return _infeasible(inst)
    result = min_cost_transport(inst, sel)
    assert result.is_optimal(), f"Max-flow and min-cost flow disagree on {sorted(sel)}"
    return result


@functools.lru_cache(maxsize=256)
def _cached_table(inst):
    return {z: _solve_rejections(inst, z) for z in rejection_vectors(inst)}


def transport_table(inst, jobs=1):
    """Maps each rejection vector (tuple in market order) to its FlowResult."""
    key = inst.with_objective(revenues={j: 0 for j in inst.market_ids})
    if jobs <= 1:
        return _cached_table(key)
    zs = list(rejection_vectors(key))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = pool.map(functools.partial(_solve_rejections, key), zs,
                chunksize=max(1, len(zs) // (4*jobs)))
        return dict(zip(zs, results))
