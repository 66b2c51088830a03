"""Conflict graphs between two integral solutions of a unit-supply simple
instance, and the swap that moves both solutions one market toward each other.

A market served by exactly one of the two solutions becomes a full node on
that solution's side.  A market served by both becomes partial nodes, one per
supplier on each side (tags j1, j2 for the first solution, j3, j4 for the
second).  Two nodes on opposite sides are adjacent iff they share a supplier.
"""
from fractions import Fraction
import logging

from bunch import Bunch
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from tpmc.instance import (
        FalsificationError, PreconditionError, check_feasible, complete_solution,
        is_simple, is_unit_supply)
from tpmc.rational import format_rational

log = logging.getLogger(__name__)

FULL_U1 = 'full_u1'
FULL_U2 = 'full_u2'
PARTIAL_U1 = 'partial_u1'
PARTIAL_U2 = 'partial_u2'

PATH = 'path'
EVEN_CYCLE = 'even_cycle'

FULL_TAG = ''
FIRST_TAGS = ('j1', 'j2')
SECOND_TAGS = ('j3', 'j4')
TAG_ORDER = {FULL_TAG: 0, 'j1': 1, 'j2': 2, 'j3': 3, 'j4': 4}

NODE_VALUES = {
    FULL_U1: Fraction(1),
    PARTIAL_U1: Fraction(1, 2),
    PARTIAL_U2: Fraction(-1, 2),
    FULL_U2: Fraction(-1),
}


class ConflictNode:
    def __init__(self, market, copy_tag, kind, suppliers):
        assert suppliers, f"Node {market}{copy_tag} has no suppliers."
        self.market = market
        self.copy_tag = copy_tag
        self.kind = kind
        self.suppliers = frozenset(suppliers)

    @property
    def id(self):
        return (self.market, self.copy_tag)

    def is_full(self):
        return self.kind in (FULL_U1, FULL_U2)

    def in_first_side(self):
        return self.kind in (FULL_U1, PARTIAL_U1)

    def value(self):
        return NODE_VALUES[self.kind]

    def __repr__(self):
        return f"ConflictNode({node_label(self.id)}, {self.kind}, {sorted(self.suppliers)})"


def node_label(node_id):
    market, tag = node_id
    return f"{market}_{tag}" if tag else market


class Component:
    def __init__(self, nodes, kind, edge_count):
        self.nodes = tuple(nodes)
        self.kind = kind
        self.edge_count = edge_count

    def __repr__(self):
        return f"Component({self.kind}, {[node_label(n) for n in self.nodes]})"


class ConflictGraph:
    def __init__(self, inst, sol1, sol2, nodes, edges):
        self.inst = inst
        self.sol1 = sol1
        self.sol2 = sol2
        order = {j: n for n, j in enumerate(inst.market_ids)}
        self.nodes = sorted(nodes, key=lambda a: (order[a.market], TAG_ORDER[a.copy_tag]))
        self.edges = set(edges)
        self._by_id = {a.id: a for a in self.nodes}
        self._position = {a.id: n for n, a in enumerate(self.nodes)}
        self._neighbors = {a.id: set() for a in self.nodes}
        for a, b in self.edges:
            self._neighbors[a].add(b)
            self._neighbors[b].add(a)

        accepted1, accepted2 = set(sol1.accepted()), set(sol2.accepted())
        self.W1 = [j for j in inst.market_ids if j in accepted1 and j not in accepted2]
        self.W2 = [j for j in inst.market_ids if j in accepted2 and j not in accepted1]
        self.F = self.W1 + self.W2
        self.P = [j for j in inst.market_ids if j in accepted1 and j in accepted2]
        self.P1 = [j for j in self.P if inst.demands[j] == 1]
        self.P2 = [j for j in self.P if inst.demands[j] == 2]
        self.R = [j for j in inst.market_ids if j not in accepted1 and j not in accepted2]

    def node(self, node_id):
        return self._by_id[node_id]

    def has_node(self, node_id):
        return node_id in self._by_id

    def neighbors(self, node_id):
        return self._neighbors[node_id]

    def position(self, node_id):
        return self._position[node_id]

    def __len__(self):
        return len(self.nodes)


# --------------------------------------------------------------------------------
# Construction

def suppliers_of(sol, j):
    """I_j: the suppliers shipping to market j, in solution-edge order."""
    return [i for (i, m), v in sol.x.items() if m == j and v > 0]


def build_conflict_graph(inst, sol1, sol2, rng=None):
    """Builds G* from two feasible integral solutions.  Suppliers are assigned to
    partial copies in supply order, or in a random order when rng is given."""
    if not is_unit_supply(inst):
        raise PreconditionError("Conflict graphs need unit supplies; split the instance first.")
    if not is_simple(inst):
        raise PreconditionError("Conflict graphs need every demand to be at most 2.")
    for name, sol in (('first', sol1), ('second', sol2)):
        verdict = check_feasible(inst, sol, integral=True)
        if not verdict.feasible:
            raise PreconditionError(f"The {name} solution is not a feasible integral solution: " +
                    "; ".join(v.message for v in verdict.violations))

    supply_order = {i: n for n, i in enumerate(inst.supply_ids)}
    def ordered(suppliers):
        suppliers = sorted(suppliers, key=supply_order.get)
        if rng is not None:
            suppliers = [suppliers[n] for n in rng.permutation(len(suppliers))]
        return suppliers

    accepted1, accepted2 = set(sol1.accepted()), set(sol2.accepted())
    nodes = []
    for j in inst.market_ids:
        if j in accepted1 and j not in accepted2:
            nodes.append(ConflictNode(j, FULL_TAG, FULL_U1, suppliers_of(sol1, j)))
        elif j in accepted2 and j not in accepted1:
            nodes.append(ConflictNode(j, FULL_TAG, FULL_U2, suppliers_of(sol2, j)))
        elif j in accepted1 and j in accepted2:
            first, second = ordered(suppliers_of(sol1, j)), ordered(suppliers_of(sol2, j))
            assert len(first) == len(second) == inst.demands[j], f"Market {j} is not served by unit flows."
            for tag, t in zip(FIRST_TAGS, first):
                nodes.append(ConflictNode(j, tag, PARTIAL_U1, [t]))
            for tag, t in zip(SECOND_TAGS, second):
                nodes.append(ConflictNode(j, tag, PARTIAL_U2, [t]))

    edges = [(a.id, b.id) for a in nodes if a.in_first_side()
            for b in nodes if not b.in_first_side() and a.suppliers & b.suppliers]
    G = ConflictGraph(inst, sol1, sol2, nodes, edges)
    log.debug("Conflict graph: %d nodes, %d edges, |W1|=%d, |W2|=%d, |P|=%d",
            len(G.nodes), len(G.edges), len(G.W1), len(G.W2), len(G.P))
    return G


# --------------------------------------------------------------------------------
# Values and structure

def node_values(G):
    return {a.id: a.value() for a in G.nodes}


def total_value(G):
    return sum(node_values(G).values(), Fraction(0))


def value_of(G, node_ids):
    return sum((G.node(n).value() for n in node_ids), Fraction(0))


def classify_components(G):
    """Labels every component as a path or an even cycle of full nodes.
    Components are ordered by their first node in canonical order."""
    if not G.nodes: return []
    n = len(G.nodes)
    rows = [G.position(a) for a, b in G.edges] + [G.position(b) for a, b in G.edges]
    cols = [G.position(b) for a, b in G.edges] + [G.position(a) for a, b in G.edges]
    adjacency = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    count, labels = connected_components(adjacency, directed=False)

    members = [[] for _ in range(count)]
    for a in G.nodes:
        members[labels[G.position(a.id)]].append(a.id)
    members.sort(key=lambda ids: G.position(ids[0]))

    components = []
    for ids in members:
        degrees = [len(G.neighbors(a)) for a in ids]
        edge_count = sum(degrees) // 2
        if edge_count == len(ids) - 1 and max(degrees) <= 2:
            kind = PATH
        elif (edge_count == len(ids) and all(d == 2 for d in degrees) and len(ids) % 2 == 0
                and all(G.node(a).is_full() for a in ids)):
            kind = EVEN_CYCLE
        else:
            raise FalsificationError(
                    "Component is neither a path nor an even cycle of full nodes: " +
                    ", ".join(node_label(a) for a in ids))
        components.append(Component(ids, kind, edge_count))
    return components


def path_order(G, component):
    """The nodes of a component in walk order, starting from its lowest endpoint
    (lowest node for cycles)."""
    ids = set(component.nodes)
    if component.kind == PATH:
        start = min((a for a in ids if len(G.neighbors(a)) <= 1), key=G.position)
    else:
        start = min(ids, key=G.position)
    walk = [start]
    seen = {start}
    while True:
        nexts = sorted((b for b in G.neighbors(walk[-1]) if b not in seen), key=G.position)
        if not nexts: break
        walk.append(nexts[0])
        seen.add(nexts[0])
    assert len(walk) == len(ids), "Walk did not cover the component."
    return walk


def partial_nodes(G, component):
    return [a for a in component.nodes if not G.node(a).is_full()]


def check_claims(G):
    """Checks every structural statement about conflict graphs and returns the
    list of violations (empty when all hold)."""
    violations = []
    first = [a for a in G.nodes if a.in_first_side()]
    second = [b for b in G.nodes if not b.in_first_side()]
    for a in first:
        for b in second:
            if bool(a.suppliers & b.suppliers) != ((a.id, b.id) in G.edges):
                violations.append(f"edge rule fails for ({node_label(a.id)}, {node_label(b.id)})")
    for a, b in G.edges:
        if not G.node(a).in_first_side() or G.node(b).in_first_side():
            violations.append(f"edge ({node_label(a)}, {node_label(b)}) is not bipartite")

    for a in G.nodes:
        if not a.is_full() and len(G.neighbors(a.id)) > 1:
            violations.append(f"partial node {node_label(a.id)} is not a leaf")

    k1, k2 = G.sol1.cardinality(), G.sol2.cardinality()
    if total_value(G) != k2 - k1:
        violations.append(f"total value {total_value(G)} != k2 - k1 = {k2 - k1}")

    try: components = classify_components(G)
    except FalsificationError as e:
        violations.append(str(e))
        return violations
    for c in components:
        v = value_of(G, c.nodes)
        partials = len(partial_nodes(G, c))
        if c.kind == EVEN_CYCLE:
            if v != 0: violations.append(f"cycle {c} has value {v}")
            continue
        allowed = {0: {-1, 0, 1}, 1: {Fraction(-1, 2), Fraction(1, 2)}, 2: {0}}.get(partials, set())
        if v not in allowed:
            violations.append(f"path {c} with {partials} partial nodes has value {v}")
    return violations


# --------------------------------------------------------------------------------
# Swap subgraph search

def _opposite_tags(tag):
    return SECOND_TAGS if tag in FIRST_TAGS else FIRST_TAGS


def find_swap_subgraph(G):
    """Marks whole path components until their union is closed, balanced on
    partial copies, and has one more first-side full node than second-side."""
    if total_value(G) < 2:
        raise PreconditionError(f"Total value {total_value(G)} is below 2; no swap is needed.")
    paths = [c for c in classify_components(G) if c.kind == PATH]
    values = [value_of(G, c.nodes) for c in paths]

    for c, v in zip(paths, values):
        if v == 1 and not partial_nodes(G, c):
            log.debug("Full-node path of value 1: %s", c)
            return set(c.nodes)

    marked = [False] * len(paths)
    def mark(n):
        marked[n] = True
        log.debug("Marked %s (value %s)", paths[n], values[n])

    while True:
        start = next((n for n, c in enumerate(paths) if not marked[n] and values[n] == Fraction(1, 2)
                      and partial_nodes(G, c)), None)
        if start is None:
            raise FalsificationError("No unmarked path of value 1/2 with a partial node.")
        mark(start)
        starting = partial_nodes(G, paths[start])
        if len(starting) != 1:
            raise FalsificationError(f"Path {paths[start]} of value 1/2 has {len(starting)} partial nodes.")
        j_star = starting[0]

        while True:
            market, tag = j_star
            targets = [(market, t) for t in _opposite_tags(tag) if G.has_node((market, t))]
            mirror = next((n for n, c in enumerate(paths)
                           if not marked[n] and any(t in c.nodes for t in targets)), None)
            if mirror is None:
                raise FalsificationError(f"No unmarked mirror path for {node_label(j_star)}.")
            mark(mirror)
            mirror_node = next(t for t in targets if t in paths[mirror].nodes)
            partials = partial_nodes(G, paths[mirror])
            if len(partials) == 1:
                if values[mirror] == Fraction(1, 2):
                    chosen = set()
                    for n, c in enumerate(paths):
                        if marked[n]: chosen.update(c.nodes)
                    return chosen
                if values[mirror] == Fraction(-1, 2):
                    break
                raise FalsificationError(f"Mirror path {paths[mirror]} has value {values[mirror]}.")
            if len(partials) == 2:
                j_star = next(a for a in partials if a != mirror_node)
                continue
            raise FalsificationError(f"Mirror path {paths[mirror]} has {len(partials)} partial nodes.")


def verify_swap_set(G, chosen):
    """Checks closure, partial-copy balance and full-node surplus for a node set."""
    chosen = set(chosen)
    closed = all((a in chosen) == (b in chosen) for a, b in G.edges)
    balanced = True
    for j in G.P:
        first = sum(1 for t in FIRST_TAGS if (j, t) in chosen)
        second = sum(1 for t in SECOND_TAGS if (j, t) in chosen)
        if first != second: balanced = False
    w1 = sum(1 for j in G.W1 if (j, FULL_TAG) in chosen)
    w2 = sum(1 for j in G.W2 if (j, FULL_TAG) in chosen)
    full_surplus = (w1 == w2 + 1)
    return Bunch(closed=closed, balanced=balanced, full_surplus=full_surplus,
            holds=closed and balanced and full_surplus)


# --------------------------------------------------------------------------------
# Swapping

class SwapOutcome:
    def __init__(self, sol3, sol4, rho, delta, cardinalities):
        self.sol3 = sol3
        self.sol4 = sol4
        self.rho = rho
        self.delta = delta
        self.cardinalities = cardinalities

    def __repr__(self):
        return f"SwapOutcome(rho={self.rho}, delta={self.delta}, cardinalities={self.cardinalities})"


def _swapped(G, chosen, base, flip_first, keep_tags, moved_tags):
    """One side of the swap.  flip_first is z for chosen first-side full nodes;
    partial copies with keep_tags ship unless chosen, moved_tags ship if chosen."""
    inst = G.inst
    z = dict(base.z)
    for j in G.W1:
        if (j, FULL_TAG) in chosen: z[j] = flip_first
    for j in G.W2:
        if (j, FULL_TAG) in chosen: z[j] = 1 - flip_first
    x = {e: Fraction(0) for e in inst.edges}
    for j in G.F:
        if z[j] == 0:
            for i in G.node((j, FULL_TAG)).suppliers:
                x[(i, j)] += 1
    for j in G.P:
        for tag in keep_tags + moved_tags:
            if not G.has_node((j, tag)): continue
            if ((j, tag) in chosen) == (tag in moved_tags):
                for i in G.node((j, tag)).suppliers:
                    x[(i, j)] += 1
    return complete_solution(inst, x, z)


def apply_swap(G, chosen):
    chosen = set(chosen)
    verdict = verify_swap_set(G, chosen)
    if not verdict.holds:
        raise PreconditionError(f"Node set does not qualify for a swap: {dict(verdict)}")
    sol3 = _swapped(G, chosen, G.sol1, 1, FIRST_TAGS, SECOND_TAGS)
    sol4 = _swapped(G, chosen, G.sol2, 0, SECOND_TAGS, FIRST_TAGS)

    for name, sol in (('third', sol3), ('fourth', sol4)):
        check = check_feasible(G.inst, sol, integral=True)
        if not check.feasible:
            raise FalsificationError(f"The {name} solution is infeasible: " +
                    "; ".join(v.message for v in check.violations))
    k1, k2 = G.sol1.cardinality(), G.sol2.cardinality()
    if (sol3.cardinality(), sol4.cardinality()) != (k1 + 1, k2 - 1):
        raise FalsificationError(
                f"Swap produced cardinalities {sol3.cardinality()}, {sol4.cardinality()} "
                f"from {k1}, {k2}.")
    obj1 = complete_solution(G.inst, G.sol1.x, G.sol1.z).objective
    obj2 = complete_solution(G.inst, G.sol2.x, G.sol2.z).objective
    if sol3.objective - obj1 != -(sol4.objective - obj2):
        raise FalsificationError("Swap objectives are not symmetric.")
    outcome = SwapOutcome(sol3, sol4, rho=obj1, delta=obj1 - sol3.objective,
            cardinalities=(int(k1) + 1, int(k2) - 1))
    log.debug("Swap: %s", outcome)
    return outcome


def edge_property_witness(inst, w_obj, r_obj, sol1, sol2, rng=None):
    """Given two optimal solutions at cardinalities k1 <= k2 - 2, returns an
    optimal solution at cardinality k1 + 1."""
    if not is_unit_supply(inst) or not is_simple(inst):
        raise PreconditionError("Witnesses need a unit-supply simple instance.")
    k1, k2 = sol1.cardinality(), sol2.cardinality()
    if k1 > k2 - 2:
        raise PreconditionError(f"Cardinalities {k1} and {k2} are less than two apart.")
    priced = inst.with_objective(w_obj, r_obj)
    G = build_conflict_graph(priced, sol1, sol2, rng=rng)
    outcome = apply_swap(G, find_swap_subgraph(G))
    if outcome.delta != 0:
        raise FalsificationError(
                f"Swap changed the objective by {format_rational(-outcome.delta)}; "
                "the inputs were not both optimal.")
    return outcome.sol3


def graph_document(G):
    """A JSON-ready dump of nodes, edges and component classification."""
    values = node_values(G)
    components = classify_components(G)
    return {
        'nodes': [{'id': node_label(a.id), 'market': a.market, 'tag': a.copy_tag,
                   'kind': a.kind, 'value': format_rational(values[a.id]),
                   'suppliers': sorted(a.suppliers, key=G.inst.supply_ids.index)}
                  for a in G.nodes],
        'edges': [[node_label(a), node_label(b)]
                  for a, b in sorted(G.edges, key=lambda e: (G.position(e[0]), G.position(e[1])))],
        'components': [{'kind': c.kind, 'nodes': [node_label(a) for a in path_order(G, c)],
                        'value': format_rational(value_of(G, c.nodes))} for c in components],
        'total_value': format_rational(total_value(G)),
    }