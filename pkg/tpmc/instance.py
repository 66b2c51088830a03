"""Transportation problem with market choice: instances, solutions and the
document formats they travel in.

An instance is a bipartite graph between supply nodes (capacity s_i) and
markets (demand d_j, lost revenue r_j) with a shipping cost w_ij on every
edge.  A solution ships x_ij along edges and rejects markets with z_j = 1;
its objective is sum(w_ij x_ij) + sum(r_j z_j).
"""
import json
import logging
import re
from fractions import Fraction

from bunch import Bunch
import numpy as np

from tpmc.rational import (
        format_rational, is_integral, parse_rational, rational_range_inclusive)

log = logging.getLogger(__name__)

AT_MOST = '<='
EXACTLY = '='
AT_LEAST = '>='
SENSES = (AT_MOST, EXACTLY, AT_LEAST)


# --------------------------------------------------------------------------------
# Errors

class TpmcError(Exception):
    pass

class InstanceError(TpmcError, ValueError):
    pass

class InfeasibleSolutionError(TpmcError):
    pass

class CapExceededError(TpmcError):
    pass

class PreconditionError(TpmcError):
    pass

class FalsificationError(TpmcError, AssertionError):
    """A check failed that the underlying theory says can never fail."""
    pass


# --------------------------------------------------------------------------------
# Data model

class TpmcInstance:
    def __init__(self, supply_ids, market_ids, supplies, demands, edges, costs, revenues):
        self.supply_ids = tuple(supply_ids)
        self.market_ids = tuple(market_ids)
        self.edges = tuple(tuple(e) for e in edges)
        _validate(self.supply_ids, self.market_ids, supplies, demands, self.edges, costs, revenues)
        self.supplies = {i: int(supplies[i]) for i in self.supply_ids}
        self.demands = {j: int(demands[j]) for j in self.market_ids}
        self.costs = {e: Fraction(costs[e]) for e in self.edges}
        self.revenues = {j: Fraction(revenues[j]) for j in self.market_ids}

        self._at_market = {j: [] for j in self.market_ids}
        self._at_supply = {i: [] for i in self.supply_ids}
        for e in self.edges:
            self._at_supply[e[0]].append(e)
            self._at_market[e[1]].append(e)

    def market_edges(self, j):
        return self._at_market[j]

    def supply_edges(self, i):
        return self._at_supply[i]

    def with_objective(self, costs=None, revenues=None):
        """The same feasible set under another linear objective."""
        new_costs = dict(self.costs)
        new_revenues = dict(self.revenues)
        if costs is not None: new_costs.update(costs)
        if revenues is not None: new_revenues.update(revenues)
        return TpmcInstance(self.supply_ids, self.market_ids, self.supplies,
                self.demands, self.edges, new_costs, new_revenues)

    def key(self):
        return (self.supply_ids, self.market_ids,
                tuple(self.supplies[i] for i in self.supply_ids),
                tuple(self.demands[j] for j in self.market_ids),
                self.edges,
                tuple(self.costs[e] for e in self.edges),
                tuple(self.revenues[j] for j in self.market_ids))

    def __eq__(self, other):
        return isinstance(other, TpmcInstance) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return (f"TpmcInstance(|V1|={len(self.supply_ids)}, "
                f"|V2|={len(self.market_ids)}, |E|={len(self.edges)})")


def _validate(supply_ids, market_ids, supplies, demands, edges, costs, revenues):
    if len(set(supply_ids)) != len(supply_ids):
        raise InstanceError("Duplicate supply id.")
    if len(set(market_ids)) != len(market_ids):
        raise InstanceError("Duplicate market id.")
    for i in supply_ids:
        s = supplies.get(i)
        if isinstance(s, bool) or not isinstance(s, (int, np.integer)) or s < 1:
            raise InstanceError(f"Supply {i}: capacity must be a positive integer, got {s!r}")
    for j in market_ids:
        d = demands.get(j)
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
            raise InstanceError(f"Market {j}: demand must be a positive integer, got {d!r}")
        if j not in revenues:
            raise InstanceError(f"Market {j}: missing lost revenue.")
    supply_set, market_set = set(supply_ids), set(market_ids)
    seen = set()
    for e in edges:
        i, j = e
        if i not in supply_set: raise InstanceError(f"Edge ({i},{j}): unknown supply node {i}")
        if j not in market_set: raise InstanceError(f"Edge ({i},{j}): unknown market {j}")
        if e in seen: raise InstanceError(f"Duplicate edge ({i},{j})")
        if e not in costs: raise InstanceError(f"Edge ({i},{j}): missing cost.")
        seen.add(e)


class Solution:
    """Edge flows x and market rejections z.  z is 0/1 for integral solutions and
    anywhere in [0,1] for relaxed points."""
    def __init__(self, x, z, objective=None):
        self.x = {tuple(e): Fraction(v) for e, v in x.items()}
        self.z = {j: Fraction(v) for j, v in z.items()}
        self.objective = None if objective is None else Fraction(objective)

    def cardinality(self):
        return sum(self.z.values(), Fraction(0))

    def accepted(self):
        """S(z): the markets whose demand is met."""
        return [j for j, v in self.z.items() if v == 0]

    def is_integral(self):
        return (all(is_integral(v) for v in self.x.values()) and
                all(v in (0, 1) for v in self.z.values()))

    def __eq__(self, other):
        return (isinstance(other, Solution) and self.x == other.x and
                self.z == other.z and self.objective == other.objective)

    def __repr__(self):
        return f"Solution(objective={self.objective}, cardinality={self.cardinality()})"


def complete_solution(inst, x, z):
    """Fills in zero flows for unlisted edges and sets the objective."""
    full_x = {e: Fraction(x.get(e, 0)) for e in inst.edges}
    full_z = {j: Fraction(z[j]) for j in inst.market_ids}
    sol = Solution(full_x, full_z)
    sol.objective = evaluate_objective(inst, sol)
    return sol


class CardinalitySense:
    """A cardinality constraint on the number of rejected markets."""
    _pattern = re.compile(r'\s*(<=|>=|=)\s*(\d+)\s*$')

    def __init__(self, sense, k):
        if sense not in SENSES: raise ValueError(f"Unknown sense: {sense}")
        if isinstance(k, bool) or int(k) != k or k < 0:
            raise ValueError(f"Cardinality bound must be a nonnegative integer, got {k!r}")
        self.sense = sense
        self.k = int(k)

    @classmethod
    def parse(cls, s):
        m = cls._pattern.match(s)
        if not m: raise ValueError(f"Unparsable cardinality constraint: {s!r}")
        return cls(m.group(1), int(m.group(2)))

    def admits(self, count):
        if self.sense == AT_MOST: return count <= self.k
        if self.sense == AT_LEAST: return count >= self.k
        return count == self.k

    def check(self, inst):
        if self.k > len(inst.market_ids):
            raise PreconditionError(
                    f"Cardinality bound {self.k} exceeds the {len(inst.market_ids)} markets.")

    def __eq__(self, other):
        return (isinstance(other, CardinalitySense) and
                (self.sense, self.k) == (other.sense, other.k))

    def __hash__(self):
        return hash((self.sense, self.k))

    def __str__(self):
        return f"{self.sense}{self.k}"

    __repr__ = __str__


class SplitMapping:
    """Maps each unit-capacity copy back to the supply node it was split from."""
    def __init__(self, original, split, origin):
        self.original = original
        self.split = split
        self.origin = dict(origin)
        self.copies = {i: [] for i in original.supply_ids}
        for c in split.supply_ids:
            self.copies[self.origin[c]].append(c)
        for i, cs in self.copies.items():
            assert len(cs) == original.supplies[i], f"Fiber of {i} has the wrong size."


# --------------------------------------------------------------------------------
# Documents

def _load_document(text):
    try: doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"Syntax error at line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(doc, dict):
        raise InstanceError("Syntax error at line 1: document must be an object.")
    return doc


def _field(item, key, where):
    if not isinstance(item, dict) or key not in item:
        raise InstanceError(f"{where}: missing '{key}'")
    return item[key]


def _node_id(v, where):
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise InstanceError(f"{where}: ids must be strings or integers, got {v!r}")
    return str(v)


def _rational(v, where):
    q = parse_rational(v)
    if q is None: raise InstanceError(f"{where}: unparsable rational {v!r}")
    return q


def _list(doc, key):
    v = doc.get(key, [])
    if not isinstance(v, list): raise InstanceError(f"'{key}' must be a list.")
    return v


def parse_instance(text):
    """Reads an instance document (see README.md for the grammar)."""
    doc = _load_document(text)
    supply_ids, supplies = [], {}
    for n, item in enumerate(_list(doc, 'supplies')):
        where = f"supplies[{n}]"
        i = _node_id(_field(item, 'id', where), where)
        if i in supplies: raise InstanceError(f"{where}: duplicate supply id {i}")
        supply_ids.append(i)
        supplies[i] = _field(item, 's', where)
    market_ids, demands, revenues = [], {}, {}
    for n, item in enumerate(_list(doc, 'markets')):
        where = f"markets[{n}]"
        j = _node_id(_field(item, 'id', where), where)
        if j in demands: raise InstanceError(f"{where}: duplicate market id {j}")
        market_ids.append(j)
        demands[j] = _field(item, 'd', where)
        revenues[j] = _rational(_field(item, 'r', where), where)
    edges, costs = [], {}
    for n, item in enumerate(_list(doc, 'edges')):
        where = f"edges[{n}]"
        e = (_node_id(_field(item, 'from', where), where),
             _node_id(_field(item, 'to', where), where))
        edges.append(e)
        costs[e] = _rational(_field(item, 'w', where), where)
    return TpmcInstance(supply_ids, market_ids, supplies, demands, edges, costs, revenues)


def instance_document(inst):
    return {
        'supplies': [{'id': i, 's': inst.supplies[i]} for i in inst.supply_ids],
        'markets': [{'id': j, 'd': inst.demands[j], 'r': format_rational(inst.revenues[j])}
            for j in inst.market_ids],
        'edges': [{'from': i, 'to': j, 'w': format_rational(inst.costs[(i, j)])}
            for i, j in inst.edges]}


def serialize_instance(inst):
    return json.dumps(instance_document(inst), indent=2) + "\n"


def solution_document(sol, inst=None):
    edges = inst.edges if inst is not None else list(sol.x)
    markets = inst.market_ids if inst is not None else list(sol.z)
    doc = {
        'x': [{'from': i, 'to': j, 'value': format_rational(sol.x.get((i, j), 0))}
            for i, j in edges],
        'z': [{'id': j, 'value': format_rational(sol.z[j])} for j in markets]}
    if sol.objective is not None:
        doc['objective'] = format_rational(sol.objective)
    return doc


def serialize_solution(sol, inst=None):
    return json.dumps(solution_document(sol, inst), indent=2) + "\n"


def parse_solution(text, inst):
    """Reads a solution document against an instance.  Unlisted flows are 0."""
    doc = _load_document(text)
    edge_set = set(inst.edges)
    x = {}
    for n, item in enumerate(_list(doc, 'x')):
        where = f"x[{n}]"
        e = (_node_id(_field(item, 'from', where), where),
             _node_id(_field(item, 'to', where), where))
        if e not in edge_set: raise InstanceError(f"{where}: unknown edge {e}")
        x[e] = _rational(_field(item, 'value', where), where)
    z = {}
    for n, item in enumerate(_list(doc, 'z')):
        where = f"z[{n}]"
        j = _node_id(_field(item, 'id', where), where)
        if j not in inst.demands: raise InstanceError(f"{where}: unknown market {j}")
        z[j] = _rational(_field(item, 'value', where), where)
    missing = [j for j in inst.market_ids if j not in z]
    if missing: raise InstanceError(f"Solution has no z value for markets {missing}")
    sol = complete_solution(inst, x, z)
    if 'objective' in doc:
        stated = _rational(doc['objective'], 'objective')
        if stated != sol.objective:
            raise InstanceError(f"Stated objective {stated} != evaluated {sol.objective}")
    return sol


# --------------------------------------------------------------------------------
# Evaluation

def evaluate_objective(inst, sol):
    if set(sol.x) != set(inst.edges) or set(sol.z) != set(inst.market_ids):
        raise InstanceError("Solution is not indexed by the instance's edges and markets.")
    total = Fraction(0)
    for e in inst.edges:
        total += inst.costs[e] * sol.x[e]
    for j in inst.market_ids:
        total += inst.revenues[j] * sol.z[j]
    return total


def _violation(kind, at, message):
    return Bunch(kind=kind, at=at, message=message)


def check_feasible(inst, sol, integral=False):
    """Checks the demand, supply and domain constraints.  Never raises: every
    violated constraint is reported."""
    violations = []
    edge_set = set(inst.edges)
    for e in sol.x:
        if e not in edge_set:
            violations.append(_violation('index', e, f"x has unknown edge {e}"))
    for j in sol.z:
        if j not in inst.demands:
            violations.append(_violation('index', j, f"z has unknown market {j}"))
    def flow(e): return sol.x.get(e, Fraction(0))

    for e in inst.edges:
        v = flow(e)
        if v < 0:
            violations.append(_violation('nonnegativity', e, f"x{e} = {v} < 0"))
        if integral and not is_integral(v):
            violations.append(_violation('integrality', e, f"x{e} = {v} is fractional"))
    for j in inst.market_ids:
        if j not in sol.z:
            violations.append(_violation('index', j, f"z has no value for market {j}"))
            continue
        zj = sol.z[j]
        if zj < 0 or zj > 1:
            violations.append(_violation('bounds', j, f"z[{j}] = {zj} outside [0,1]"))
        if integral and zj not in (0, 1):
            violations.append(_violation('integrality', j, f"z[{j}] = {zj} is not 0/1"))
        shipped = sum((flow(e) for e in inst.market_edges(j)), Fraction(0))
        required = inst.demands[j] * (1 - zj)
        if shipped != required:
            violations.append(_violation('demand', j,
                f"market {j} receives {shipped}, needs {required}"))
    for i in inst.supply_ids:
        shipped = sum((flow(e) for e in inst.supply_edges(i)), Fraction(0))
        if shipped > inst.supplies[i]:
            violations.append(_violation('supply', i,
                f"supply {i} ships {shipped}, capacity {inst.supplies[i]}"))
    return Bunch(feasible=not violations, violations=violations)


def is_simple(inst):
    return all(d <= 2 for d in inst.demands.values())


def is_unit_supply(inst):
    return all(s == 1 for s in inst.supplies.values())


# --------------------------------------------------------------------------------
# Supply splitting

def split_supplies(inst):
    """Replaces every supply node i by s_i unit copies "<i>#1".."<i>#s_i", each
    inheriting i's edges and costs.  Unit supplies keep their id."""
    supply_ids, supplies, origin, copies = [], {}, {}, {}
    for i in inst.supply_ids:
        s = inst.supplies[i]
        names = [i] if s == 1 else [f"{i}#{c}" for c in range(1, s+1)]
        copies[i] = names
        for c in names:
            if c in origin: raise InstanceError(f"Split copy {c} collides with an existing id.")
            supply_ids.append(c)
            supplies[c] = 1
            origin[c] = i
    if len(set(supply_ids)) != len(supply_ids):
        raise InstanceError("Split copy names collide with existing supply ids.")
    edges, costs = [], {}
    for i, j in inst.edges:
        for c in copies[i]:
            edges.append((c, j))
            costs[(c, j)] = inst.costs[(i, j)]
    split = TpmcInstance(supply_ids, inst.market_ids, supplies, inst.demands,
            edges, costs, inst.revenues)
    return split, SplitMapping(inst, split, origin)


def merge_solution(mapping, sol):
    """Sums the flows of the copies back onto the original edges."""
    verdict = check_feasible(mapping.split, sol)
    if not verdict.feasible:
        raise InfeasibleSolutionError(
                "Cannot merge an infeasible split solution: " +
                "; ".join(v.message for v in verdict.violations))
    x = {e: Fraction(0) for e in mapping.original.edges}
    for (c, j), v in sol.x.items():
        x[(mapping.origin[c], j)] += v
    merged = Solution(x, sol.z)
    merged.objective = evaluate_objective(mapping.original, merged)
    if sol.objective is not None:
        assert merged.objective == sol.objective, "Merging changed the objective."
    return merged


# --------------------------------------------------------------------------------
# Random instances

def random_instance(seed, sizes, demand_cap=2, density=Fraction(1, 2),
        cost_range=(0, 10), revenue_range=(0, 20), supply_cap=1, denominator=1):
    """A reproducible random instance.  Every market gets at least one edge
    whenever there is a supply node to connect it to."""
    n1, n2 = sizes
    if n1 < 0 or n2 < 0: raise ValueError("Sizes must be nonnegative.")
    density = Fraction(density)
    if not 0 < density <= 1: raise ValueError("Density must lie in (0, 1].")
    rng = np.random.default_rng(seed)

    supply_ids = [f"s{n}" for n in range(1, n1+1)]
    market_ids = [f"m{n}" for n in range(1, n2+1)]
    supplies = {i: int(rng.integers(1, supply_cap+1)) for i in supply_ids}
    demands = {j: int(rng.integers(1, demand_cap+1)) for j in market_ids}
    cost_values = rational_range_inclusive(cost_range[0], cost_range[1], denominator)
    revenue_values = rational_range_inclusive(revenue_range[0], revenue_range[1], denominator)
    revenues = {j: revenue_values[int(rng.integers(len(revenue_values)))] for j in market_ids}

    chosen = set()
    for a in range(n1):
        for b in range(n2):
            if rng.integers(density.denominator) < density.numerator:
                chosen.add((a, b))
    if n1 > 0:
        for b in range(n2):
            if not any((a, b) in chosen for a in range(n1)):
                chosen.add((int(rng.integers(n1)), b))
    edges = [(supply_ids[a], market_ids[b]) for a, b in sorted(chosen)]
    costs = {e: cost_values[int(rng.integers(len(cost_values)))] for e in edges}
    return TpmcInstance(supply_ids, market_ids, supplies, demands, edges, costs, revenues)
