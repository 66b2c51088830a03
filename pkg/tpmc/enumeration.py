"""Brute-force oracle: exact optima by enumerating every market selection."""
from fractions import Fraction
import logging

from tpmc.flow import Selection, lexmin_transport, rejection_vectors, transport_table
from tpmc.instance import CapExceededError, complete_solution

log = logging.getLogger(__name__)

ENUMERATION_CAP = 22


def _check_cap(inst, cap):
    if len(inst.market_ids) > cap:
        raise CapExceededError(
                f"{len(inst.market_ids)} markets exceed the enumeration cap of {cap}.")


def selection_values(inst, jobs=1):
    """Yields (z, flow result, objective) for every transport-feasible rejection
    vector, in lexicographic z order."""
    table = transport_table(inst, jobs=jobs)
    for z in rejection_vectors(inst):
        result = table[z]
        if not result.is_optimal(): continue
        value = result.cost + sum((inst.revenues[j] for j, zj in zip(inst.market_ids, z) if zj),
                Fraction(0))
        yield z, result, value


def _solution(inst, z, result):
    return complete_solution(inst, result.flow, dict(zip(inst.market_ids, z)))


def solve_exact(inst, card=None, cap=ENUMERATION_CAP, jobs=1):
    """The optimum subject to an optional cardinality constraint, or None if no
    selection admitted by the constraint can be served.  Among equal objectives
    the lexicographically smallest z wins, then the lexicographically smallest x."""
    _check_cap(inst, cap)
    if card is not None: card.check(inst)
    best = None
    for z, result, value in selection_values(inst, jobs=jobs):
        if card is not None and not card.admits(sum(z)): continue
        if best is None or value < best[2]:
            best = (z, result, value)
    if best is None:
        log.debug("No feasible selection under %s", card)
        return None
    z = best[0]
    return _solution(inst, z, lexmin_transport(inst, Selection.of_rejections(inst, z)))


def optimal_support(inst, w_obj=None, r_obj=None, cap=ENUMERATION_CAP, jobs=1):
    """One optimal solution per optimal cardinality, sorted by cardinality."""
    _check_cap(inst, cap)
    if w_obj is not None or r_obj is not None:
        inst = inst.with_objective(w_obj, r_obj)
    best_value = None
    by_cardinality = {}
    for z, result, value in selection_values(inst, jobs=jobs):
        if best_value is None or value < best_value:
            best_value = value
            by_cardinality = {}
        if value == best_value and sum(z) not in by_cardinality:
            by_cardinality[sum(z)] = (z, result)
    return [(k, _solution(inst, z, result))
            for k, (z, result) in sorted(by_cardinality.items())]


def enumerate_flows(inst, accepted):
    """Every integral flow serving exactly the accepted markets, as dicts over
    all edges.  Flows on an edge never exceed min(s_i, d_j)."""
    markets = [j for j in inst.market_ids if j in accepted]
    used = {i: 0 for i in inst.supply_ids}
    flow = {e: 0 for e in inst.edges}

    def fill_market(m):
        if m == len(markets):
            yield dict(flow)
            return
        j = markets[m]
        yield from fill_edges(m, inst.market_edges(j), 0, inst.demands[j])

    def fill_edges(m, edges, n, remaining):
        if n == len(edges):
            if remaining == 0: yield from fill_market(m+1)
            return
        e = edges[n]
        i = e[0]
        top = min(remaining, inst.supplies[i] - used[i], inst.demands[e[1]])
        for amount in range(top+1):
            flow[e] = amount
            used[i] += amount
            yield from fill_edges(m, edges, n+1, remaining - amount)
            used[i] -= amount
        flow[e] = 0

    yield from fill_market(0)
