"""Cardinality-constrained simple TPMC by a Lagrangian penalty on the number of
rejected markets plus swaps along the edge property.

For a multiplier lam the inner problem minimizes w.x + sum((r_j + sign*lam) z_j)
and reports the lowest and highest cardinality among its optima.  The
multiplier is moved until that interval contains the bound k; every
cardinality in between is then optimal as well, and swaps walk from the
lowest optimum to one with exactly k rejections.
"""
from fractions import Fraction
import functools
import logging

from bunch import Bunch

from tpmc.conflict import edge_property_witness
from tpmc.enumeration import ENUMERATION_CAP, optimal_support
from tpmc.flow import transport_table
from tpmc.instance import (
        AT_LEAST, AT_MOST, EXACTLY, CardinalitySense, FalsificationError, PreconditionError,
        complete_solution, is_simple, merge_solution, split_supplies)
from tpmc.rational import format_rational

log = logging.getLogger(__name__)


def multiplier_bound(inst):
    """Above this multiplier the penalty dominates any objective difference
    between two solutions of a unit-supply instance."""
    return (sum((abs(w) for w in inst.costs.values()), Fraction(0)) +
            sum((abs(r) for r in inst.revenues.values()), Fraction(0)) + 1)


def penalized(inst, sign, lam):
    return inst.with_objective(revenues={j: r + sign*lam for j, r in inst.revenues.items()})


def min_rejections(inst, jobs=1):
    """The fewest rejections of any transport-feasible selection."""
    table = transport_table(inst, jobs=jobs)
    return min(sum(z) for z, result in table.items() if result.is_optimal())


class _Probe:
    """Inner optima at one multiplier: the lowest and highest cardinality ones."""
    def __init__(self, inst, sign, lam, inner):
        self.lam = lam
        self.priced = penalized(inst, sign, lam)
        support = inner(self.priced)
        assert support, "Inner solver found no optimum; rejecting everything is always feasible."
        (self.cmin, self.low), (self.cmax, self.high) = support[0], support[-1]
        # Unpenalized values, the intercepts of the two supporting lines.
        self.low_base = complete_solution(inst, self.low.x, self.low.z).objective
        self.high_base = complete_solution(inst, self.high.x, self.high.z).objective

    def straddles(self, k):
        return self.cmin <= k <= self.cmax

    def record(self):
        return Bunch(multiplier=format_rational(self.lam), cmin=self.cmin, cmax=self.cmax)


def _walk(priced, start, partner, k, trace):
    """Swaps upward from start until the cardinality reaches k; partner is an
    optimum with cardinality at least k."""
    current = start
    while current.cardinality() < k:
        if partner.cardinality() - current.cardinality() < 2:
            # Adjacent cardinalities: partner itself sits at k.
            current = partner
        else:
            current = edge_property_witness(priced, None, None, current, partner)
        trace.append(int(current.cardinality()))
    return current



def solve_cc(inst, card, inner=None, cap=ENUMERATION_CAP, jobs=1):
    """An optimal solution of a simple instance under a cardinality constraint,
    with its certificate; the solution is None when the constraint is infeasible."""
    if not is_simple(inst):
        raise PreconditionError("The cardinality solver needs every demand to be at most 2.")
    card.check(inst)
    if inner is None:
        inner = functools.partial(optimal_support, cap=cap, jobs=jobs)
    split, mapping = split_supplies(inst)
    k = card.k
    cert = Bunch(sense=card.sense, k=k, status='optimal', sign=0, multiplier=0,
            straddle=None, penalized_value=None, iterations=[], swap_trace=[])

    fewest = min_rejections(split, jobs=jobs)
    if card.sense != AT_LEAST and fewest > k:
        log.debug("%s is infeasible: at least %d rejections needed", card, fewest)
        cert.status = 'infeasible'
        cert.min_rejections = fewest
        return None, cert

    probe = _Probe(split, 0, Fraction(0), inner)
    cert.iterations.append(probe.record())
    chosen = None
    if card.sense == AT_MOST and probe.cmin <= k:
        chosen = probe.low
    elif card.sense == AT_LEAST and probe.cmax >= k:
        chosen = probe.high
    elif probe.straddles(k):
        chosen = _walk(probe.priced, probe.low, probe.high, k, cert.swap_trace)
    else:
        sign = 1 if probe.cmin > k else -1
        probe = _search(split, sign, k, probe, inner, cert)
        cert.sign = sign
        chosen = _walk(probe.priced, probe.low, probe.high, k, cert.swap_trace)

    cert.multiplier = format_rational(probe.lam)
    cert.straddle = [probe.cmin, probe.cmax]
    cert.penalized_value = format_rational(probe.low.objective)
    base = complete_solution(split, chosen.x, chosen.z)
    sol = merge_solution(mapping, base)
    assert card.admits(sol.cardinality()), f"Solver returned cardinality {sol.cardinality()} for {card}"
    log.debug("Solved %s: objective %s at multiplier %s", card, sol.objective, probe.lam)
    return sol, cert


def _search(split, sign, k, start, inner, cert):
    """Moves the multiplier until the optimal cardinalities straddle k.  Each new
    multiplier is where the supporting lines of the current bracket meet, so the
    search visits each breakpoint of the penalized value at most once."""
    lo = start
    hi = _Probe(split, sign, multiplier_bound(split), inner)
    cert.iterations.append(hi.record())
    if hi.straddles(k): return hi
    def toward_hi(p):
        # Still on the starting side of k.
        return p.cmin > k if sign > 0 else p.cmax < k
    assert toward_hi(lo) and not toward_hi(hi), "Multiplier bound does not bracket the target."

    for _ in range(len(split.market_ids) + 2):
        # Lines leaving the bracket ends inward: at lo the optimum whose value
        # grows slowest in lam, at hi the one growing fastest.
        c_lo, b_lo = (lo.cmin, lo.low_base) if sign > 0 else (lo.cmax, lo.high_base)
        c_hi, b_hi = (hi.cmax, hi.high_base) if sign > 0 else (hi.cmin, hi.low_base)
        lam = (b_hi - b_lo) / (sign * (c_lo - c_hi))
        if not lo.lam < lam < hi.lam:
            raise FalsificationError(f"Line intersection {lam} left the bracket [{lo.lam}, {hi.lam}].")
        probe = _Probe(split, sign, lam, inner)
        cert.iterations.append(probe.record())
        log.debug("Multiplier %s: optimal cardinalities %d..%d", lam, probe.cmin, probe.cmax)
        if probe.straddles(k): return probe
        if toward_hi(probe): lo = probe
        else: hi = probe
    raise FalsificationError(f"Multiplier search for k={k} did not close; a duality gap remains.")


def sweep_cardinality(inst, inner=None, cap=ENUMERATION_CAP, jobs=1):
    """Optimal value for every exact rejection count, None where infeasible."""
    rows = []
    for k in range(len(inst.market_ids) + 1):
        sol, _ = solve_cc(inst, CardinalitySense(EXACTLY, k), inner=inner, cap=cap, jobs=jobs)
        rows.append((k, None if sol is None else sol.objective))
    return rows
