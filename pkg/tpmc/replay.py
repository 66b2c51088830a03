"""Golden replays: a fractional vertex of a cardinality-cut bipartite perfect
matching polytope, and a demand-3 instance whose cardinality cut of conv(X)
has a fractional vertex."""
from fractions import Fraction
import logging

from bunch import Bunch

from tpmc.instance import TpmcInstance
from tpmc.point import RationalPoint, solution_index, z_name
from tpmc.polytope import (
        LinearSystem, audit_instance_cut, exposing_objectives, extreme_point_check,
        hull_membership, objective_battery, instance_generators)
from tpmc.rational import format_rational

log = logging.getLogger(__name__)

MATCHING_EDGES = [(1, 4), (1, 5), (2, 4), (2, 5), (2, 6), (3, 5), (3, 6)]


def _edge_name(e):
    return f"x[{e[0]},{e[1]}]"


def perfect_matching_system():
    """Degree equalities of the bipartite graph on {1,2,3} x {4,5,6}, x >= 0,
    and x[1,4] + x[2,5] <= 1."""
    sys = LinearSystem([_edge_name(e) for e in MATCHING_EDGES])
    for v in range(1, 7):
        sys.add_equality({_edge_name(e): 1 for e in MATCHING_EDGES if v in e}, 1, f"degree[{v}]")
    for e in MATCHING_EDGES:
        sys.add_inequality({_edge_name(e): -1}, 0, f"nonneg[{_edge_name(e)}]")
    sys.add_inequality({_edge_name((1, 4)): 1, _edge_name((2, 5)): 1}, 1, "cut")
    return sys


def fractional_matching_point():
    half = Fraction(1, 2)
    values = {(1, 4): half, (1, 5): half, (2, 4): half, (2, 5): half,
              (2, 6): 0, (3, 5): 0, (3, 6): 1}
    return RationalPoint([_edge_name(e) for e in MATCHING_EDGES],
            [values[e] for e in MATCHING_EDGES])


def demand_three_instance(cost=1, revenue=10):
    """Six unit supplies, markets 1..3 with demand 2 and market 4 with demand 3."""
    supply_ids = [str(i) for i in range(1, 7)]
    market_ids = [str(j) for j in range(1, 5)]
    edges = [(str(i), str(j)) for i, j in
             [(1, 1), (2, 2), (3, 3), (4, 1), (4, 4), (5, 2), (5, 4), (6, 3), (6, 4)]]
    return TpmcInstance(supply_ids, market_ids,
            {i: 1 for i in supply_ids}, {'1': 2, '2': 2, '3': 2, '4': 3},
            edges, {e: cost for e in edges}, {j: revenue for j in market_ids})


def all_halves_point(inst):
    return RationalPoint(solution_index(inst), [Fraction(1, 2)] * (len(inst.edges) + len(inst.market_ids)))


def _certificate_document(verdict, generators):
    if verdict.inside:
        return {'verdict': 'IN', 'weights': [
            {'generator': [format_rational(v) for v in g], 'weight': format_rational(w)}
            for g, w in zip(generators, verdict.weights) if w != 0]}
    a, b = verdict.hyperplane
    return {'verdict': 'OUT', 'a': [format_rational(v) for v in a], 'b': format_rational(b)}


def replay_matching_vertex():
    report = extreme_point_check(fractional_matching_point(), perfect_matching_system())
    report.passed = report.extreme and report.rank == 7
    return report


def replay_demand_three(k=2, battery_seed=0):
    inst = demand_three_instance()
    p = all_halves_point(inst)
    generators, cards, z_positions = instance_generators(inst)
    cut = sum(p[z_name(j)] for j in inst.market_ids)
    in_hull = hull_membership(p, generators)
    admitted = [g for g, card in zip(generators, cards) if card <= k]
    in_cut_hull = hull_membership(p, admitted)
    objectives = objective_battery(len(p), z_positions, seed=battery_seed)
    exposing = exposing_objectives(p, generators, cards, k, objectives)
    audit = audit_instance_cut(inst, k, battery_seed=battery_seed)
    vacuous = audit_instance_cut(inst, len(inst.market_ids), battery_seed=battery_seed)
    passed = (in_hull.inside and cut <= k and not in_cut_hull.inside
              and not audit.holds and vacuous.holds)
    return Bunch(
            k=k,
            relaxed=_certificate_document(in_hull, generators),
            cardinality=format_rational(cut),
            integer_hull=_certificate_document(in_cut_hull, admitted),
            exposing_objectives=[[format_rational(v) for v in objectives[n]] for n in exposing],
            audit_holds=audit.holds,
            gaps=len(audit.gaps),
            vacuous_audit_holds=vacuous.holds,
            passed=passed)


def replay_examples(battery_seed=0):
    first = replay_matching_vertex()
    second = replay_demand_three(battery_seed=battery_seed)
    log.info("Replays: matching vertex %s, demand-three %s", first.passed, second.passed)
    return Bunch(matching_vertex=Bunch(extreme=first.extreme, rank=first.rank, dim=first.dim,
                                       tight=first.tight, passed=first.passed),
                 demand_three=second,
                 passed=first.passed and second.passed)
