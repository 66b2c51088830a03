"""Exact polyhedral checks on tiny instances: integral point enumeration, convex
hull membership with separating certificates, extreme-point certification and
the cardinality-cut integrality audits."""
from fractions import Fraction
import functools
import itertools
import logging
import operator

from bunch import Bunch
import numpy as np
import sympy

from tpmc.enumeration import enumerate_flows
from tpmc.flow import Selection, rejection_vectors
from tpmc.instance import CapExceededError, FalsificationError, PreconditionError
from tpmc.matching import all_matchings, market_name
from tpmc.point import RationalPoint, combination, solution_index, x_name, z_name
from tpmc.simplex import OPTIMAL, solve_lp

log = logging.getLogger(__name__)

POINT_CAP = 10**6
GENERATOR_CAP = 5000
DIMENSION_CAP = 14
AUDIT_EDGE_CAP = 10
RANDOM_OBJECTIVES = 64


class LinearSystem:
    """Rows a.p = b (equalities) and a.p <= b (inequalities) over a named index."""
    def __init__(self, index):
        self.index = tuple(index)
        self._position = {name: n for n, name in enumerate(self.index)}
        self.equalities = []
        self.inequalities = []

    @property
    def dim(self):
        return len(self.index)

    def _row(self, coefficients, rhs, label):
        a = [Fraction(0)] * self.dim
        for name, v in coefficients.items():
            a[self._position[name]] += Fraction(v)
        return Bunch(a=a, b=Fraction(rhs), label=label)

    def add_equality(self, coefficients, rhs, label):
        self.equalities.append(self._row(coefficients, rhs, label))

    def add_inequality(self, coefficients, rhs, label):
        self.inequalities.append(self._row(coefficients, rhs, label))

    def violations(self, p):
        assert p.index() == self.index, "Point and system live in different spaces."
        bad = [row.label for row in self.equalities if p.dot(row.a) != row.b]
        bad += [row.label for row in self.inequalities if p.dot(row.a) > row.b]
        return bad

    def tight_rows(self, p):
        return self.equalities + [row for row in self.inequalities if p.dot(row.a) == row.b]


def tpmc_system(inst, k=None):
    """Demand equalities, supply and box inequalities, and optionally sum(z) <= k."""
    sys = LinearSystem(solution_index(inst))
    for j in inst.market_ids:
        row = {x_name(e): 1 for e in inst.market_edges(j)}
        row[z_name(j)] = inst.demands[j]
        sys.add_equality(row, inst.demands[j], f"demand[{j}]")
    for i in inst.supply_ids:
        sys.add_inequality({x_name(e): 1 for e in inst.supply_edges(i)}, inst.supplies[i],
                f"supply[{i}]")
    for e in inst.edges:
        sys.add_inequality({x_name(e): -1}, 0, f"nonneg[{x_name(e)}]")
    for j in inst.market_ids:
        sys.add_inequality({z_name(j): -1}, 0, f"nonneg[{z_name(j)}]")
        sys.add_inequality({z_name(j): 1}, 1, f"upper[{z_name(j)}]")
    if k is not None:
        sys.add_inequality({z_name(j): 1 for j in inst.market_ids}, k, "cardinality")
    return sys


# --------------------------------------------------------------------------------
# Points and hulls

def enumerate_integral_points(inst, cap=POINT_CAP):
    """All integral feasible (x, z), sorted by coordinates."""
    bound = functools.reduce(operator.mul,
            (1 + min(inst.supplies[i], inst.demands[j]) for i, j in inst.edges), 1)
    if bound > cap:
        raise CapExceededError(f"Up to {bound} integral points exceed the cap of {cap}.")
    index = solution_index(inst)
    points = set()
    for z in rejection_vectors(inst):
        for flow in enumerate_flows(inst, Selection.of_rejections(inst, z)):
            points.add(RationalPoint(index, [flow[e] for e in inst.edges] + list(z)))
    return sorted(points)


def hull_membership(p, generators):
    """IN with convex weights reproducing p, or OUT with (a, b) such that
    a.p > b and a.g <= b for every generator."""
    if not generators:
        raise PreconditionError("Hull membership needs at least one generator.")
    dim = len(p)
    assert all(len(g) == dim for g in generators), "Generators differ in dimension."
    for n, g in enumerate(generators):
        if g == p:
            weights = [Fraction(int(m == n)) for m in range(len(generators))]
            return Bunch(inside=True, weights=weights, hyperplane=None)

    A_eq = [[g[c] for g in generators] for c in range(dim)] + [[1]*len(generators)]
    b_eq = list(p) + [1]
    lp = solve_lp([0]*len(generators), A_eq, b_eq)
    if lp.status == OPTIMAL:
        weights = lp.x
        if combination(generators, weights) != p or sum(weights) != 1:
            raise FalsificationError("Convex weights do not reproduce the point.")
        return Bunch(inside=True, weights=weights, hyperplane=None)

    # Separation: maximize a.p - b over a in [-1, 1]^dim, a.g <= b.
    # Variables: a+ (dim), a- (dim), b+, b-.
    width = 2*dim + 2
    def row(coeffs, b_sign):
        return list(coeffs) + [-c for c in coeffs] + [b_sign, -b_sign]
    A_ub = [row(g, -1) for g in generators]
    b_ub = [0] * len(generators)
    for c in range(2*dim):
        A_ub.append([int(n == c) for n in range(width)])
        b_ub.append(1)
    cost = [-v for v in row(p, -1)]
    lp = solve_lp(cost, A_ub=A_ub, b_ub=b_ub)
    if lp.status != OPTIMAL or lp.value >= 0:
        raise FalsificationError("Point is outside the hull but no separating hyperplane was found.")
    a = [lp.x[c] - lp.x[dim+c] for c in range(dim)]
    b = lp.x[2*dim] - lp.x[2*dim+1]
    if not (p.dot(a) > b and all(g.dot(a) <= b for g in generators)):
        raise FalsificationError("Separating hyperplane does not separate.")
    return Bunch(inside=False, weights=None, hyperplane=(a, b))


def extreme_point_check(p, sys):
    """Whether the constraints tight at p have full rank."""
    bad = sys.violations(p)
    if bad:
        raise PreconditionError(f"Point violates {bad}")
    tight = sys.tight_rows(p)
    if tight:
        matrix = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row.a]
                               for row in tight])
        rank = matrix.rank()
    else:
        rank = 0
    return Bunch(extreme=(rank == sys.dim), rank=rank, dim=sys.dim,
            tight=[row.label for row in tight])


# --------------------------------------------------------------------------------
# Cardinality-cut audits

def objective_battery(dim, z_positions, seed=0, random_objectives=RANDOM_OBJECTIVES):
    """Every +-1 pattern on the z coordinates (other coordinates 0), then seeded
    random rational objectives on all coordinates."""
    battery = []
    for signs in itertools.product((-1, 1), repeat=len(z_positions)):
        c = [Fraction(0)] * dim
        for pos, s in zip(z_positions, signs):
            c[pos] = Fraction(s)
        battery.append(c)
    rng = np.random.default_rng(seed)
    for _ in range(random_objectives):
        battery.append([Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))
                        for _ in range(dim)])
    return battery


def _lifted_optimum(generators, cards, c, k):
    """Min of c over conv(generators) cut by card <= k, as (value, point) or None.
    Only the cheapest generator of each cardinality can carry weight."""
    cheapest = {}
    for g, card in zip(generators, cards):
        cost = g.dot(c)
        if card not in cheapest or cost < cheapest[card][0]:
            cheapest[card] = (cost, g)
    keys = sorted(cheapest)
    lp = solve_lp([cheapest[q][0] for q in keys], A_eq=[[1]*len(keys)], b_eq=[1],
            A_ub=[keys], b_ub=[k])
    if lp.status != OPTIMAL: return None
    point = combination([cheapest[q][1] for q in keys], lp.x)
    return lp.value, point


def audit_cardinality_cut(generators, cards, k, objectives):
    """Compares, objective by objective, the optimum over conv(generators) cut
    by card <= k against the best generator with card <= k."""
    gaps = []
    for n, c in enumerate(objectives):
        lifted = _lifted_optimum(generators, cards, c, k)
        admitted = [g.dot(c) for g, card in zip(generators, cards) if card <= k]
        integral = min(admitted) if admitted else None
        if lifted is None:
            assert integral is None, "Integral point found where the relaxation is empty."
            continue
        value, point = lifted
        if integral is None or value < integral:
            gaps.append(Bunch(objective=n, lp_value=value, integral_value=integral, point=point))
    verdict = Bunch(holds=not gaps, k=k, checked=len(objectives), gaps=gaps)
    log.info("Cardinality cut k=%s: %s over %d objectives", k,
            'holds' if verdict.holds else f'{len(gaps)} gaps', len(objectives))
    return verdict


def exposing_objectives(p, generators, cards, k, objectives):
    """Indices of the objectives at which p attains the lifted optimum."""
    exposing = []
    for n, c in enumerate(objectives):
        lifted = _lifted_optimum(generators, cards, c, k)
        if lifted is not None and p.dot(c) == lifted[0]:
            exposing.append(n)
    return exposing


def z_cardinality(p, z_positions):
    return sum((p[pos] for pos in z_positions), Fraction(0))


def instance_generators(inst, generator_cap=GENERATOR_CAP, dimension_cap=DIMENSION_CAP):
    dim = len(inst.edges) + len(inst.market_ids)
    if dim > dimension_cap:
        raise CapExceededError(f"Dimension {dim} exceeds the cap of {dimension_cap}.")
    generators = enumerate_integral_points(inst)
    if len(generators) > generator_cap:
        raise CapExceededError(f"{len(generators)} generators exceed the cap of {generator_cap}.")
    z_positions = list(range(len(inst.edges), dim))
    cards = [z_cardinality(g, z_positions) for g in generators]
    return generators, cards, z_positions


def audit_instance_cut(inst, k, battery_seed=0, random_objectives=RANDOM_OBJECTIVES,
        generator_cap=GENERATOR_CAP, dimension_cap=DIMENSION_CAP):
    """Checks that cutting conv(X) with sum(z) <= k adds no fractional optimum
    for any objective of the battery."""
    generators, cards, z_positions = instance_generators(inst, generator_cap, dimension_cap)
    objectives = objective_battery(len(generators[0]), z_positions, battery_seed, random_objectives)
    return audit_cardinality_cut(generators, cards, k, objectives)


def matching_points(G):
    index = [f"y[{market_name(e)}]" for e in G.edges]
    points = []
    for idxs in all_matchings(G):
        y = [0] * G.m
        for i in idxs: y[i] = 1
        points.append(RationalPoint(index, y))
    return points


def audit_matching_cardinality(G, k, battery_seed=0, random_objectives=RANDOM_OBJECTIVES,
        cap=AUDIT_EDGE_CAP):
    """Checks that the matching polytope cut by e.y <= k has integral optima."""
    if G.m > cap:
        raise CapExceededError(f"{G.m} edges exceed the audit cap of {cap}.")
    generators = matching_points(G)
    positions = list(range(G.m))
    cards = [z_cardinality(g, positions) for g in generators]
    objectives = objective_battery(G.m, positions, battery_seed, random_objectives)
    return audit_cardinality_cut(generators, cards, k, objectives)
