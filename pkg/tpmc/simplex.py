"""Exact rational two-phase simplex with Bland's rule.

Solves  min c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
"""
from fractions import Fraction
import logging

from bunch import Bunch

log = logging.getLogger(__name__)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
UNBOUNDED = 'unbounded'


class Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = [list(r) for r in rows]
        self.rhs = list(rhs)
        self.basis = list(basis)

    @property
    def m(self):
        return len(self.rows)

    def pivot(self, r, col):
        p = self.rows[r][col]
        self.rows[r] = [v / p for v in self.rows[r]]
        self.rhs[r] /= p
        for i in range(self.m):
            f = self.rows[i][col]
            if i == r or f == 0: continue
            self.rows[i] = [a - f*b for a, b in zip(self.rows[i], self.rows[r])]
            self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col

    def reduced_cost(self, cost, col):
        return cost[col] - sum((cost[b] * row[col] for b, row in zip(self.basis, self.rows)),
                Fraction(0))

    def value(self, cost):
        return sum((cost[b] * v for b, v in zip(self.basis, self.rhs)), Fraction(0))

    def run(self, cost, columns):
        """Primal simplex over the given columns.  Bland: lowest improving column
        enters, lowest basic variable leaves among ratio ties."""
        while True:
            entering = next((j for j in columns if self.reduced_cost(cost, j) < 0), None)
            if entering is None: return OPTIMAL
            candidates = [(self.rhs[i] / self.rows[i][entering], self.basis[i], i)
                          for i in range(self.m) if self.rows[i][entering] > 0]
            if not candidates: return UNBOUNDED
            _, _, leaving = min(candidates)
            self.pivot(leaving, entering)

    def drop_row(self, r):
        del self.rows[r]
        del self.rhs[r]
        del self.basis[r]


def solve_lp(c, A_eq=(), b_eq=(), A_ub=(), b_ub=()):
    """Returns a Bunch with status, x (list of Fractions) and value."""
    c = [Fraction(v) for v in c]
    n = len(c)
    A_eq, A_ub = [list(r) for r in A_eq], [list(r) for r in A_ub]
    n_slack = len(A_ub)
    width = n + n_slack
    rows, rhs = [], []
    for r, b in zip(A_eq, b_eq):
        assert len(r) == n, "Equality row has the wrong width."
        rows.append([Fraction(v) for v in r] + [Fraction(0)]*n_slack)
        rhs.append(Fraction(b))
    for s, (r, b) in enumerate(zip(A_ub, b_ub)):
        assert len(r) == n, "Inequality row has the wrong width."
        slack = [Fraction(0)]*n_slack
        slack[s] = Fraction(1)
        rows.append([Fraction(v) for v in r] + slack)
        rhs.append(Fraction(b))
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    m = len(rows)
    artificial = [[Fraction(int(i == k)) for k in range(m)] for i in range(m)]
    tableau = Tableau([row + art for row, art in zip(rows, artificial)], rhs,
            [width + i for i in range(m)])

    phase1 = [Fraction(0)]*width + [Fraction(1)]*m
    tableau.run(phase1, range(width + m))
    if tableau.value(phase1) > 0:
        return Bunch(status=INFEASIBLE, x=None, value=None)

    # Drive zero-level artificials out of the basis; rows that cannot be are redundant.
    r = 0
    while r < tableau.m:
        if tableau.basis[r] >= width:
            col = next((j for j in range(width) if tableau.rows[r][j] != 0), None)
            if col is None:
                tableau.drop_row(r)
                continue
            tableau.pivot(r, col)
        r += 1

    phase2 = c + [Fraction(0)]*(n_slack + m)
    status = tableau.run(phase2, range(width))
    if status == UNBOUNDED:
        return Bunch(status=UNBOUNDED, x=None, value=None)
    x = [Fraction(0)]*(width + m)
    for b, v in zip(tableau.basis, tableau.rhs):
        x[b] = v
    value = sum((ci*xi for ci, xi in zip(c, x)), Fraction(0))
    return Bunch(status=OPTIMAL, x=x[:n], value=value)
