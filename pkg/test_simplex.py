from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest
from scipy.optimize import linprog

from tpmc.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp


def test_box():
    lp = solve_lp([-1, -1], A_ub=[[1, 1], [1, 0]], b_ub=[4, 3])
    assert lp.status == OPTIMAL
    assert lp.value == -4
    assert sum(lp.x) == 4


def test_infeasible():
    lp = solve_lp([1], A_eq=[[1], [1]], b_eq=[1, 2])
    assert lp.status == INFEASIBLE
    assert lp.x is None


def test_unbounded():
    assert solve_lp([-1, 0], A_ub=[[1, -1]], b_ub=[1]).status == UNBOUNDED


def test_redundant_equalities():
    lp = solve_lp([1, 0], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    assert lp.status == OPTIMAL
    assert lp.x == [0, 1]


def test_negative_right_hand_side():
    lp = solve_lp([1], A_ub=[[-1]], b_ub=[-2])
    assert lp.x == [2]


def test_degenerate_cycling_example():
    c = [Fraction(-3, 4), 20, Fraction(-1, 2), 6]
    A_ub = [[Fraction(1, 4), -8, -1, 9],
            [Fraction(1, 2), -12, Fraction(-1, 2), 3],
            [0, 0, 1, 0]]
    lp = solve_lp(c, A_ub=A_ub, b_ub=[0, 0, 1])
    assert lp.status == OPTIMAL
    assert lp.value == Fraction(-5, 4)


def test_exact_fractions():
    lp = solve_lp([-1, -1], A_ub=[[3, 1], [1, 3]], b_ub=[1, 1])
    assert lp.x == [Fraction(1, 4), Fraction(1, 4)]
    assert lp.value == Fraction(-1, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_agrees_with_linprog(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    c = [int(v) for v in rng.integers(-5, 6, size=n)]
    A_ub = [[int(v) for v in row] for row in rng.integers(0, 4, size=(m, n))]
    b_ub = [int(v) for v in rng.integers(1, 10, size=m)]
    # Keeps every LP bounded.
    A_ub += [[int(k == j) for k in range(n)] for j in range(n)]
    b_ub += [5] * n
    lp = solve_lp(c, A_ub=A_ub, b_ub=b_ub)
    reference = linprog(c, A_ub=A_ub, b_ub=b_ub, method='highs')
    assert lp.status == OPTIMAL
    assert float(lp.value) == pytest.approx(reference.fun, abs=1e-7)
    assert all(sum(a*x for a, x in zip(row, lp.x)) <= b for row, b in zip(A_ub, b_ub))
