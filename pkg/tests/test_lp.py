import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from inkspan.lp import EQ, GE, LE, LinearProgram, LpBuilder, check_solution, is_vertex, solve_lp


def lp_from(c, rows, lo, hi):
    b = LpBuilder(len(c))
    b.c[:] = c
    b.lo[:] = lo
    b.hi[:] = hi
    for coeffs, sense, rhs in rows:
        b.add_row(dict(enumerate(coeffs)), sense, rhs)
    return b.build()


def highs(lp: LinearProgram):
    """Reference optimum from scipy's HiGHS (independent of our simplex)."""
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row, s, rhs in zip(lp.A, lp.senses, lp.b):
        if s == LE:
            A_ub.append(row); b_ub.append(rhs)
        elif s == GE:
            A_ub.append(-row); b_ub.append(-rhs)
        else:
            A_eq.append(row); b_eq.append(rhs)
    res = linprog(-lp.c, A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq or None,
                  b_eq=b_eq or None, bounds=list(zip(lp.lo, lp.hi)), method="highs")
    return res.status, (-res.fun if res.status == 0 else None)


@pytest.mark.parametrize("exact", [False, True])
def test_box_optimum(exact):
    out = solve_lp(lp_from([1.0], [], [0], [1]), exact=exact)
    assert out.optimal and out.x[0] == pytest.approx(1) and out.objective == pytest.approx(1)


@pytest.mark.parametrize("exact", [False, True])
def test_two_variable_example(exact):
    lp = lp_from([3, 2], [([1, 1], LE, 4)], [0, 0], [2, 3])
    out = solve_lp(lp, exact=exact)
    assert out.optimal
    assert out.x == pytest.approx([2, 2])
    assert out.objective == pytest.approx(10)


@pytest.mark.parametrize("exact", [False, True])
def test_infeasible(exact):
    assert not solve_lp(lp_from([1], [([1], GE, 2)], [0], [1]), exact=exact).optimal


def test_equality_and_fixed_bounds():
    lp = lp_from([1, 1, 1], [([1, 1, 0], EQ, 1), ([0, 1, 1], GE, 1.5)], [0, 0, 0.5], [1, 1, 0.5])
    out = solve_lp(lp)
    assert out.optimal and out.x[2] == 0.5
    assert out.objective == pytest.approx(1.5)


def test_redundant_equalities():
    lp = lp_from([1, 2], [([1, 1], EQ, 1), ([2, 2], EQ, 2)], [0, 0], [1, 1])
    out = solve_lp(lp)
    assert out.optimal and out.objective == pytest.approx(2)


def test_no_rows_and_no_vars():
    assert solve_lp(lp_from([-1, 2], [], [0, 0], [3, 3])).objective == pytest.approx(6)
    out = solve_lp(lp_from([], [], [], []))
    assert out.optimal and out.objective == 0


def test_check_solution_examples():
    lp = lp_from([1], [([1], LE, 1)], [0], [2])
    assert check_solution(lp, [0.5]).max_violation == 0
    assert check_solution(lp, [1.5]).max_violation == pytest.approx(0.5)


def test_deterministic():
    lp = lp_from([1, 1, 1], [([1, 1, 1], LE, 1.5)], [0] * 3, [1] * 3)
    a, b = solve_lp(lp), solve_lp(lp)
    assert np.array_equal(a.x, b.x)


@st.composite
def random_lp(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(0, 5))
    small = st.integers(-5, 5)
    c = draw(st.lists(small, min_size=n, max_size=n))
    lo = draw(st.lists(st.integers(-2, 1), min_size=n, max_size=n))
    width = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    hi = [a + w for a, w in zip(lo, width)]
    rows = []
    for _ in range(m):
        coeffs = draw(st.lists(small, min_size=n, max_size=n))
        sense = draw(st.sampled_from([LE, GE, EQ]))
        rhs = draw(st.integers(-6, 6))
        rows.append((coeffs, sense, rhs))
    return lp_from(c, rows, lo, hi)


@settings(max_examples=300, deadline=None)
@given(random_lp())
def test_matches_highs(lp):
    status, ref = highs(lp)
    out = solve_lp(lp)
    assert out.optimal == (status == 0)
    if out.optimal:
        assert out.objective == pytest.approx(ref, abs=1e-7)
        assert check_solution(lp, out.x).ok()
        assert is_vertex(lp, out.x)


@settings(max_examples=60, deadline=None)
@given(random_lp())
def test_exact_path_agrees(lp):
    a, b = solve_lp(lp), solve_lp(lp, exact=True)
    assert a.optimal == b.optimal
    if a.optimal:
        assert a.objective == pytest.approx(b.objective, abs=1e-7)
