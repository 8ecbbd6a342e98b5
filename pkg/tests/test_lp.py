from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from corecommittee import catalog
from corecommittee.catalog import T
from corecommittee.errors import InvalidInstance, UnsupportedError
from corecommittee.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    compute_L,
    denominator_bound,
    fractional_feasible,
    solve_lp,
    tau,
    tau_witness,
)
from corecommittee.model import Instance, utility


def test_single_variable_bound():
    out = solve_lp(LinearProgram(1, [0], [Fraction(3, 2)], [1], "max"))
    assert out.status == OPTIMAL and out.value == Fraction(3, 2) and out.x == (Fraction(3, 2),)


def test_contradictory_rows():
    lp = LinearProgram(1, [None], [None]).add([1], ">=", 1).add([1], "<=", 0)
    assert solve_lp(lp).status == INFEASIBLE


def test_unbounded():
    assert solve_lp(LinearProgram(2, objective=[1, 1], sense="max").add([1, -1], "<=", 1)).status == UNBOUNDED


def test_free_variables_and_equalities():
    lp = LinearProgram(2, [None, None], [None, None], [1, 0], "min")
    lp.add([1, 1], "=", 3).add([1, -1], ">=", -5).add({1: 1}, "<=", 10)
    out = solve_lp(lp)
    assert out.status == OPTIMAL and out.x == (-1, 4)


def test_malformed_programs():
    with pytest.raises(InvalidInstance):
        LinearProgram(2, [0], [1, 1])
    with pytest.raises(InvalidInstance):
        LinearProgram(1, [2], [1])
    with pytest.raises(InvalidInstance):
        LinearProgram(1).add([1], "<", 1)
    with pytest.raises(InvalidInstance):
        LinearProgram(2).add([1], "<=", 1)


def test_two_triangles_minimum_size():
    tri = catalog.two_triangles()
    m = len(tri.types)
    lp = LinearProgram(m, [0] * m, [1] * m, [1] * m, "min")
    for i in range(6):
        lp.add([1 if t >> i & 1 else 0 for t in tri.types], ">=", 1)
    assert solve_lp(lp).value == 3


def test_fractional_feasible_examples():
    ones = (1,) * 6
    x = fractional_feasible(catalog.two_triangles(), ones, 3)
    assert x is not None and all(v >= 1 for v in utility(catalog.two_triangles(), x)) and x.size <= 3
    x = fractional_feasible(catalog.four_candidates(), ones)
    assert x is not None and x.size <= 2
    assert fractional_feasible(catalog.pav_counterexample(), (12, 0, 0)) is None
    assert fractional_feasible(catalog.two_triangles(), ones, Fraction(29, 10)) is None


def test_tau_examples():
    assert tau(catalog.two_triangles(), (1,) * 6) == 3
    assert tau(catalog.two_triangles(), (0,) * 6) == 0
    pairs = Instance(3, {T(1, 2): 1, T(1, 3): 1, T(2, 3): 1}, 1)
    assert tau(pairs, (1, 1, 1)) == Fraction(3, 2)
    assert tau(pairs, (3, 0, 0)) is None
    value, witness = tau_witness(pairs, (1, 1, 1))
    assert witness.size == value


def test_compute_L_small_orders():
    assert [compute_L(n) for n in range(1, 5)] == [1, 1, 2, 6]
    assert denominator_bound(5) == 60
    with pytest.raises(UnsupportedError):
        compute_L(6)


# --- properties ------------------------------------------------------------

small = st.integers(-3, 3)


@st.composite
def packing_lp(draw):
    rows = draw(st.integers(1, 3))
    cols = draw(st.integers(1, 3))
    a = [[draw(small) for _ in range(cols)] for _ in range(rows)]
    b = [draw(st.integers(0, 4)) for _ in range(rows)]
    c = [draw(small) for _ in range(cols)]
    return a, b, c


@settings(max_examples=150, deadline=None)
@given(packing_lp())
def test_strong_duality(data):
    a, b, c = data
    rows, cols = len(a), len(c)
    primal = LinearProgram(cols, objective=c, sense="max")
    for row, rhs in zip(a, b):
        primal.add(row, "<=", rhs)
    dual = LinearProgram(rows, objective=b, sense="min")
    for j in range(cols):
        dual.add([a[i][j] for i in range(rows)], ">=", c[j])
    p, d = solve_lp(primal), solve_lp(dual)
    assert p.status != INFEASIBLE  # x = 0 is feasible because b >= 0
    if p.status == OPTIMAL:
        assert d.status == OPTIMAL and p.value == d.value
    else:
        assert d.status == INFEASIBLE


@st.composite
def general_lp(draw):
    cols = draw(st.integers(1, 4))
    rows = draw(st.integers(0, 4))
    lower = [draw(st.integers(-2, 1)) for _ in range(cols)]
    upper = [lo + draw(st.integers(0, 4)) for lo in lower]
    cons = []
    for _ in range(rows):
        coeffs = [draw(small) for _ in range(cols)]
        cons.append((coeffs, draw(st.sampled_from(["<=", ">=", "="])), draw(st.integers(-4, 4))))
    c = [draw(small) for _ in range(cols)]
    return lower, upper, cons, c


@settings(max_examples=150, deadline=None)
@given(general_lp())
def test_agrees_with_floating_point_solver(data):
    lower, upper, cons, c = data
    lp = LinearProgram(len(c), lower, upper, c, "min")
    for coeffs, rel, rhs in cons:
        lp.add(coeffs, rel, rhs)
    exact = solve_lp(lp)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, rel, rhs in cons:
        if rel == "<=":
            a_ub.append(coeffs), b_ub.append(rhs)
        elif rel == ">=":
            a_ub.append([-v for v in coeffs]), b_ub.append(-rhs)
        else:
            a_eq.append(coeffs), b_eq.append(rhs)
    ref = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=b_ub or None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=b_eq or None,
        bounds=list(zip(lower, upper)),
        method="highs",
    )
    if ref.status == 2:
        assert exact.status == INFEASIBLE
    else:
        assert exact.status == OPTIMAL
        assert abs(float(exact.value) - ref.fun) < 1e-7
        for coeffs, rel, rhs in cons:
            lhs = sum(Fraction(a) * v for a, v in zip(coeffs, exact.x))
            assert {"<=": lhs <= rhs, ">=": lhs >= rhs, "=": lhs == rhs}[rel]


@st.composite
def instance_and_u(draw):
    n = draw(st.integers(1, 4))
    types = draw(st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=6, unique=True))
    supply = {t: draw(st.integers(1, 3)) for t in types}
    k = draw(st.integers(0, 5))
    u = tuple(draw(st.integers(0, 5)) for _ in range(n))
    return Instance(n, supply, k), u


@settings(max_examples=150, deadline=None)
@given(instance_and_u())
def test_feasible_iff_tau_within_k(data):
    instance, u = data
    value = tau(instance, u)
    assert (fractional_feasible(instance, u) is not None) == (value is not None and value <= instance.k)
