import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corecommittee import catalog
from corecommittee.catalog import T
from corecommittee.corpus import random_fractional_committee, random_instance, random_utilities
from corecommittee.errors import PreconditionError, ResourceLimitError, UnsupportedError
from corecommittee.integral import (
    branch_and_bound,
    check_integralizability,
    emit_normaliz,
    farkas_certificate,
    is_candidate_interval,
    monoid_generators,
    monoid_member,
    oracle_integral_feasible,
    round_committee,
    round_utilities,
)
from corecommittee.lp import LinearProgram, fractional_feasible
from corecommittee.model import Committee, Instance, canonical_types, utility

from oracles import integral_feasible

half, third = Fraction(1, 2), Fraction(1, 3)
PAIRS = {T(1, 2): 1, T(1, 3): 1, T(2, 3): 1}


def test_branch_and_bound_knapsack():
    lp = LinearProgram(3, [0] * 3, [1] * 3, [5, 4, 3], "max").add([2, 3, 1], "<=", 4)
    best = branch_and_bound(lp)
    assert best.value == 8 and best.x == (1, 0, 1)
    infeasible = LinearProgram(1, [0], [3]).add([2], "=", 3)
    assert branch_and_bound(infeasible) is None


def test_oracle_examples():
    assert oracle_integral_feasible(catalog.pav_counterexample(), (0, -2, 0)) == Committee()
    assert oracle_integral_feasible(catalog.two_triangles(), (1,) * 6) is None
    assert oracle_integral_feasible(catalog.four_candidates(), (1,) * 6) is None
    x = oracle_integral_feasible(catalog.pav_counterexample(), (11, 10, 7))
    assert x.size <= 18 and all(a >= b for a, b in zip(utility(catalog.pav_counterexample(), x), (11, 10, 7)))


def test_oracle_matches_enumeration():
    rng = random.Random(21)
    for _ in range(150):
        instance = random_instance(rng, n_range=(1, 6), k_max=4, c_max=2, max_types=5)
        u = random_utilities(rng, instance)
        assert (oracle_integral_feasible(instance, u) is not None) == integral_feasible(instance, u)


def test_round_integral_input_unchanged():
    x = Committee({T(1, 2): 9, T(3): 8})
    assert round_committee(catalog.pav_counterexample(), x) == x


def test_round_thirds_to_empty():
    instance = Instance(3, PAIRS, 1)
    x = Committee({t: third for t in PAIRS})
    assert round_committee(instance, x) == Committee()
    assert round_utilities(instance, x) == ((0, 0, 0), Committee())


def test_round_picks_one_half():
    instance = Instance(3, PAIRS, 2)
    x = Committee({T(1, 2): 1, T(1, 3): half, T(2, 3): half})
    out = round_committee(instance, x)
    assert out[T(1, 2)] == 1 and out[T(1, 3)] + out[T(2, 3)] == 1
    assert all(a >= b for a, b in zip(utility(instance, out), (2, 1, 1)))


def test_round_utilities_pav_counterexample():
    instance = catalog.pav_counterexample()
    x = Committee({T(1, 2): Fraction(19, 2), T(1): half, T(2): half, T(3): Fraction(15, 2)})
    floors, witness = round_utilities(instance, x)
    assert floors == (10, 10, 7)
    assert all(a >= b for a, b in zip(utility(instance, witness), floors))
    empty = round_utilities(instance, Committee())
    assert empty == ((0, 0, 0), Committee())


def test_round_preconditions():
    with pytest.raises(UnsupportedError):
        round_committee(catalog.two_triangles(), Committee({T(1, 2): half}))
    with pytest.raises(PreconditionError):
        round_committee(Instance(3, PAIRS, 1), Committee({t: half for t in PAIRS}))
    with pytest.raises(PreconditionError):
        round_committee(Instance(3, PAIRS, 3), Committee({T(1, 2): Fraction(3, 2)}))


def test_rounding_never_loses_floor_utilities():
    rng = random.Random(22)
    for _ in range(100):
        instance = random_instance(rng, n_range=(2, 5), k_min=1, k_max=6, c_max=3, max_types=12)
        x = random_fractional_committee(rng, instance, denominator=5)
        out = round_committee(instance, x)
        assert out.size <= instance.k
        assert all(a >= b // 1 for a, b in zip(utility(instance, out), utility(instance, x)))


def test_integralizability_small_k():
    rng = random.Random(23)
    for _ in range(30):
        instance = random_instance(rng, n_range=(6, 6), k_max=1, c_max=2, max_types=10)
        assert check_integralizability(instance).integralizable


def test_integralizability_reports_gap_with_witness():
    report = check_integralizability(catalog.two_triangles())
    u, witness = report.counterexample
    assert u == (1,) * 6
    assert fractional_feasible(catalog.two_triangles(), u) is not None
    assert witness.size <= 3 and utility(catalog.two_triangles(), witness) == (1,) * 6


def test_integralizability_cap():
    with pytest.raises(ResourceLimitError):
        check_integralizability(catalog.two_triangles(), cap=100)


def test_integralizability_matches_enumeration():
    rng = random.Random(24)
    for _ in range(25):
        instance = random_instance(rng, n_range=(5, 6), k_min=2, k_max=3, c_max=1, max_types=6)
        report = check_integralizability(instance)
        bounds = [min(instance.k, instance.approved_supply(i)) for i in range(instance.n)]
        gap = None
        for point in _box(bounds):
            if fractional_feasible(instance, point) is not None and not integral_feasible(instance, point):
                gap = point
                break
        assert report.integralizable == (gap is None)
        if gap is not None:
            assert report.counterexample[0] == gap


def _box(bounds):
    if not bounds:
        yield ()
        return
    for head in range(bounds[0] + 1):
        for rest in _box(bounds[1:]):
            yield (head,) + rest


def test_farkas_certificate_separates():
    pairs = Instance(3, PAIRS, 1)
    assert farkas_certificate(pairs, (1, 1, 1)) is not None
    assert farkas_certificate(pairs, (1, 1, 0)) is None


def test_candidate_interval():
    assert is_candidate_interval(Instance(3, {T(1): 1, T(1, 2, 3): 1, T(1, 3): 1, T(3): 1}, 2)) is not None
    assert is_candidate_interval(Instance(2, {T(1, 2): 3}, 2)) == (T(1, 2),)
    assert is_candidate_interval(catalog.two_triangles()) is None
    many = Instance(4, {t: 1 for t in canonical_types(4)[:11]}, 2)
    with pytest.raises(UnsupportedError):
        is_candidate_interval(many)


def test_candidate_interval_order_is_valid():
    instance = Instance(4, {T(1): 1, T(1, 2): 1, T(2, 3): 2, T(3, 4): 1, T(4): 1}, 3)
    order = is_candidate_interval(instance)
    for i in range(4):
        hits = [j for j, t in enumerate(order) if t >> i & 1]
        assert hits == list(range(hits[0], hits[-1] + 1))


@pytest.mark.parametrize("n, count, dim", [(1, 4, 3), (2, 9, 6), (5, 68, 37)])
def test_generator_counts(n, count, dim):
    gens = monoid_generators(n)
    assert len(gens) == count and all(len(g.vector) == dim for g in gens)
    assert [g.kind for g in gens].count("X") == (1 << n) - 1


def test_emit_normaliz_layout():
    assert emit_normaliz(1).splitlines()[:2] == ["amb_space 3", "cone 4"]
    first = emit_normaliz(5).splitlines()[2].split()
    assert first == ["1"] + ["0"] * 30 + ["1", "1", "0", "0", "0", "0"]
    rows = [tuple(int(v) for v in line.split()) for line in emit_normaliz(5).splitlines()[2:]]
    assert rows == [g.vector for g in monoid_generators(5)]


def test_monoid_member_examples():
    tri = catalog.two_triangles()
    point = [tri.c(t) for t in canonical_types(6)] + [3] + [1] * 6
    assert monoid_member(6, point) is None
    zero = monoid_member(2, [0] * 6)
    assert zero == (0,) * 9
    single = monoid_member(1, [1, 1, 1])
    assert single == (1, 0, 0, 0)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 3).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.integers(0, 2), min_size=(1 << n) - 1, max_size=(1 << n) - 1),
            st.integers(0, 3),
            st.lists(st.integers(-1, 3), min_size=n, max_size=n),
        )
    )
)
def test_monoid_decomposition_recomposes(data):
    n, supply, k, u = data
    point = supply + [k] + u
    mult = monoid_member(n, point)
    gens = monoid_generators(n)
    if mult is None:
        types = canonical_types(n)
        instance = Instance(n, {t: c for t, c in zip(types, supply) if c}, k)
        assert not integral_feasible(instance, [max(0, v) for v in u])
        return
    assert all(m >= 0 for m in mult)
    total = [sum(m * g.vector[d] for m, g in zip(mult, gens)) for d in range(len(point))]
    assert total == point
