import random
from fractions import Fraction

import pytest

from corecommittee import catalog
from corecommittee.catalog import T
from corecommittee.corpus import random_instance, random_n3_instance
from corecommittee.errors import InfeasibleStartError, PreconditionError, UnsupportedError
from corecommittee.model import Committee, Instance, utility
from corecommittee.rules import pav
from corecommittee.solver import N3Trace, pareto_improve, solve_core, solve_core_n3, solve_core_pareto

from oracles import blocked, dominated


def test_solve_core_avoids_pav():
    instance = catalog.pav_counterexample()
    report = solve_core(instance)
    assert report.utilities != (10, 10, 8)
    assert not blocked(instance, report.committee)
    assert report.epsilon == Fraction(1, 3)
    assert report.committee != pav(instance)


def test_k_zero():
    instance = Instance(2, {T(1): 1, T(2): 2}, 0)
    assert solve_core(instance).committee == Committee()
    assert solve_core_pareto(instance).committee == Committee()


def test_unsupported_sizes():
    with pytest.raises(UnsupportedError):
        solve_core(catalog.mes_nine_voters())
    with pytest.raises(UnsupportedError):
        solve_core_pareto(catalog.two_triangles())


def test_pareto_improve_examples():
    instance = Instance(2, {T(1, 2): 1, T(1): 1, T(2): 1}, 2)
    assert pareto_improve(instance, (0, 0), (0, 1)) == (2, 1)
    assert pareto_improve(instance, (0, 0), (1, 0)) == (1, 2)
    assert pareto_improve(instance, (2, 1)) == (2, 1)
    with pytest.raises(InfeasibleStartError):
        pareto_improve(instance, (2, 2))
    with pytest.raises(PreconditionError):
        pareto_improve(instance, (0, 0), (0, 0))


def test_pareto_improve_monotone_and_idempotent():
    rng = random.Random(41)
    for _ in range(40):
        instance = random_instance(rng, n_range=(1, 5), k_max=5, c_max=3)
        order = list(range(instance.n))
        rng.shuffle(order)
        start = (0,) * instance.n
        once = pareto_improve(instance, start, order)
        assert all(a >= b for a, b in zip(once, start))
        assert pareto_improve(instance, once, order) == once


def test_full_supply_when_scarce():
    instance = Instance(3, {T(1): 1, T(2, 3): 2}, 4, [2, 1, 1])
    assert solve_core_pareto(instance).committee == Committee({T(1): 1, T(2, 3): 2})


def test_solver_against_brute_force():
    rng = random.Random(42)
    for _ in range(40):
        instance = random_instance(
            rng, n_range=(1, 4), k_min=1, k_max=4, c_max=2, max_types=4, rational_budgets=True, scarce=True
        )
        report = solve_core_pareto(instance)
        assert report.utilities == utility(instance, report.committee)
        assert not blocked(instance, report.committee)
        assert not dominated(instance, report.committee)


def test_epsilon_override_is_used():
    report = solve_core(catalog.pav_counterexample(), epsilon=Fraction(1, 10))
    assert report.epsilon == Fraction(1, 10)


# --- three voters ----------------------------------------------------------


def test_three_voter_example():
    instance = catalog.mes_three_voters()
    trace = N3Trace()
    x = solve_core_n3(instance, trace)
    assert x == Committee({T(1, 2): 5, T(1, 3): 2, T(2, 3): 2})
    u = utility(instance, x)
    assert u[0] >= 7 and u[1] >= 7 and u[2] >= 4


def test_three_voter_unanimous_only():
    instance = Instance(3, {T(1, 2, 3): 5}, 5)
    assert solve_core_n3(instance) == Committee({T(1, 2, 3): 5})


def test_three_voter_preconditions():
    with pytest.raises(PreconditionError):
        solve_core_n3(Instance(2, {T(1): 3}, 2))
    with pytest.raises(PreconditionError):
        solve_core_n3(Instance(3, {T(1): 1}, 2))


def test_three_voter_unsorted_budgets_restored():
    instance = Instance(3, {T(1): 3, T(2): 3, T(3): 3, T(2, 3): 2}, 5, [Fraction(1, 2), 2, Fraction(5, 2)])
    x = solve_core_n3(instance)
    assert x.size == 5
    assert not blocked(instance, x) and not dominated(instance, x)


def test_three_voter_against_brute_force():
    rng = random.Random(43)
    for _ in range(60):
        instance = random_n3_instance(rng, k_max=6, c_max=2)
        x = solve_core_n3(instance)
        assert x.size == instance.k
        assert not blocked(instance, x)
        assert not dominated(instance, x)
