from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corecommittee import catalog
from corecommittee.catalog import T
from corecommittee.errors import CoreCommitteeError, InconsistencyError, InvalidInstance, InvalidProfile
from corecommittee.model import (
    ApprovalProfile,
    Committee,
    Instance,
    as_rational,
    canonical_types,
    coalition_budget,
    expand_committee,
    is_affordable,
    parse_type,
    reduce_profile,
    type_label,
    utility,
)


def test_errors_are_value_errors():
    assert issubclass(CoreCommitteeError, ValueError)
    with pytest.raises(ValueError):
        Instance(2, {T(1): 1}, 2, [1, 2])


def test_type_labels_round_trip():
    assert type_label(T(1, 3)) == "1,3"
    assert parse_type("1,3", 3) == 0b101
    with pytest.raises(InvalidInstance):
        parse_type("4", 3)
    with pytest.raises(InvalidInstance):
        parse_type("1,1", 3)


def test_canonical_order_is_size_then_lex():
    labels = [type_label(t) for t in canonical_types(3)]
    assert labels == ["1", "2", "3", "1,2", "1,3", "2,3", "1,2,3"]


def test_as_rational_refuses_floats():
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational("0.25") == Fraction(1, 4)
    assert as_rational(Fraction(4, 2)) == 2 and isinstance(as_rational(Fraction(4, 2)), int)
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_instance_validation():
    with pytest.raises(InvalidInstance):
        Instance(2, {T(3): 1}, 1)
    with pytest.raises(InvalidInstance):
        Instance(2, {T(1): -1}, 1)
    with pytest.raises(InvalidInstance):
        Instance(2, {T(1): 1}, 2, [Fraction(1, 2), 1])
    default = Instance(3, {T(1): 1}, 2)
    assert default.budgets == (Fraction(2, 3),) * 3
    assert Instance(2, {T(1): 0, T(2): 1}, 1).types == (T(2),)


def test_pav_counterexample_reduction():
    instance, assignment = reduce_profile(catalog.pav_counterexample_profile())
    assert instance.n == 3 and instance.k == 18
    assert instance.budgets == (6, 6, 6)
    assert instance.supply == {T(1, 2): 10, T(1): 1, T(2): 1, T(3): 8}
    assert assignment["c11"] == T(1) and assignment["c12"] == T(2) and assignment["c13"] == T(3)


def test_single_voter_reduction():
    profile = ApprovalProfile(["a", "b", "c", "d"], [["a", "b", "c", "d"]], 2)
    instance, _ = reduce_profile(profile)
    assert instance.n == 1 and instance.budgets == (2,) and instance.supply == {T(1): 4}


def test_nine_voter_profile_merges_identical_ballots():
    # voters 1-4 and 5-6 cast identical ballots, so five voter types remain
    instance, assignment = reduce_profile(catalog.mes_nine_voters_profile())
    assert instance.n == 5
    assert instance.budgets == (12, 6, 3, 3, 3)
    assert sum(instance.budgets) == 27
    assert instance.supply == {
        T(1, 2): 18,
        T(3, 4): 3,
        T(3, 5): 3,
        T(4, 5): 3,
        T(1, 3): 7,
        T(1, 4): 7,
        T(1, 5): 7,
    }
    chosen = expand_committee(instance, assignment, Committee({T(1, 2): 18, T(3, 4): 3, T(3, 5): 3, T(4, 5): 3}))
    assert len(chosen) == 27
    assert {name[0] for name in chosen} == {"a", "b", "c", "d"}


def test_reduction_drops_unapproved_candidates():
    profile = ApprovalProfile(["a", "b", "z"], [["a"], ["a", "b"]], 1)
    instance, assignment = reduce_profile(profile)
    assert "z" not in assignment
    assert instance.total_supply == 2


def test_profile_errors():
    with pytest.raises(InvalidProfile):
        reduce_profile(ApprovalProfile(["a"], [], 1))
    with pytest.raises(InvalidProfile):
        ApprovalProfile(["a"], [["b"]], 1)
    with pytest.raises(InvalidProfile):
        ApprovalProfile(["a", "a"], [["a"]], 1)


def test_utility_examples():
    tri = catalog.two_triangles()
    half = Committee({t: Fraction(1, 2) for t in tri.types})
    assert utility(tri, half) == (1,) * 6
    assert utility(tri, Committee()) == (0,) * 6
    pav_case = catalog.pav_counterexample()
    assert utility(pav_case, Committee({T(1, 2): 10, T(3): 8})) == (10, 10, 8)


def test_coalition_budget_examples():
    assert coalition_budget(catalog.pav_counterexample(), T(1, 2)) == 12
    assert coalition_budget(catalog.pav_counterexample(), T(1, 2, 3)) == 18
    assert coalition_budget(catalog.mes_nine_voters(), T(1, 2, 3, 4, 7, 8, 9)) == 21


def test_is_affordable_examples():
    tri = catalog.two_triangles()
    half = Committee({t: Fraction(1, 2) for t in tri.types})
    assert is_affordable(tri, half, (1 << 6) - 1)
    assert not is_affordable(tri, Committee({T(1, 2): 2}), (1 << 6) - 1)
    droop_like = Committee({T(1, 2): Fraction(1, 2), T(1, 3): Fraction(1, 2), T(2, 3): Fraction(1, 2)})
    pairs = Instance(3, {T(1, 2): 1, T(1, 3): 1, T(2, 3): 1}, 1, [Fraction(1, 2), Fraction(1, 2), 0])
    assert not is_affordable(pairs, droop_like, T(1, 2))


def test_expand_committee():
    instance, assignment = reduce_profile(catalog.pav_counterexample_profile())
    assert expand_committee(instance, assignment, Committee({T(1, 2): 2})) == {"c1", "c2"}
    assert expand_committee(instance, assignment, Committee()) == frozenset()
    with pytest.raises(InconsistencyError):
        expand_committee(instance, assignment, Committee({T(1): 2}))


def test_committee_integral_flag():
    assert Committee({1: 2}).integral
    assert not Committee({1: Fraction(1, 2)}).integral
    with pytest.raises(InvalidInstance):
        Committee({1: Fraction(1, 2)}, integral=True)
    with pytest.raises(InvalidInstance):
        Committee({1: -1})


amounts = st.dictionaries(st.integers(1, 7), st.fractions(0, 5, max_denominator=6), max_size=7)


@settings(max_examples=100, deadline=None)
@given(amounts, amounts)
def test_utility_is_additive(a, b):
    instance = Instance(3, {t: 5 for t in range(1, 8)}, 3)
    x, y = Committee(a), Committee(b)
    total = utility(instance, x + y)
    assert total == tuple(p + q for p, q in zip(utility(instance, x), utility(instance, y)))


ballots = st.lists(st.sets(st.sampled_from("abcdef")), min_size=1, max_size=8)


@settings(max_examples=100, deadline=None)
@given(ballots, st.integers(0, 6), st.sets(st.sampled_from("abcdef")))
def test_reduction_preserves_utilities(approvals, k, chosen):
    profile = ApprovalProfile(list("abcdef"), approvals, k)
    instance, assignment = reduce_profile(profile)
    assert sum(instance.budgets) == k
    counts = {}
    for name in chosen:
        if name in assignment:
            counts[assignment[name]] = counts.get(assignment[name], 0) + 1
    meta = utility(instance, Committee(counts))
    ballots_seen = []
    for ballot in profile.approvals:
        if ballot not in ballots_seen:
            ballots_seen.append(ballot)
        assert len(ballot & chosen) == meta[ballots_seen.index(ballot)]
