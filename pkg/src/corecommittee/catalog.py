"""Named instances used by the reproduction suite and the tests."""

from fractions import Fraction

from corecommittee.analysis import GeneralInstance
from corecommittee.model import ApprovalProfile, Instance, type_mask


def T(*voters):
    """Type bitmask from 1-based voter labels: ``T(1, 2) == 0b11``."""
    return type_mask(v - 1 for v in voters)


def pav_counterexample_profile():
    """Three voters, twenty candidates, k = 18; PAV is not in the core."""
    names = [f"c{j}" for j in range(1, 21)]
    first = names[:10]
    return ApprovalProfile(
        names,
        [first + ["c11"], first + ["c12"], names[12:]],
        18,
    )


def pav_counterexample():
    return Instance(3, {T(1, 2): 10, T(1): 1, T(2): 1, T(3): 8}, 18)


def two_triangles():
    """Six voters on two triangles of pair candidates, k = 3."""
    pairs = [(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6)]
    return Instance(6, {T(*p): 1 for p in pairs}, 3)


def four_candidates():
    """Six voters, four triple candidates pairwise sharing a voter, k = 2."""
    triples = [(1, 2, 6), (4, 5, 6), (2, 3, 4), (1, 3, 5)]
    return Instance(6, {T(*t): 1 for t in triples}, 2)


def nonunit_costs():
    """Three pair candidates costing 2 each; budget 3 on both sides."""
    cands = [(2, (1, 1, 0)), (2, (1, 0, 1)), (2, (0, 1, 1))]
    return GeneralInstance(3, cands, 3, 3)


def additive_valuations():
    """A single Condorcet cycle of scores with k = 1."""
    matrix = [(2, 0, 1), (1, 2, 0), (0, 1, 2)]
    cands = [(1, tuple(row[j] for row in matrix)) for j in range(3)]
    return GeneralInstance(3, cands, 1, 1)


def droop():
    """Three unit pair candidates, fractional size just under 2, k = 1."""
    cands = [(1, (1, 1, 0)), (1, (1, 0, 1)), (1, (0, 1, 1))]
    return GeneralInstance(3, cands, 2 - Fraction(1, 100), 1)


def mes_three_voters():
    """Three voters, k = 9: a on {1,2} x6, b on {1,3} x2, c on {2,3} x2, d on {3} x3."""
    return Instance(3, {T(1, 2): 6, T(1, 3): 2, T(2, 3): 2, T(3): 3}, 9)


# a-candidates first, then voter 3's singletons ahead of the pairs
MES_THREE_VOTERS_PRIORITY = (T(1, 2), T(3), T(1, 3), T(2, 3))

MES_NINE_TYPES = {
    "a": T(1, 2, 3, 4, 5, 6),
    "b": T(7, 8),
    "c": T(7, 9),
    "d": T(8, 9),
    "e": T(1, 2, 3, 4, 7),
    "f": T(1, 2, 3, 4, 8),
    "g": T(1, 2, 3, 4, 9),
}
MES_NINE_SUPPLY = {"a": 18, "b": 3, "c": 3, "d": 3, "e": 7, "f": 7, "g": 7}


def mes_nine_voters():
    """Nine voters with budget 3 each, k = 27; MES spends everything on a, b, c, d."""
    return Instance(9, {MES_NINE_TYPES[name]: c for name, c in MES_NINE_SUPPLY.items()}, 27)


def mes_nine_voters_profile():
    names = [f"{letter}{j}" for letter, count in MES_NINE_SUPPLY.items() for j in range(1, count + 1)]
    approvals = []
    for voter in range(1, 10):
        bit = 1 << (voter - 1)
        approvals.append([n for n in names if MES_NINE_TYPES[n[0]] & bit])
    return ApprovalProfile(names, approvals, 27)
