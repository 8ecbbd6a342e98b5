"""Brute-force verifiers and feasibility gaps in richer models.

``verify_core`` and ``verify_pareto`` are complete: when they return
``None``, an exhaustive branch-and-bound has ruled out every deviation.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from corecommittee.errors import InvalidInstance, PreconditionError
from corecommittee.integral import branch_and_bound, integral_program, oracle_integral_feasible
from corecommittee.lp import LinearProgram, fractional_feasible, solve_lp
from corecommittee.model import (
    Committee,
    as_rational,
    coalition_budget,
    is_affordable,
    members,
    utility,
)


@dataclass(frozen=True)
class BlockingCertificate:
    """A coalition, an affordable committee for it, and each member's gain.

    ``gains`` follows the order of ``members(coalition)``.
    """

    coalition: int
    deviation: Committee
    gains: tuple


def _require_committee(instance, x):
    if not x.integral or not is_affordable(instance, x, (1 << instance.n) - 1):
        raise PreconditionError(f"{x!r} is not an affordable integral committee")


def _raised(u, coalition, gain):
    return [u[i] + gain if coalition >> i & 1 else 0 for i in range(len(u))]


def _integral_reach(instance, demands, budget):
    if fractional_feasible(instance, demands, budget) is None:
        return None
    return oracle_integral_feasible(instance, demands, budget)


def verify_core(instance, x):
    """Look for a coalition that can afford a strictly better committee.

    Coalitions are tried in increasing bitmask order with ``floor(b(S))``
    seats. For the first blocking coalition the smallest member gain is
    maximized, and among deviations achieving it one with the largest total
    member utility is reported.

    Returns
    -------
    BlockingCertificate or None
    """
    _require_committee(instance, x)
    u = utility(instance, x)
    full = [instance.approved_supply(i) for i in range(instance.n)]
    for coalition in range(1, 1 << instance.n):
        seats = floor(coalition_budget(instance, coalition))
        voters = members(coalition)
        if seats == 0 or any(u[i] >= full[i] for i in voters):
            continue
        if _integral_reach(instance, _raised(u, coalition, 1), seats) is None:
            continue
        gain = 1
        while _integral_reach(instance, _raised(u, coalition, gain + 1), seats) is not None:
            gain += 1
        weights = [bin(t & coalition).count("1") for t in instance.types]
        lp = integral_program(instance, _raised(u, coalition, gain), seats, weights, "max")
        best = branch_and_bound(lp)
        y = Committee({t: int(v) for t, v in zip(instance.types, best.x) if v}, integral=True)
        got = utility(instance, y)
        return BlockingCertificate(coalition, y, tuple(got[i] - u[i] for i in voters))
    return None


def verify_pareto(instance, x):
    """An integral committee of size at most ``k`` that Pareto-dominates ``x``.

    Each voter in turn is asked to gain one unit while nobody loses; once a
    dominating committee exists, one with the largest utility sum among
    those weakly above ``u(x)`` is returned.
    """
    _require_committee(instance, x)
    u = list(utility(instance, x))
    for j in range(instance.n):
        demands = list(u)
        demands[j] += 1
        if _integral_reach(instance, demands, instance.k) is None:
            continue
        weights = [bin(t).count("1") for t in instance.types]
        best = branch_and_bound(integral_program(instance, u, instance.k, weights, "max"))
        return Committee({t: int(v) for t, v in zip(instance.types, best.x) if v}, integral=True)
    return None


# --- general model -------------------------------------------------------


@dataclass(frozen=True)
class GeneralCandidate:
    cost: Fraction
    values: tuple


class GeneralInstance:
    """Candidates with individual costs and additive valuations.

    Fractional and integral committees get separate budget bounds, which
    lets the same object express knapsack budgets and quota variants.
    """

    def __init__(self, n, candidates, fractional_budget, integral_budget):
        self.n = n
        cleaned = []
        for cand in candidates:
            if isinstance(cand, GeneralCandidate):
                cost, values = cand.cost, cand.values
            elif isinstance(cand, dict):
                cost, values = cand["cost"], cand["values"]
            else:
                cost, values = cand
            cost = as_rational(cost)
            values = tuple(as_rational(v) for v in values)
            if cost <= 0:
                raise InvalidInstance("candidate costs must be positive")
            if len(values) != n or any(v < 0 for v in values):
                raise InvalidInstance(f"each candidate needs {n} non-negative values")
            cleaned.append(GeneralCandidate(cost, values))
        self.candidates = tuple(cleaned)
        self.fractional_budget = as_rational(fractional_budget)
        self.integral_budget = as_rational(integral_budget)
        if self.fractional_budget < 0 or self.integral_budget < 0:
            raise InvalidInstance("budgets must be non-negative")

    @classmethod
    def from_instance(cls, instance):
        """Unit costs, approval values, one candidate per available seat."""
        cands = []
        for t, count in instance.supply.items():
            values = tuple(t >> i & 1 for i in range(instance.n))
            cands.extend([(1, values)] * count)
        return cls(instance.n, cands, instance.k, instance.k)

    def __repr__(self):
        return (
            f"GeneralInstance(n={self.n}, candidates={len(self.candidates)}, "
            f"fractional_budget={self.fractional_budget}, integral_budget={self.integral_budget})"
        )


@dataclass(frozen=True)
class GapReport:
    """Witness amounts per candidate for each side, or ``None``."""

    fractional: tuple
    integral: tuple

    @property
    def is_gap(self):
        return self.fractional is not None and self.integral is None


def _general_program(g, u, budget):
    m = len(g.candidates)
    lp = LinearProgram(m, [0] * m, [1] * m)
    lp.add([c.cost for c in g.candidates], "<=", budget)
    for i in range(g.n):
        if as_rational(u[i]) > 0:
            lp.add([c.values[i] for c in g.candidates], ">=", u[i])
    return lp


def feasibility_gap(g, u):
    """Compare fractional and integral feasibility of ``u`` in ``g``."""
    if len(u) != g.n:
        raise InvalidInstance(f"utility vector has length {len(u)}, expected {g.n}")
    frac = solve_lp(_general_program(g, u, g.fractional_budget))
    whole = branch_and_bound(_general_program(g, u, g.integral_budget))
    return GapReport(frac.x if frac.optimal else None, None if whole is None else whole.x)
