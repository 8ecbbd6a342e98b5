"""Core committees for at most five voter types, and a direct method for three.

The general pipeline: compute an approximate fractional core point with a
tiny budget overshoot, round every voter's utility down, and realize the
rounded utilities integrally. The overshoot is small enough that the
rounded vector still fits within ``k``, because the minimum fractional size
of an integral utility vector has denominator dividing ``L_n``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from corecommittee.errors import InfeasibleStartError, InvariantViolation, PreconditionError, UnsupportedError
from corecommittee.fractional import approx_fractional_core, default_epsilon
from corecommittee.integral import round_committee
from corecommittee.lp import fractional_feasible, tau_witness
from corecommittee.model import Committee, members, type_mask, utility


@dataclass(frozen=True)
class SolveReport:
    committee: Committee
    utilities: tuple
    fractional_point: Committee
    epsilon: Fraction
    pareto_order: tuple = None


def _require_supported(instance):
    if instance.n > 5:
        raise UnsupportedError(f"core computation needs at most 5 voter types, got {instance.n}")


def _floored_utilities(instance, epsilon=None):
    epsilon = default_epsilon(instance.n) if epsilon is None else Fraction(epsilon)
    point = approx_fractional_core(instance, epsilon)
    u = tuple(floor(v) for v in utility(instance, point.x))
    return u, point.x, epsilon


def _realize(instance, u):
    found = tau_witness(instance, u)
    if found is None or found[0] > instance.k:
        size = None if found is None else found[0]
        raise InvariantViolation(f"utility vector {u} needs fractional size {size} > k = {instance.k}")
    return round_committee(instance, found[1])


def solve_core(instance, epsilon=None):
    """An integral committee that no coalition can block.

    ``epsilon`` overrides the budget overshoot of the fractional step; values
    above ``1 / L_n`` void the guarantee and may raise InvariantViolation.

    Raises
    ------
    UnsupportedError
        For more than five voter types.
    """
    _require_supported(instance)
    u, x, epsilon = _floored_utilities(instance, epsilon)
    committee = _realize(instance, u)
    return SolveReport(committee, utility(instance, committee), x, epsilon)


def pareto_improve(instance, u, order=None):
    """Serial dictatorship over utility levels.

    Voters in ``order`` (default index order) raise their own level one unit
    at a time for as long as the whole vector stays fractionally feasible
    within ``k``.
    """
    order = tuple(range(instance.n)) if order is None else tuple(order)
    if sorted(order) != list(range(instance.n)):
        raise PreconditionError(f"{order} is not a permutation of the voters")
    u = [int(v) for v in u]
    if fractional_feasible(instance, u) is None:
        raise InfeasibleStartError(f"{tuple(u)} is not fractionally feasible within k = {instance.k}")
    for i in order:
        while u[i] < instance.approved_supply(i):
            u[i] += 1
            if fractional_feasible(instance, u) is None:
                u[i] -= 1
                break
    return tuple(u)


def solve_core_pareto(instance, order=None, epsilon=None):
    """A Pareto-optimal integral core committee (at most five voter types)."""
    _require_supported(instance)
    order = tuple(range(instance.n)) if order is None else tuple(order)
    u, x, epsilon = _floored_utilities(instance, epsilon)
    improved = pareto_improve(instance, [max(0, v) for v in u], order)
    committee = _realize(instance, improved)
    return SolveReport(committee, utility(instance, committee), x, epsilon, order)


# --- three voters ----------------------------------------------------------


@dataclass
class N3Trace:
    """Bookkeeping snapshots of the three-voter method (sorted labels)."""

    checkpoints: list = field(default_factory=list)


def _relabel(mask, perm):
    return type_mask(perm[i] for i in members(mask))


def solve_core_n3(instance, trace=None):
    """Pareto-optimal core committee of size exactly ``k`` for three voters.

    Voters are internally relabelled by decreasing budget. Candidates
    approved by all three are split as evenly as budgets allow, pair
    candidates go to the pair whose poorer member is richest (ties favour
    the pair with more candidates left, then lexicographic order), then each
    voter buys singletons with whole remaining units and leftover seats are
    filled from larger approval sets first.

    Parameters
    ----------
    trace : N3Trace, optional
        Receives ``(x, B)`` snapshots after each budget-spending phase.
    """
    if instance.n != 3:
        raise PreconditionError("this method needs exactly three voters")
    if instance.total_supply < instance.k:
        raise PreconditionError("the supply must contain at least k candidates")
    # perm[old] = new label, richest voter first (stable)
    ranked = sorted(range(3), key=lambda i: -instance.budgets[i])
    perm = {old: new for new, old in enumerate(ranked)}
    inverse = {new: old for old, new in perm.items()}
    supply = {_relabel(t, perm): c for t, c in instance.supply.items()}
    B = [Fraction(instance.budgets[inverse[i]]) for i in range(3)]
    k = instance.k
    x = {}
    left = lambda t: supply.get(t, 0) - x.get(t, 0)  # noqa: E731
    size = lambda: sum(x.values())  # noqa: E731
    third, half = Fraction(1, 3), Fraction(1, 2)

    def checkpoint(stage):
        if size() + sum(B) != k or any(b < 0 for b in B):
            raise InvariantViolation(f"budget accounting broken after {stage}: x={x}, B={B}")
        if trace is not None:
            trace.checkpoints.append((stage, dict(x), tuple(B)))

    everyone = 0b111
    while size() < k and left(everyone) > 0:
        x[everyone] = x.get(everyone, 0) + 1
        p3 = min(B[2], third)
        p2 = min(B[1], (1 - p3) / 2)
        p1 = 1 - p2 - p3
        B = [B[0] - p1, B[1] - p2, B[2] - p3]
    checkpoint("unanimous")

    pairs = [(0, 1), (0, 2), (1, 2)]
    while True:
        options = [(i, j) for i, j in pairs if B[i] + B[j] >= 1 and left(type_mask((i, j))) > 0]
        if not options:
            break
        # ties on the poorer budget: more remaining supply, then lexicographic
        i, j = max(options, key=lambda p: (min(B[p[0]], B[p[1]]), left(type_mask(p)), -pairs.index(p)))
        if B[j] > B[i]:
            i, j = j, i
        t = type_mask((i, j))
        x[t] = x.get(t, 0) + 1
        paid = min(B[j], half)
        B[i] -= 1 - paid
        B[j] -= paid
    checkpoint("pairs")

    for i in range(3):
        t = 1 << i
        take = min(floor(B[i]), left(t))
        if take > 0:
            x[t] = x.get(t, 0) + take
            B[i] -= take
    checkpoint("singletons")

    for t in [type_mask(p) for p in pairs]:
        while size() < k and left(t) > 0:
            x[t] = x.get(t, 0) + 1
    for t in (1, 2, 4):
        while size() < k and left(t) > 0:
            x[t] = x.get(t, 0) + 1
    if size() != k:
        raise InvariantViolation(f"three-voter method produced size {size()} instead of {k}")
    return Committee({_relabel(t, inverse): v for t, v in x.items()}, integral=True)


__all__ = [
    "SolveReport",
    "N3Trace",
    "solve_core",
    "pareto_improve",
    "solve_core_pareto",
    "solve_core_n3",
]
