"""Fractional core: an approximate solver and an exact verifier.

The solver works in floating point on a convex spending program. Every voter
``i`` splits their budget into contributions ``q_iR`` towards approved types
(the amount of type ``R`` is the sum of contributions, capped by supply) and
an unspent part ``w_i``. The program maximizes

    - sum_{i,R} q_iR log(q_iR / x_R)  +  log(1/2) sum_i w_i.

At an optimum the ratios ``q_iR / x_R`` are per-voter prices that sum to one
on each type with every voter spending only on their cheapest approved
types, so the amounts form a capped Lindahl equilibrium, which lies in the
fractional core. Unspent money occurs only when all of a voter's approved
types are exhausted.

The float solution is rationalized, every voter's approved types are raised
by a small exact amount (at most ``epsilon / (n + 1)`` per voter) to absorb
solver error, and the result is checked exactly by
:func:`verify_fractional_core`.
"""

from dataclasses import dataclass
from fractions import Fraction

import cvxpy as cp
import numpy as np

from corecommittee.errors import ConvergenceError, PreconditionError
from corecommittee.lp import KNOWN_L, LinearProgram, solve_lp
from corecommittee.model import Committee, as_rational, coalition_budget, members, utility

# Tolerance and rationalization precision per refinement round.
_ROUNDS = ((1e-8, 10**6), (1e-10, 10**9), (1e-12, 10**12))


@dataclass(frozen=True)
class FractionalCorePoint:
    x: Committee
    epsilon_used: Fraction
    verified: bool


def default_epsilon(n):
    """``1 / (L_n + 1)``, defined for ``n <= 5``."""
    if n not in KNOWN_L:
        raise PreconditionError(f"no default epsilon for n = {n}; pass one explicitly")
    return Fraction(1, KNOWN_L[n] + 1)


def verify_fractional_core(instance, x):
    """Find a coalition that can fractionally improve on ``x``.

    Coalitions are tried in increasing bitmask order. For each, an LP
    maximizes the smallest improvement ``t`` over members subject to the
    coalition's budget; the first coalition with ``t > 0`` is returned with
    its deviation.

    Returns
    -------
    tuple or None
        ``(coalition, committee)`` or ``None`` if ``x`` is in the fractional
        core.
    """
    u = utility(instance, x)
    types = instance.types
    caps = [instance.c(t) for t in types]
    full = [instance.approved_supply(i) for i in range(instance.n)]
    for coalition in range(1, 1 << instance.n):
        budget = coalition_budget(instance, coalition)
        voters = members(coalition)
        if budget == 0 or any(u[i] >= full[i] for i in voters):
            continue
        m = len(types)
        lp = LinearProgram(m + 1, [0] * m + [None], caps + [None], {m: 1}, "max")
        for i in voters:
            row = {j: 1 for j, t in enumerate(types) if t >> i & 1}
            row[m] = -1
            lp.add(row, ">=", u[i])
        lp.add({j: 1 for j in range(m)}, "<=", budget)
        out = solve_lp(lp)
        if out.optimal and out.value > 0:
            y = Committee({t: v for t, v in zip(types, out.x) if v}, integral=False)
            return coalition, y
    return None


def _spending_program(instance, tol):
    """Float amounts per active type from the spending program, or None."""
    types = instance.types
    pairs = [(i, j) for j, t in enumerate(types) for i in range(instance.n) if t >> i & 1 and instance.budgets[i] > 0]
    if not pairs:
        return np.zeros(len(types))
    P = len(pairs)
    to_type = np.zeros((len(types), P))
    to_voter = np.zeros((instance.n, P))
    for p, (i, j) in enumerate(pairs):
        to_type[j, p] = 1
        to_voter[i, p] = 1
    same_type = to_type.T @ to_type
    q = cp.Variable(P, nonneg=True)
    w = cp.Variable(instance.n, nonneg=True)
    budgets = np.array([float(b) for b in instance.budgets])
    caps = np.array([float(instance.c(t)) for t in types])
    objective = cp.Maximize(-cp.sum(cp.rel_entr(q, same_type @ q)) + np.log(0.5) * cp.sum(w))
    constraints = [to_voter @ q + w == budgets, to_type @ q <= caps]
    problem = cp.Problem(objective, constraints)
    attempts = [
        ("CLARABEL", dict(tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol, max_iter=500)),
        ("SCS", dict(eps=tol, max_iters=200000)),
    ]
    for solver, opts in attempts:
        try:
            problem.solve(solver=solver, **opts)
        except (cp.SolverError, ValueError):
            continue
        if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) and q.value is not None:
            return np.clip(to_type @ q.value, 0, caps)
    return None


def _rationalize(instance, amounts, denominator, slack):
    x = {}
    for t, v in zip(instance.types, amounts):
        r = Fraction(float(v)).limit_denominator(denominator)
        r = min(max(r, Fraction(0)), Fraction(instance.c(t)))
        if r:
            x[t] = r
    total = sum(x.values(), Fraction(0))
    if total > instance.k + slack:
        scale = (instance.k + slack) / total
        x = {t: v * scale for t, v in x.items()}
    return x


def _bump(instance, x, step):
    """Raise each funded voter's approved types by ``min(step, residual)``."""
    x = dict(x)
    for i in range(instance.n):
        if instance.budgets[i] <= 0:
            continue
        left = step
        for t in instance.types:
            if not left:
                break
            if t >> i & 1:
                room = instance.c(t) - x.get(t, 0)
                add = min(room, left)
                if add > 0:
                    x[t] = x.get(t, 0) + add
                    left -= add
    return x


def approx_fractional_core(instance, epsilon=None):
    """A fractional committee of size at most ``k + epsilon`` in the fractional core.

    Parameters
    ----------
    instance : Instance
    epsilon : number, optional
        Allowed budget overshoot, strictly positive. Defaults to
        ``1 / (L_n + 1)`` for ``n <= 5``.

    Returns
    -------
    FractionalCorePoint
        Always verified exactly before it is returned.

    Raises
    ------
    ConvergenceError
        If no refinement round yields a certified point.
    """
    epsilon = default_epsilon(instance.n) if epsilon is None else Fraction(as_rational(epsilon))
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    if instance.total_supply <= instance.k:
        x = Committee(instance.supply)
        return FractionalCorePoint(x, epsilon, verify_fractional_core(instance, x) is None)
    step = epsilon / (instance.n + 1)
    certificate = None
    for tol, denominator in _ROUNDS:
        amounts = _spending_program(instance, tol)
        if amounts is None:
            continue
        x = _bump(instance, _rationalize(instance, amounts, denominator, step), step)
        x = Committee(x, integral=False)
        blocker = verify_fractional_core(instance, x)
        if blocker is None:
            return FractionalCorePoint(x, epsilon, True)
        certificate = blocker
    raise ConvergenceError("no certified fractional core point after all refinement rounds", certificate)
