"""Proportional Approval Voting and the Method of Equal Shares.

Both work directly on type counts. Voter types are weighted by their
budgets, which is what the rules compute on the underlying profile when a
type stands for several identical voters.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from corecommittee.errors import ResourceLimitError
from corecommittee.model import Committee, members, utility

DEFAULT_PAV_CAP = 10**6


def _harmonic_table(limit):
    """Integer-scaled harmonic numbers ``D * H(0..limit)`` and their scale D."""
    scale = lcm(*range(1, limit + 1)) if limit else 1
    table = [0]
    for j in range(1, limit + 1):
        table.append(table[-1] + scale // j)
    return table


def pav_score(instance, x):
    """Budget-weighted PAV score ``sum_i b_i H(u_i(x))`` as an exact rational."""
    u = utility(instance, x)
    return sum((Fraction(b) * sum((Fraction(1, j) for j in range(1, u_i + 1)), Fraction(0))
                for b, u_i in zip(instance.budgets, u)), Fraction(0))


def pav(instance, cap=DEFAULT_PAV_CAP):
    """Committee maximizing the budget-weighted PAV score.

    Ties go to the lexicographically largest vector of type counts in
    canonical type order. The search is a depth-first branch and bound that
    visits count vectors in decreasing lexicographic order and keeps only
    strict improvements.

    Raises
    ------
    ResourceLimitError
        If more than ``cap`` search nodes are needed.
    """
    types = instance.types
    n, k = instance.n, instance.k
    H = _harmonic_table(k)
    denom = lcm(*(Fraction(b).denominator for b in instance.budgets))
    weights = [int(b * denom) for b in instance.budgets]
    # avail[j][i]: candidates voter i approves among types j, j+1, ...
    avail = [[0] * n for _ in range(len(types) + 1)]
    for j in range(len(types) - 1, -1, -1):
        for i in range(n):
            avail[j][i] = avail[j + 1][i] + (instance.c(types[j]) if types[j] >> i & 1 else 0)
    voters_of = [members(t) for t in types]
    best_score = -1
    best = None
    counts = [0] * len(types)
    u = [0] * n
    nodes = 0

    def score():
        return sum(w * H[v] for w, v in zip(weights, u))

    def bound(j, seats):
        return sum(w * (H[min(k, v + min(seats, avail[j][i]))] - H[v]) for i, (w, v) in enumerate(zip(weights, u)))

    def visit(j, seats, current):
        nonlocal best_score, best, nodes
        nodes += 1
        if nodes > cap:
            raise ResourceLimitError(f"PAV search exceeded {cap} nodes")
        if j == len(types) or seats == 0:
            if current > best_score:
                best_score, best = current, list(counts)
            return
        if current + bound(j, seats) <= best_score:
            return
        for m in range(min(instance.c(types[j]), seats), -1, -1):
            counts[j] = m
            for i in voters_of[j]:
                u[i] += m
            visit(j + 1, seats - m, score())
            for i in voters_of[j]:
                u[i] -= m
        counts[j] = 0

    visit(0, k, 0)
    return Committee({t: m for t, m in zip(types, best) if m}, integral=True)


@dataclass(frozen=True)
class MesOutcome:
    committee: Committee
    payments: tuple
    remaining: tuple


def _rho(budgets):
    """Smallest rho with ``sum(min(b, rho)) == 1``, or None if unaffordable."""
    if sum(budgets) < 1:
        return None
    need = Fraction(1)
    left = len(budgets)
    for b in sorted(budgets):
        if b * left >= need:
            return need / left
        need -= b
        left -= 1
    return None


def mes_outcome(instance, priority=None):
    """Method of Equal Shares with unit costs, without any completion step.

    Each round buys one candidate of the affordable type with the smallest
    per-voter price ``rho``. Ties follow ``priority`` (a list of type
    bitmasks) and then canonical type order.
    """
    order = list(priority or [])
    order += [t for t in instance.types if t not in order]
    rank = {t: r for r, t in enumerate(order)}
    budget = [Fraction(b) for b in instance.budgets]
    paid = [Fraction(0)] * instance.n
    x = {}
    while sum(x.values()) < instance.k:
        best = None
        for t in instance.types:
            if x.get(t, 0) >= instance.c(t):
                continue
            rho = _rho([budget[i] for i in members(t)])
            if rho is not None and (best is None or (rho, rank[t]) < (best[0], rank[best[1]])):
                best = (rho, t)
        if best is None:
            break
        rho, t = best
        for i in members(t):
            share = min(budget[i], rho)
            budget[i] -= share
            paid[i] += share
        x[t] = x.get(t, 0) + 1
    return MesOutcome(Committee(x, integral=True), tuple(paid), tuple(budget))


def mes(instance, priority=None):
    """The committee chosen by :func:`mes_outcome`."""
    return mes_outcome(instance, priority).committee
