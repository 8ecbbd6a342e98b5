"""Brute-force references that enumerate every integral committee.

They share nothing with the package beyond the data model, so agreement
with the fast routines is meaningful. Only usable on tiny instances.
"""

from fractions import Fraction
from itertools import product
from math import floor

from corecommittee.model import Committee, coalition_budget, members, utility


def committees(instance, budget):
    """Every integral committee within supply and of size at most ``budget``."""
    types = instance.types
    for counts in product(*(range(instance.c(t) + 1) for t in types)):
        if sum(counts) <= budget:
            yield Committee(dict(zip(types, counts)), integral=True)


def integral_feasible(instance, u, budget=None):
    budget = instance.k if budget is None else budget
    return any(all(a >= b for a, b in zip(utility(instance, x), u)) for x in committees(instance, budget))


def blocked(instance, x):
    """Some coalition with a committee it can afford that all members prefer."""
    u = utility(instance, x)
    for coalition in range(1, 1 << instance.n):
        seats = floor(coalition_budget(instance, coalition))
        for y in committees(instance, seats):
            got = utility(instance, y)
            if all(got[i] > u[i] for i in members(coalition)):
                return True
    return False


def dominated(instance, x):
    u = utility(instance, x)
    for y in committees(instance, instance.k):
        got = utility(instance, y)
        if all(a >= b for a, b in zip(got, u)) and got != u:
            return True
    return False


def pav_best(instance):
    def score(x):
        return sum(
            Fraction(b) * sum(Fraction(1, j) for j in range(1, v + 1))
            for b, v in zip(instance.budgets, utility(instance, x))
        )

    return max(score(x) for x in committees(instance, instance.k))
