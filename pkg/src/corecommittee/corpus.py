"""Seeded random instances for property checks and the command line."""

import random
from fractions import Fraction

from corecommittee.model import Committee, Instance, canonical_types, type_mask


def _rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_budgets(rng, n, k, denominator=6):
    """Positive rational budgets with small denominators summing to ``k``."""
    rng = _rng(rng)
    if k == 0:
        return [Fraction(0)] * n
    weights = [rng.randint(1, denominator) for _ in range(n)]
    total = sum(weights)
    return [Fraction(w * k, total) for w in weights]


def random_instance(
    seed, n=None, n_range=(1, 5), k_max=5, c_max=2, max_types=8, rational_budgets=False, k_min=0, scarce=False
):
    """A random instance with at most ``max_types`` active types.

    ``k`` is drawn from ``k_min..k_max``. Budgets are equal unless
    ``rational_budgets`` is set. With ``scarce`` the draw is repeated until
    the supply exceeds ``k``, so that the committee is a real choice.
    """
    rng = _rng(seed)
    while True:
        n_now = rng.randint(*n_range) if n is None else n
        types = list(canonical_types(n_now))
        chosen = rng.sample(types, rng.randint(1, min(max_types, len(types))))
        supply = {t: rng.randint(1, c_max) for t in chosen}
        k = rng.randint(k_min, k_max)
        if not scarce or sum(supply.values()) > k:
            break
    n = n_now
    budgets = random_budgets(rng, n, k) if rational_budgets else None
    return Instance(n, supply, k, budgets)


def random_utilities(seed, instance, spread=1):
    """An integer vector in ``0..min(k, approved supply) + spread`` per voter."""
    rng = _rng(seed)
    return tuple(
        rng.randint(0, min(instance.k, instance.approved_supply(i)) + spread) for i in range(instance.n)
    )


def random_fractional_committee(seed, instance, denominator=7):
    """A random fractional committee within supply and of size at most ``k``."""
    rng = _rng(seed)
    amounts = {t: Fraction(rng.randint(0, instance.c(t) * denominator), denominator) for t in instance.types}
    size = sum(amounts.values(), Fraction(0))
    if size > instance.k:
        scale = Fraction(instance.k) / size
        amounts = {t: v * scale for t, v in amounts.items()}
    return Committee(amounts, integral=False)


def random_interval_instance(seed, n_max=6, positions_max=8, c_max=2, k_max=4):
    """A candidate-interval instance: every voter approves a run of positions.

    Positions whose approver sets coincide are merged into one type, which
    keeps every voter's types contiguous in the order of first appearance.
    """
    rng = _rng(seed)
    while True:
        n = rng.randint(2, n_max)
        m = rng.randint(2, positions_max)
        runs = []
        for _ in range(n):
            left = rng.randrange(m)
            runs.append((left, rng.randint(left, m - 1)))
        supply = {}
        for pos in range(m):
            mask = type_mask(i for i, (lo, hi) in enumerate(runs) if lo <= pos <= hi)
            if mask:
                supply[mask] = supply.get(mask, 0) + rng.randint(1, c_max)
        if len(supply) > 1:
            return Instance(n, supply, rng.randint(1, k_max))


def random_n3_instance(seed, k_max=9, c_max=4):
    """Three voters, random rational budgets, total supply at least ``k``."""
    rng = _rng(seed)
    while True:
        supply = {t: rng.randint(0, c_max) for t in canonical_types(3)}
        supply = {t: c for t, c in supply.items() if c}
        total = sum(supply.values())
        if total == 0:
            continue
        k = rng.randint(1, min(k_max, total))
        return Instance(3, supply, k, random_budgets(rng, 3, k))
