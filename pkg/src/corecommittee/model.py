"""Data model: candidate types, instances, committees and utilities.

Voters are numbered ``0..n-1``. A candidate type is the set of voters
approving it, stored as an integer bitmask (bit ``i`` set iff voter ``i``
approves). Coalitions use the same encoding. Human-facing labels are 1-based,
so the mask ``0b011`` prints as ``"1,2"``.

All numbers are exact: integers or :class:`fractions.Fraction`.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from numbers import Rational

from corecommittee.errors import InconsistencyError, InvalidInstance, InvalidProfile, UnsupportedError

MAX_VOTERS = 16


def as_rational(value):
    """Convert an int, Fraction or numeric string to an exact number.

    Integers stay integers; everything else becomes a ``Fraction``. Floats
    are refused because their binary expansion is rarely what was meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        q = Fraction(value.strip())
        return q.numerator if q.denominator == 1 else q
    if isinstance(value, Rational):
        return as_rational(Fraction(value.numerator, value.denominator))
    raise TypeError(f"expected an exact number, got {type(value).__name__}")


def is_integer(value):
    return isinstance(value, int) or (isinstance(value, Fraction) and value.denominator == 1)


# --- candidate types -------------------------------------------------------


def members(mask):
    """Sorted tuple of the voters in ``mask``."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def type_mask(voters):
    """Bitmask of an iterable of 0-based voter indices."""
    mask = 0
    for i in voters:
        mask |= 1 << i
    return mask


def type_key(mask):
    """Canonical sort key: cardinality first, then lexicographic members."""
    m = members(mask)
    return (len(m), m)


@lru_cache(maxsize=None)
def canonical_types(n):
    """All ``2**n - 1`` non-empty types of ``n`` voters in canonical order."""
    if not 1 <= n <= MAX_VOTERS:
        raise UnsupportedError(f"n must be between 1 and {MAX_VOTERS}, got {n}")
    return tuple(type_mask(c) for size in range(1, n + 1) for c in combinations(range(n), size))


def type_label(mask):
    """1-based comma separated label, e.g. ``"1,2"``."""
    return ",".join(str(i + 1) for i in members(mask))


def parse_type(label, n):
    """Inverse of :func:`type_label`, validated against ``n`` voters."""
    try:
        voters = [int(part) - 1 for part in str(label).split(",")]
    except ValueError:
        raise InvalidInstance(f"malformed candidate type {label!r}") from None
    if not voters or any(not 0 <= i < n for i in voters) or len(set(voters)) != len(voters):
        raise InvalidInstance(f"candidate type {label!r} is not a non-empty subset of 1..{n}")
    return type_mask(voters)


def check_type(mask, n):
    if not isinstance(mask, int) or mask <= 0 or mask >> n:
        raise InvalidInstance(f"{mask!r} is not a candidate type for {n} voters")


# --- instances -------------------------------------------------------------


class Instance:
    """A committee election with few voter types.

    Parameters
    ----------
    n : int
        Number of voters (voter types), at most 16.
    supply : mapping of int to int
        Number of available candidates per type bitmask. Zero entries are
        dropped.
    k : int
        Committee size.
    budgets : sequence of numbers, optional
        One non-negative budget per voter, summing exactly to ``k``. Defaults
        to ``k/n`` each.
    """

    __slots__ = ("n", "k", "budgets", "_supply", "types")

    def __init__(self, n, supply, k, budgets=None):
        if not isinstance(n, int) or not 1 <= n <= MAX_VOTERS:
            raise InvalidInstance(f"n must be an integer in 1..{MAX_VOTERS}")
        if not isinstance(k, int) or isinstance(k, bool) or k < 0:
            raise InvalidInstance("k must be a non-negative integer")
        cleaned = {}
        for mask, count in dict(supply).items():
            check_type(mask, n)
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise InvalidInstance(f"supply of type {type_label(mask)} must be a non-negative integer")
            if count:
                cleaned[mask] = count
        if budgets is None:
            budgets = [Fraction(k, n)] * n
        budgets = tuple(as_rational(b) for b in budgets)
        if len(budgets) != n:
            raise InvalidInstance(f"expected {n} budgets, got {len(budgets)}")
        if any(b < 0 for b in budgets):
            raise InvalidInstance("budgets must be non-negative")
        if sum(budgets) != k:
            raise InvalidInstance(f"budgets sum to {sum(budgets)}, not k = {k}")
        self.n = n
        self.k = k
        self.budgets = budgets
        self.types = tuple(sorted(cleaned, key=type_key))
        self._supply = {t: cleaned[t] for t in self.types}

    @property
    def supply(self):
        """Supply per active type, in canonical type order (a copy)."""
        return dict(self._supply)

    def c(self, mask):
        """Supply of one type (0 if absent)."""
        return self._supply.get(mask, 0)

    @property
    def total_supply(self):
        return sum(self._supply.values())

    def approved_supply(self, i):
        """Number of available candidates voter ``i`` approves."""
        return sum(c for t, c in self._supply.items() if t >> i & 1)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.n, self.k, self.budgets, self._supply) == (other.n, other.k, other.budgets, other._supply)

    def __hash__(self):
        return hash((self.n, self.k, self.budgets, tuple(self._supply.items())))

    def __repr__(self):
        supply = ", ".join(f"{{{type_label(t)}}}: {c}" for t, c in self._supply.items())
        budgets = ", ".join(str(b) for b in self.budgets)
        return f"Instance(n={self.n}, k={self.k}, budgets=({budgets}), supply={{{supply}}})"


# --- committees ------------------------------------------------------------


class Committee:
    """Non-negative amounts per candidate type.

    ``integral`` defaults to whether all amounts are integers. An integral
    committee stores plain ints.
    """

    __slots__ = ("_amounts", "integral")

    def __init__(self, amounts=None, integral=None):
        cleaned = {}
        for mask, value in dict(amounts or {}).items():
            if not isinstance(mask, int) or mask <= 0:
                raise InvalidInstance(f"{mask!r} is not a candidate type")
            value = as_rational(value)
            if value < 0:
                raise InvalidInstance(f"negative amount {value} for type {type_label(mask)}")
            if value:
                cleaned[mask] = value
        all_int = all(is_integer(v) for v in cleaned.values())
        if integral is None:
            integral = all_int
        if integral:
            if not all_int:
                raise InvalidInstance("integral committee with fractional amounts")
            cleaned = {t: int(v) for t, v in cleaned.items()}
        self._amounts = {t: cleaned[t] for t in sorted(cleaned, key=type_key)}
        self.integral = bool(integral)

    def __getitem__(self, mask):
        return self._amounts.get(mask, 0)

    def __iter__(self):
        return iter(self._amounts)

    def __len__(self):
        return len(self._amounts)

    def items(self):
        return self._amounts.items()

    @property
    def amounts(self):
        return dict(self._amounts)

    @property
    def size(self):
        return sum(self._amounts.values(), 0)

    def __add__(self, other):
        merged = dict(self._amounts)
        for t, v in other.items():
            merged[t] = merged.get(t, 0) + v
        return Committee(merged, integral=self.integral and other.integral)

    def __eq__(self, other):
        if not isinstance(other, Committee):
            return NotImplemented
        return self._amounts == other._amounts

    def __hash__(self):
        return hash(tuple(self._amounts.items()))

    def __repr__(self):
        body = ", ".join(f"{{{type_label(t)}}}: {v}" for t, v in self._amounts.items())
        kind = "integral" if self.integral else "fractional"
        return f"Committee({kind}, {{{body}}})"


def utility(instance, x):
    """Per-voter utility ``u_i(x) = sum of x_R over types R containing i``."""
    u = [0] * instance.n
    for mask, amount in x.items():
        check_type(mask, instance.n)
        for i in members(mask):
            u[i] += amount
    return tuple(as_rational(v) for v in u)


def coalition_budget(instance, coalition):
    """Total budget ``b(S)`` of a coalition bitmask."""
    check_type(coalition, instance.n)
    return as_rational(sum((instance.budgets[i] for i in members(coalition)), 0))


def is_affordable(instance, x, coalition):
    """Whether ``x`` respects supplies and fits in the coalition's budget.

    For integral committees this is membership in the set of integral
    committees the coalition can afford. A fractional committee is accepted
    whenever its amounts are in range.
    """
    budget = coalition_budget(instance, coalition)
    for mask, amount in x.items():
        if mask <= 0 or mask >> instance.n:
            return False
        if amount > instance.c(mask):
            return False
        if x.integral and not is_integer(amount):
            return False
    return x.size <= budget


# --- approval profiles -----------------------------------------------------


@dataclass(frozen=True)
class ApprovalProfile:
    """Raw approval ballots over named candidates."""

    candidates: tuple
    approvals: tuple
    k: int

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "approvals", tuple(frozenset(a) for a in self.approvals))
        if len(set(self.candidates)) != len(self.candidates):
            raise InvalidProfile("duplicate candidate names")
        if not isinstance(self.k, int) or self.k < 0:
            raise InvalidProfile("k must be a non-negative integer")
        known = set(self.candidates)
        for pos, ballot in enumerate(self.approvals):
            unknown = ballot - known
            if unknown:
                raise InvalidProfile(f"voter {pos + 1} approves unknown candidates {sorted(unknown)}")


def reduce_profile(profile):
    """Collapse identical ballots into weighted voter types.

    Voter types are numbered by first occurrence in the profile. Each type
    gets budget ``multiplicity * k / N``. Candidates nobody approves are
    dropped.

    Returns
    -------
    tuple
        ``(instance, type_assignment)`` where ``type_assignment`` maps each
        approved candidate name to its type bitmask, in candidate order.
    """
    if not profile.approvals:
        raise InvalidProfile("profile has no voters")
    ballots = []
    counts = []
    for ballot in profile.approvals:
        if ballot in ballots:
            counts[ballots.index(ballot)] += 1
        else:
            ballots.append(ballot)
            counts.append(1)
    t = len(ballots)
    if t > MAX_VOTERS:
        raise UnsupportedError(f"{t} distinct ballots; at most {MAX_VOTERS} voter types are supported")
    total = len(profile.approvals)
    budgets = [Fraction(m * profile.k, total) for m in counts]
    assignment = {}
    supply = {}
    for name in profile.candidates:
        mask = type_mask(i for i, ballot in enumerate(ballots) if name in ballot)
        if mask:
            assignment[name] = mask
            supply[mask] = supply.get(mask, 0) + 1
    return Instance(t, supply, profile.k, budgets), assignment


def expand_committee(instance, type_assignment, x):
    """Pick concrete candidate names realizing an integral committee.

    The first ``x_R`` names of each type, in the assignment's order, are
    chosen.
    """
    if not x.integral:
        raise InvalidInstance("only integral committees can be expanded")
    by_type = {}
    for name, mask in type_assignment.items():
        by_type.setdefault(mask, []).append(name)
    chosen = []
    for mask, amount in x.items():
        names = by_type.get(mask, [])
        if amount > len(names) or amount > instance.c(mask):
            raise InconsistencyError(f"committee takes {amount} of type {type_label(mask)}, only {len(names)} named")
        chosen.extend(names[:amount])
    return frozenset(chosen)
