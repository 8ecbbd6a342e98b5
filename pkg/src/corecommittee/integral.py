"""From fractional to integral committees.

This module holds the integer side of the story: a depth-first
branch-and-bound over committee amounts, the per-type rounding procedure
that is guaranteed to work for at most five voter types, an exhaustive
integralizability checker, candidate-interval detection, and the generators
of the committee election monoid together with their Normaliz encoding.
"""

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import permutations
from math import floor, lcm, prod

import numpy as np

from corecommittee.errors import (
    InvalidInstance,
    InvariantViolation,
    PreconditionError,
    ResourceLimitError,
    UnsupportedError,
)
from corecommittee.lp import LinearProgram, demand_program, fractional_feasible, solve_lp
from corecommittee.model import Committee, Instance, canonical_types, members, type_key, utility

DEFAULT_CAP = 10**7


# --- branch and bound ------------------------------------------------------


def branch_and_bound(lp, order=None):
    """Integer optimum (or any integer point) of a bounded LP.

    Every variable must have finite bounds. Branching takes the first
    fractional variable in ``order`` (default: column order) and explores
    the ceiling side first.

    Returns
    -------
    LpOutcome or None
        For a feasibility LP the first integral point found; otherwise an
        optimal integral point. ``None`` if there is no integral point.
    """
    if any(b is None for b in lp.lower) or any(b is None for b in lp.upper):
        raise InvalidInstance("branch and bound needs finite bounds on every variable")
    order = list(range(lp.num_vars)) if order is None else list(order)
    maximize = lp.sense == "max"
    best = None
    stack = [(list(lp.lower), list(lp.upper))]
    while stack:
        lower, upper = stack.pop()
        node = LinearProgram(lp.num_vars, lower, upper, lp.objective, lp.sense, lp.rows)
        out = solve_lp(node)
        if not out.optimal:
            continue
        if best is not None:
            if maximize and out.value <= best.value:
                continue
            if not maximize and out.value >= best.value:
                continue
        j = next((j for j in order if Fraction(out.x[j]).denominator != 1), None)
        if j is None:
            if lp.objective is None:
                return out
            best = out
            continue
        v = Fraction(out.x[j])
        down_upper = list(upper)
        down_upper[j] = floor(v)
        up_lower = list(lower)
        up_lower[j] = floor(v) + 1
        stack.append((list(lower), down_upper))
        stack.append((up_lower, list(upper)))
    return best


def _branch_order(types):
    return sorted(range(len(types)), key=lambda j: (-bin(types[j]).count("1"), type_key(types[j])))


def _clamp(u):
    return [max(0, v) for v in u]


def integral_program(instance, demands, budget, objective=None, sense="max"):
    """Demand LP over the instance's active types with integral bounds."""
    types = instance.types
    cap = floor(budget)
    upper = [min(instance.c(t), cap) for t in types]
    return demand_program(instance.n, types, [0] * len(types), upper, demands, cap, objective, sense)


def oracle_integral_feasible(instance, u, budget=None):
    """An integral committee of size at most ``budget`` realizing ``u``.

    Complete search: ``None`` means no such committee exists. ``budget``
    defaults to ``instance.k``; negative demands are treated as zero.
    """
    if len(u) != instance.n:
        raise InvalidInstance(f"utility vector has length {len(u)}, expected {instance.n}")
    u = _clamp(u)
    budget = instance.k if budget is None else budget
    if all(v == 0 for v in u):
        return Committee({}, integral=True)
    if budget < 0 or any(u[i] > instance.approved_supply(i) for i in range(instance.n)):
        return None
    types = instance.types
    out = branch_and_bound(integral_program(instance, u, budget, sense="min"), _branch_order(types))
    if out is None:
        return None
    return Committee({t: int(v) for t, v in zip(types, out.x) if v}, integral=True)


# --- rounding --------------------------------------------------------------


def _require_small(instance):
    if instance.n > 5:
        raise UnsupportedError("rounding is only guaranteed for at most 5 voter types")


def _require_in_p(instance, x):
    for t, v in x.items():
        if t >> instance.n or v > instance.c(t):
            raise PreconditionError(f"amount {v} of type {t} exceeds the supply {instance.c(t)}")
    if x.size > instance.k:
        raise PreconditionError(f"committee size {x.size} exceeds k = {instance.k}")


def round_committee(instance, x):
    """Round a fractional committee without losing any voter's floor utility.

    Each amount moves to its floor or ceiling, the size stays within ``k``,
    and every voter keeps at least the floor of their utility under ``x``.
    Types with a fractional amount are probed in canonical order: a type is
    rounded up whenever the remaining deficit can still be covered
    fractionally with that type fixed at one.
    """
    _require_small(instance)
    _require_in_p(instance, x)
    target = [floor(v) for v in utility(instance, x)]
    rounded = {t: floor(v) for t, v in x.items()}
    pending = [t for t in x if Fraction(x[t]).denominator != 1]

    def deficit():
        got = utility(instance, Committee(rounded, integral=True))
        return [target[i] - got[i] for i in range(instance.n)]

    need = deficit()
    while any(d > 0 for d in need):
        if not pending:
            raise InvariantViolation(f"rounding stalled for {instance!r} and {x!r}")
        lower = [0] * len(pending)
        lower[0] = 1
        budget = instance.k - sum(rounded.values())
        lp = demand_program(instance.n, pending, lower, [1] * len(pending), need, budget)
        if solve_lp(lp).optimal:
            rounded[pending[0]] += 1
            need = deficit()
        pending.pop(0)
    return Committee(rounded, integral=True)


def round_utilities(instance, x):
    """``(floor(u(x)), committee)`` where the committee realizes the floors."""
    witness = round_committee(instance, x)
    return tuple(floor(v) for v in utility(instance, x)), witness


# --- integralizability -----------------------------------------------------


@dataclass(frozen=True)
class IntegralizabilityReport:
    integralizable: bool
    counterexample: tuple = None

    def __post_init__(self):
        if self.integralizable == (self.counterexample is not None):
            raise InvalidInstance("a counterexample is present exactly when the instance is not integralizable")


_INF = np.iinfo(np.int32).max // 2


def _saturating_shift(arr, axis, m):
    """Move every entry ``m`` steps up ``axis``, piling overflow on the last index."""
    d = arr.shape[axis]
    out = np.full_like(arr, _INF)
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if m < d - 1:
        src[axis] = slice(0, d - 1 - m)
        dst[axis] = slice(m, d - 1)
        out[tuple(dst)] = arr[tuple(src)]
    src[axis] = slice(max(0, d - 1 - m), d)
    last = [slice(None)] * arr.ndim
    last[axis] = d - 1
    out[tuple(last)] = arr[tuple(src)].min(axis=axis)
    return out


def integral_feasible_set(instance, bounds):
    """Boolean array over ``0 <= u <= bounds`` of integral-feasible vectors.

    A dynamic program over types keeps, for each utility vector capped at
    ``bounds``, the smallest committee size reaching it exactly; the
    feasible set is then closed downwards.
    """
    shape = tuple(b + 1 for b in bounds)
    best = np.full(shape, _INF, dtype=np.int64)
    best[(0,) * len(shape)] = 0
    for t in instance.types:
        voters = members(t)
        reach = max(bounds[i] for i in voters)
        copies = min(instance.c(t), instance.k, reach)
        new = best.copy()
        for m in range(1, copies + 1):
            shifted = best
            for i in voters:
                shifted = _saturating_shift(shifted, i, m)
            np.minimum(new, shifted + m, out=new)
        best = new
    feasible = best <= instance.k
    for axis in range(feasible.ndim):
        flipped = np.flip(feasible, axis=axis)
        feasible = np.flip(np.logical_or.accumulate(flipped, axis=axis), axis=axis)
    return feasible


def check_integralizability(instance, cap=DEFAULT_CAP):
    """Search for a fractionally but not integrally feasible utility vector.

    All integral ``u`` with ``0 <= u_i <= min(k, approved supply of i)`` are
    covered. The lexicographically smallest gap is reported; its integral
    infeasibility is re-certified by branch and bound.

    Raises
    ------
    ResourceLimitError
        If the box of utility vectors has more than ``cap`` points.
    """
    if instance.n > 8:
        raise UnsupportedError("integralizability checks are limited to n <= 8")
    bounds = [min(instance.k, instance.approved_supply(i)) for i in range(instance.n)]
    size = prod(b + 1 for b in bounds)
    if size > cap:
        raise ResourceLimitError(f"{size} utility vectors exceed the enumeration cap {cap}")
    feasible = integral_feasible_set(instance, bounds)
    minimal = ~feasible
    for axis in range(feasible.ndim):
        below = np.zeros_like(feasible)
        src = [slice(None)] * feasible.ndim
        dst = [slice(None)] * feasible.ndim
        src[axis] = slice(0, -1)
        dst[axis] = slice(1, None)
        below[tuple(dst)] = feasible[tuple(src)]
        edge = [slice(None)] * feasible.ndim
        edge[axis] = 0
        below[tuple(edge)] = True
        minimal &= below
    points = np.argwhere(minimal)
    points = points[~_subset_bound_refutes(instance, points)]
    certificates = _Certificates(instance)
    for point in points:
        u = tuple(int(v) for v in point)
        if certificates.refutes(u):
            continue
        cert = farkas_certificate(instance, u)
        if cert is not None:
            certificates.add(cert)
            continue
        witness = fractional_feasible(instance, u)
        if oracle_integral_feasible(instance, u) is not None:
            raise InvariantViolation(f"integral dynamic program missed a witness for {u}")
        return IntegralizabilityReport(False, (u, witness))
    return IntegralizabilityReport(True)


def _subset_bound_refutes(instance, points):
    """Rows of ``points`` that some voter group provably cannot reach.

    A group ``S`` collects at most the best fractional use of ``k`` seats
    weighted by ``|R & S|``; a point whose members' demands add up to more
    is fractionally infeasible.
    """
    n = instance.n
    refuted = np.zeros(len(points), dtype=bool)
    if len(points) == 0:
        return refuted
    for group in range(1, 1 << n):
        gains = sorted(((bin(t & group).count("1"), instance.c(t)) for t in instance.types), reverse=True)
        seats, reach = instance.k, 0
        for gain, count in gains:
            take = min(seats, count)
            reach += gain * take
            seats -= take
        inside = np.array([group >> i & 1 for i in range(n)], dtype=np.int64)
        refuted |= points @ inside > reach
    return refuted


def farkas_certificate(instance, u):
    """Voter weights proving that ``u`` is not fractionally feasible within ``k``.

    Returns ``(y, mu)`` such that ``sum u_i y_i`` exceeds
    ``mu k + sum_R c_R max(0, y(R) - mu)``, or ``None`` when ``u`` is
    feasible. Found by solving the normalized dual program exactly.
    """
    types = instance.types
    n, m = instance.n, len(types)
    # columns: y_0..y_{n-1}, mu, z_R
    lp = LinearProgram(
        n + 1 + m,
        [0] * (n + 1 + m),
        [1] * n + [None] * (m + 1),
        [u[i] for i in range(n)] + [-instance.k] + [-instance.c(t) for t in types],
        "max",
    )
    for j, t in enumerate(types):
        row = {i: 1 for i in members(t)}
        row[n] = -1
        row[n + 1 + j] = -1
        lp.add(row, "<=", 0)
    out = solve_lp(lp)
    if out.value <= 0:
        return None
    return tuple(out.x[:n]), out.x[n]


class _Certificates:
    """Farkas certificates closed under the instance's voter symmetries.

    A certificate ``(y, mu)`` refutes ``u`` iff ``u . y > penalty`` where the
    penalty does not depend on ``u``; both sides are scaled to integers.
    """

    def __init__(self, instance):
        self.instance = instance
        self.symmetries = None
        self.weights = np.zeros((0, instance.n), dtype=object)
        self.rows = []
        self.penalties = []

    def add(self, cert):
        y, mu = cert
        if self.symmetries is None:
            self.symmetries = _automorphisms(self.instance)
        for perm in self.symmetries:
            py = [0] * len(y)
            for i, v in enumerate(y):
                py[perm[i]] = v
            py = tuple(py)
            if py in self.rows:
                continue
            penalty = mu * self.instance.k
            for t in self.instance.types:
                excess = sum(py[i] for i in members(t)) - mu
                if excess > 0:
                    penalty += self.instance.c(t) * excess
            scale = lcm(*(Fraction(v).denominator for v in py + (penalty,)))
            self.rows.append(py)
            self.penalties.append(int(penalty * scale))
            row = np.array([[int(v * scale) for v in py]], dtype=object)
            self.weights = np.vstack([self.weights, row])

    def refutes(self, u):
        if not self.rows:
            return False
        return bool((self.weights.dot(np.array(u, dtype=object)) > np.array(self.penalties, dtype=object)).any())


@lru_cache(maxsize=None)
def permutation_table(n):
    """``table[p, mask]``: ``mask`` with voters renamed by the p-th permutation.

    Also returns the permutations themselves, in ``itertools`` order.
    """
    perms = list(permutations(range(n)))
    table = np.zeros((len(perms), 1 << n), dtype=np.int64)
    for p, perm in enumerate(perms):
        for i in range(n):
            bit = (np.arange(1 << n) >> i) & 1
            table[p] |= bit << perm[i]
    return table, perms


def _automorphisms(instance):
    table, perms = permutation_table(instance.n)
    masks = np.array([t for t, c in instance.supply.items() for _ in range(c)], dtype=np.int64)
    if masks.size == 0:
        return perms
    images = np.sort(table[:, masks], axis=1)
    keep = (images == np.sort(masks)).all(axis=1)
    return [perms[p] for p in np.flatnonzero(keep)]


def is_candidate_interval(instance):
    """An ordering of the active types making each voter's types contiguous.

    Returns ``None`` if no such ordering exists. Brute force with pruning, so
    at most 10 active types are accepted.
    """
    types = instance.types
    if len(types) > 10:
        raise UnsupportedError(f"{len(types)} active types; at most 10 are supported")
    n = instance.n

    def place(order, left, state):
        if not left:
            return tuple(order)
        for t in left:
            nxt = list(state)
            ok = True
            for i in range(n):
                inside = t >> i & 1
                if inside and state[i] == 2:
                    ok = False
                    break
                if inside:
                    nxt[i] = 1
                elif state[i] == 1:
                    nxt[i] = 2
            if ok:
                found = place(order + [t], [s for s in left if s != t], nxt)
                if found:
                    return found
        return None

    return place([], list(types), [0] * n)


# --- the monoid ------------------------------------------------------------


@dataclass(frozen=True)
class MonoidGenerator:
    """One generator: ``kind`` is ``"X"``, ``"Z"``, ``"T"`` or ``"S"``.

    ``param`` is the type bitmask for X and Z, the voter index for S, and
    ``None`` for T.
    """

    kind: str
    param: object
    vector: tuple


def monoid_generators(n):
    """Generators in order X_R, Z_R (canonical type order), T, S_1..S_n."""
    if not 1 <= n <= 6:
        raise UnsupportedError("monoid generators are provided for 1 <= n <= 6")
    types = canonical_types(n)
    width = len(types)

    def e(index, length):
        return tuple(1 if j == index else 0 for j in range(length))

    gens = []
    for j, t in enumerate(types):
        gens.append(MonoidGenerator("X", t, e(j, width) + (1,) + tuple(t >> i & 1 for i in range(n))))
    for j, t in enumerate(types):
        gens.append(MonoidGenerator("Z", t, e(j, width) + (0,) + (0,) * n))
    gens.append(MonoidGenerator("T", None, (0,) * width + (1,) + (0,) * n))
    for i in range(n):
        gens.append(MonoidGenerator("S", i, (0,) * width + (0,) + tuple(-v for v in e(i, n))))
    return gens


def emit_normaliz(n):
    """Normaliz input text for the monoid cone with ``n`` voters."""
    gens = monoid_generators(n)
    lines = [f"amb_space {len(gens[0].vector)}", f"cone {len(gens)}"]
    lines.extend(" ".join(str(v) for v in g.vector) for g in gens)
    return "\n".join(lines) + "\n"


def monoid_member(n, point):
    """Decompose ``point`` into generators, or return ``None``.

    The point is read as ``(c, k, u)``. The returned tuple lists one
    non-negative multiplicity per generator of :func:`monoid_generators`.
    """
    types = canonical_types(n)
    width = len(types)
    point = [int(v) for v in point]
    if len(point) != width + 1 + n:
        raise InvalidInstance(f"point has dimension {len(point)}, expected {width + 1 + n}")
    supply = point[:width]
    k = point[width]
    u = point[width + 1 :]
    if k < 0 or any(c < 0 for c in supply):
        return None
    instance = Instance(n, {t: c for t, c in zip(types, supply) if c}, k)
    x = oracle_integral_feasible(instance, u)
    if x is None:
        return None
    got = utility(instance, x)
    mult = [x[t] for t in types]
    mult += [c - x[t] for t, c in zip(types, supply)]
    mult.append(k - x.size)
    mult += [got[i] - u[i] for i in range(n)]
    return tuple(mult)
