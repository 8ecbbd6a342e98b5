"""Exact rational linear programming.

The solver is a dense two-phase primal simplex with bounded variables and
Bland's rule. Problems here have at most a few dozen columns, so clarity
wins over sparse tricks. Pivoting uses GMP rationals (``gmpy2.mpq``), which
are an order of magnitude faster than ``Fraction``; results are handed back
as ints and ``Fraction`` values.

On top of it sit the two programs used everywhere else: the
fractional-feasibility system (does some fractional committee of bounded
size give every voter at least ``u_i``?) and ``tau``, the smallest size of
such a committee. ``compute_L`` enumerates binary matrices to find the lcm
of their determinants, which bounds the denominators of ``tau``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm

from gmpy2 import mpq

from corecommittee.errors import InvariantViolation, InvalidInstance, UnsupportedError
from corecommittee.model import Committee, as_rational

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_RELATIONS = ("<=", ">=", "=")


@dataclass
class LinearProgram:
    """A linear program in explicit form.

    Variables have optional lower/upper bounds (``None`` means unbounded).
    Constraint coefficients are given either as a dense sequence or as a
    ``{column: coefficient}`` dict. With ``objective=None`` the program is a
    pure feasibility question.
    """

    num_vars: int
    lower: list = None
    upper: list = None
    objective: object = None
    sense: str = "min"
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if self.lower is None:
            self.lower = [0] * self.num_vars
        if self.upper is None:
            self.upper = [None] * self.num_vars
        if len(self.lower) != self.num_vars or len(self.upper) != self.num_vars:
            raise InvalidInstance("bound vectors must match the number of variables")
        for lo, up in zip(self.lower, self.upper):
            if lo is not None and up is not None and lo > up:
                raise InvalidInstance(f"empty variable range [{lo}, {up}]")
        if self.sense not in ("min", "max"):
            raise InvalidInstance("sense must be 'min' or 'max'")
        if self.objective is not None:
            self.objective = self._dense(self.objective)

    def _dense(self, coeffs):
        if isinstance(coeffs, dict):
            dense = [0] * self.num_vars
            for j, a in coeffs.items():
                dense[j] = a
            return dense
        coeffs = list(coeffs)
        if len(coeffs) != self.num_vars:
            raise InvalidInstance(f"row has {len(coeffs)} entries for {self.num_vars} variables")
        return coeffs

    def add(self, coeffs, relation, rhs):
        """Append the constraint ``coeffs . x  relation  rhs``."""
        if relation not in _RELATIONS:
            raise InvalidInstance(f"unknown relation {relation!r}")
        self.rows.append((self._dense(coeffs), relation, rhs))
        return self


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: object = None
    x: tuple = None

    @property
    def optimal(self):
        return self.status == OPTIMAL


_ZERO = mpq(0)


def _fr(v):
    return mpq(v)


def _norm(v):
    if v.denominator == 1:
        return int(v.numerator)
    return Fraction(int(v.numerator), int(v.denominator))


class _Tableau:
    """Bounded-variable simplex tableau, all columns with lower bound 0."""

    def __init__(self, rows, rhs, upper, basis):
        self.T = rows
        self.m = len(rows)
        self.N = len(upper)
        self.ub = upper
        self.head = basis
        self.val = [_ZERO] * self.N
        for r, h in enumerate(basis):
            self.val[h] = rhs[r]
        self.is_basic = [False] * self.N
        for h in basis:
            self.is_basic[h] = True
        self.blocked = [False] * self.N

    def reduced_costs(self, cost):
        d = list(cost)
        for r, h in enumerate(self.head):
            ch = cost[h]
            if ch:
                row = self.T[r]
                for j in range(self.N):
                    if row[j]:
                        d[j] -= ch * row[j]
        return d

    def pivot(self, r, q, d):
        row = self.T[r]
        p = row[q]
        if p != 1:
            row = [a / p if a else a for a in row]
            self.T[r] = row
        nz = [j for j in range(self.N) if row[j]]
        for s in range(self.m):
            if s == r:
                continue
            other = self.T[s]
            f = other[q]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
        f = d[q]
        if f:
            for j in nz:
                d[j] -= f * row[j]
        self.is_basic[self.head[r]] = False
        self.is_basic[q] = True
        self.head[r] = q

    def run(self, cost):
        """Minimize ``cost . x``. Returns False when unbounded."""
        d = self.reduced_costs(cost)
        T, val, ub = self.T, self.val, self.ub
        while True:
            q = -1
            for j in range(self.N):
                if self.is_basic[j] or self.blocked[j] or ub[j] == 0:
                    continue
                dj = d[j]
                if dj < 0 and val[j] == 0:
                    q, s = j, 1
                    break
                if dj > 0 and ub[j] is not None and val[j] == ub[j]:
                    q, s = j, -1
                    break
            if q < 0:
                return True
            theta = ub[q]
            leave_row, leave_var, leave_to = -1, q, None
            for r in range(self.m):
                t = T[r][q]
                if not t:
                    continue
                if s < 0:
                    t = -t
                h = self.head[r]
                if t > 0:
                    lim, bound = val[h] / t, 0
                elif ub[h] is not None:
                    lim, bound = (ub[h] - val[h]) / -t, ub[h]
                else:
                    continue
                if theta is None or lim < theta or (lim == theta and h < leave_var):
                    theta, leave_row, leave_var, leave_to = lim, r, h, bound
            if theta is None:
                return False
            if theta:
                step = theta if s > 0 else -theta
                val[q] += step
                for r in range(self.m):
                    t = T[r][q]
                    if t:
                        val[self.head[r]] -= step * t
            if leave_row >= 0:
                self.pivot(leave_row, q, d)
                val[leave_var] = mpq(leave_to)


def solve_lp(lp):
    """Solve a :class:`LinearProgram` exactly.

    Returns
    -------
    LpOutcome
        ``status`` is ``"optimal"``, ``"infeasible"`` or ``"unbounded"``.
        For optimal outcomes ``x`` is a basic optimal solution and ``value``
        its objective value (0 for feasibility problems).
    """
    n = lp.num_vars
    # Shift every variable to a column with lower bound 0. Each original
    # variable becomes shift + sum(sign * column).
    pieces = []
    shifts = []
    col_ub = []
    for lo, up in zip(lp.lower, lp.upper):
        lo = None if lo is None else _fr(lo)
        up = None if up is None else _fr(up)
        if lo is not None:
            shifts.append(lo)
            pieces.append(((len(col_ub), 1),))
            col_ub.append(None if up is None else up - lo)
        elif up is not None:
            shifts.append(up)
            pieces.append(((len(col_ub), -1),))
            col_ub.append(None)
        else:
            shifts.append(_ZERO)
            pieces.append(((len(col_ub), 1), (len(col_ub) + 1, -1)))
            col_ub.extend([None, None])
    ncols = len(col_ub)

    def expand(coeffs):
        out = [_ZERO] * ncols
        const = _ZERO
        for j in range(n):
            a = coeffs[j]
            if a:
                a = _fr(a)
                const += a * shifts[j]
                for col, sign in pieces[j]:
                    out[col] += a if sign > 0 else -a
        return out, const

    rows, rhs, slack_of = [], [], []
    for coeffs, rel, b in lp.rows:
        row, const = expand(coeffs)
        rows.append(row)
        rhs.append(_fr(b) - const)
        slack_of.append(rel)
    m = len(rows)
    # Slack columns, then sign normalization so every rhs is >= 0.
    nslack = sum(1 for rel in slack_of if rel != "=")
    total = ncols + nslack
    slack_col = [None] * m
    c = ncols
    for r in range(m):
        rows[r].extend([_ZERO] * nslack)
        if slack_of[r] != "=":
            rows[r][c] = mpq(1 if slack_of[r] == "<=" else -1)
            slack_col[r] = c
            c += 1
        if rhs[r] < 0:
            rows[r] = [-a for a in rows[r]]
            rhs[r] = -rhs[r]
    upper = col_ub + [None] * nslack
    basis = [None] * m
    artificial = []
    for r in range(m):
        sc = slack_col[r]
        if sc is not None and rows[r][sc] == 1:
            basis[r] = sc
    for r in range(m):
        if basis[r] is None:
            artificial.append(total + len(artificial))
    nart = len(artificial)
    a = 0
    for r in range(m):
        rows[r].extend([_ZERO] * nart)
        if basis[r] is None:
            rows[r][total + a] = mpq(1)
            basis[r] = total + a
            a += 1
    upper = upper + [None] * nart
    tab = _Tableau(rows, rhs, upper, basis)

    if nart:
        cost = [0] * total + [1] * nart
        tab.run(cost)
        if any(tab.val[j] for j in artificial):
            return LpOutcome(INFEASIBLE)
        for j in artificial:
            tab.ub[j] = _ZERO
            tab.blocked[j] = True
        for r in range(m):
            if tab.head[r] >= total:
                row = tab.T[r]
                for q in range(total):
                    if row[q] and not tab.is_basic[q]:
                        tab.pivot(r, q, [_ZERO] * tab.N)
                        break

    if lp.objective is not None:
        obj, _ = expand(lp.objective)
        if lp.sense == "max":
            obj = [-v for v in obj]
        cost = obj + [_ZERO] * (nslack + nart)
        if not tab.run(cost):
            return LpOutcome(UNBOUNDED)

    x = []
    for j in range(n):
        v = shifts[j]
        for col, sign in pieces[j]:
            v += tab.val[col] if sign > 0 else -tab.val[col]
        x.append(v)
    _check_solution(lp, x)
    value = 0
    if lp.objective is not None:
        value = _norm(sum((mpq(cj) * xj for cj, xj in zip(lp.objective, x) if cj), _ZERO))
    return LpOutcome(OPTIMAL, value, tuple(_norm(v) for v in x))


def _check_solution(lp, x):
    """Re-substitute an exact solution into every bound and row."""
    for j, (lo, up) in enumerate(zip(lp.lower, lp.upper)):
        if (lo is not None and x[j] < mpq(lo)) or (up is not None and x[j] > mpq(up)):
            raise InvariantViolation(f"simplex returned x[{j}] = {x[j]} outside [{lo}, {up}]")
    for coeffs, rel, b in lp.rows:
        lhs = sum((mpq(a) * xj for a, xj in zip(coeffs, x) if a), _ZERO)
        b = mpq(b)
        ok = lhs <= b if rel == "<=" else lhs >= b if rel == ">=" else lhs == b
        if not ok:
            raise InvariantViolation(f"simplex solution violates a {rel} row: {lhs} vs {b}")


# --- committee programs ----------------------------------------------------


def demand_program(n, types, lower, upper, demands, budget=None, objective=None, sense="min"):
    """LP over amounts of ``types`` with per-voter utility lower bounds.

    Rows are emitted only for positive demands; others are vacuous since
    amounts are non-negative.
    """
    lp = LinearProgram(len(types), list(lower), list(upper), objective, sense)
    for i in range(n):
        if demands[i] > 0:
            lp.add({j: 1 for j, t in enumerate(types) if t >> i & 1}, ">=", demands[i])
    if budget is not None:
        lp.add([1] * len(types), "<=", budget)
    return lp


def _committee(types, x):
    return Committee({t: v for t, v in zip(types, x) if v}, integral=False)


def _demand_exceeds_supply(instance, u):
    return any(u[i] > 0 and u[i] > instance.approved_supply(i) for i in range(instance.n))


def _check_u(instance, u):
    if len(u) != instance.n:
        raise InvalidInstance(f"utility vector has length {len(u)}, expected {instance.n}")
    return [as_rational(v) for v in u]


def fractional_feasible(instance, u, budget=None):
    """A fractional committee giving every voter at least ``u_i``.

    Parameters
    ----------
    instance : Instance
    u : sequence of numbers
        Utility lower bounds; non-positive entries impose nothing.
    budget : number, optional
        Upper bound on the committee size, default ``instance.k``.

    Returns
    -------
    Committee or None
        An exact witness, or ``None`` if no fractional committee exists.
    """
    u = _check_u(instance, u)
    budget = instance.k if budget is None else as_rational(budget)
    if budget < 0 or _demand_exceeds_supply(instance, u):
        return None
    types = instance.types
    lp = demand_program(instance.n, types, [0] * len(types), [instance.c(t) for t in types], u, budget)
    out = solve_lp(lp)
    return _committee(types, out.x) if out.optimal else None


def tau_witness(instance, u):
    """``(tau, witness)`` for the minimum-size program, or ``None``."""
    u = _check_u(instance, u)
    if _demand_exceeds_supply(instance, u):
        return None
    types = instance.types
    lp = demand_program(
        instance.n, types, [0] * len(types), [instance.c(t) for t in types], u, objective=[1] * len(types)
    )
    out = solve_lp(lp)
    if not out.optimal:
        return None
    return out.value, _committee(types, out.x)


def tau(instance, u):
    """Minimum size of a fractional committee realizing ``u``, ignoring ``k``.

    Returns ``None`` when even the full supply cannot realize ``u``.
    """
    found = tau_witness(instance, u)
    return None if found is None else found[0]


# --- denominators ------------------------------------------------------------

# Values of L_1..L_5 as established by enumeration; compute_L recomputes them.
KNOWN_L = {1: 1, 2: 1, 3: 2, 4: 6, 5: 60}


@lru_cache(maxsize=None)
def _determinants(order):
    """Set of |det| over invertible binary matrices of the given order.

    Rows are chosen as increasing tuples of distinct non-zero vectors; a
    repeated row or any reordering cannot produce a new absolute value.
    Each new row is reduced against the echelon basis of the rows before
    it, and a dependent prefix is pruned together with all its extensions.
    """
    vectors = [tuple(mpq((v >> (order - 1 - c)) & 1) for c in range(order)) for v in range(1, 1 << order)]
    dets = set()

    def extend(start, basis, det):
        if len(basis) == order:
            dets.add(abs(det))
            return
        for idx in range(start, len(vectors)):
            row = list(vectors[idx])
            for piv_col, piv_row in basis:
                f = row[piv_col]
                if f:
                    f /= piv_row[piv_col]
                    row = [a - f * b for a, b in zip(row, piv_row)]
            col = next((c for c in range(order) if row[c]), None)
            if col is None:
                continue
            basis.append((col, row))
            extend(idx + 1, basis, det * row[col])
            basis.pop()

    extend(0, [], mpq(1))
    for d in dets:
        if d.denominator != 1:
            raise InvariantViolation(f"non-integral determinant {d}")
    return frozenset(int(d) for d in dets)


def compute_L(n):
    """Least common multiple of |det B| over invertible 0/1 matrices of order <= n."""
    if not isinstance(n, int) or not 1 <= n <= 5:
        raise UnsupportedError("compute_L is only enumerated for 1 <= n <= 5")
    value = 1
    for order in range(1, n + 1):
        for d in _determinants(order):
            value = lcm(value, d)
    return value


def denominator_bound(n):
    """``L_n`` for ``n <= 5`` without re-enumerating."""
    if n not in KNOWN_L:
        raise UnsupportedError(f"no denominator bound for n = {n}")
    return KNOWN_L[n]


__all__ = [
    "LinearProgram",
    "LpOutcome",
    "solve_lp",
    "fractional_feasible",
    "tau",
    "tau_witness",
    "compute_L",
    "denominator_bound",
    "demand_program",
]
