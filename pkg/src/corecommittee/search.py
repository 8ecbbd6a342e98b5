"""Exhaustive search for instances that are not integralizable.

Supply vectors are enumerated up to voter relabelling: multisets of types
are grown one type at a time and each is reduced to a canonical form, the
smallest sorted tuple of type masks over all voter permutations. Every
isomorphism class is reached because deleting any type from a multiset
leaves a smaller multiset whose canonical copy was already expanded.
"""

from concurrent.futures import ProcessPoolExecutor
import numpy as np

from corecommittee.errors import ResourceLimitError, UnsupportedError
from corecommittee.integral import check_integralizability, permutation_table
from corecommittee.model import Instance, canonical_types, members, type_key

DEFAULT_SEARCH_CAP = 10**6


def _canonical(table, masks):
    if not masks:
        return ()
    images = np.ascontiguousarray(np.sort(table[:, list(masks)], axis=1).astype(np.uint8))
    # rows as byte strings compare lexicographically
    keys = images.view(f"S{len(masks)}").ravel()
    best = images[int(np.argmin(keys))]
    return tuple(int(v) for v in best)


def canonical_supply(n, supply):
    """Canonical sorted tuple of type masks (with multiplicity) for a supply."""
    masks = [t for t, c in sorted(supply.items()) for _ in range(c)]
    return _canonical(permutation_table(n)[0], masks)


def _allowed_types(n, max_type_size, type_sizes):
    if type_sizes is None:
        limit = n if max_type_size is None else max_type_size
        type_sizes = range(1, limit + 1)
    sizes = set(type_sizes)
    return [t for t in canonical_types(n) if len(members(t)) in sizes]


def enumerate_supplies(n, allowed, supply_cap, cap=DEFAULT_SEARCH_CAP):
    """All non-empty supply multisets over ``allowed`` up to isomorphism."""
    table = permutation_table(n)[0]
    level = {()}
    found = []
    while level:
        nxt = set()
        for multiset in sorted(level):
            for t in allowed:
                if multiset.count(t) >= supply_cap:
                    continue
                nxt.add(_canonical(table, multiset + (t,)))
        if len(found) + len(nxt) > cap:
            raise ResourceLimitError(f"more than {cap} supply classes", partial=found)
        found.extend(sorted(nxt))
        level = nxt
    return found


def _check(job):
    n, multiset, k = job
    supply = {}
    for t in multiset:
        supply[t] = supply.get(t, 0) + 1
    instance = Instance(n, supply, k)
    report = check_integralizability(instance)
    if report.integralizable:
        return None
    return instance, report.counterexample[0]


def search_nonintegralizable(n, k_max, max_type_size=None, supply_cap=1, type_sizes=None, cap=DEFAULT_SEARCH_CAP, jobs=1):
    """Find non-integralizable instances with bounded size.

    Parameters
    ----------
    n : int
        Number of voters, at most 6.
    k_max : int
        Committee sizes ``2..k_max`` are checked (sizes 0 and 1 are always
        integralizable).
    max_type_size : int, optional
        Only types with at most this many voters. Ignored if ``type_sizes``
        is given.
    supply_cap : int
        Largest supply per type.
    type_sizes : iterable of int, optional
        Exact set of allowed type cardinalities, e.g. ``{3}``.
    cap : int
        Largest number of (supply class, k) pairs to check.
    jobs : int
        Worker processes for the checks.

    Returns
    -------
    list of (Instance, tuple)
        Each non-integralizable instance with its smallest gap vector,
        sorted by supply class and then k.
    """
    if not 1 <= n <= 6:
        raise UnsupportedError("the search supports 1 <= n <= 6")
    allowed = _allowed_types(n, max_type_size, type_sizes)
    classes = enumerate_supplies(n, allowed, supply_cap, cap)
    jobs_list = [(n, m, k) for m in sorted(classes, key=lambda m: (len(m), [type_key(t) for t in m])) for k in range(2, k_max + 1)]
    if len(jobs_list) > cap:
        raise ResourceLimitError(f"{len(jobs_list)} checks exceed the cap {cap}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check, jobs_list, chunksize=64))
    else:
        results = [_check(job) for job in jobs_list]
    return [r for r in results if r is not None]
