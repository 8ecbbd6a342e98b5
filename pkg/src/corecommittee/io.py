"""JSON formats for instances, profiles, general instances and committees.

Rationals are written as strings, ``"p/q"`` or plain integers, and read
back from either form or from decimal strings. Candidate types are keyed
by 1-based comma-separated labels such as ``"1,2"``.
"""

import json

from corecommittee.analysis import GeneralInstance
from corecommittee.errors import InvalidInstance
from corecommittee.model import (
    ApprovalProfile,
    Committee,
    Instance,
    as_rational,
    parse_type,
    reduce_profile,
    type_label,
)


def rational_str(value):
    return str(as_rational(value))


def _number(value, what):
    if isinstance(value, float):
        raise InvalidInstance(f"{what}: write {value!r} as a string to keep it exact")
    try:
        return as_rational(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InvalidInstance(f"{what}: {value!r} is not a rational number") from None


def _require(data, *keys):
    if not isinstance(data, dict):
        raise InvalidInstance("expected a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise InvalidInstance(f"missing field(s): {', '.join(missing)}")


# --- instances -------------------------------------------------------------


def instance_to_dict(instance):
    return {
        "n": instance.n,
        "k": instance.k,
        "budgets": [rational_str(b) for b in instance.budgets],
        "supply": {type_label(t): instance.c(t) for t in instance.types},
    }


def instance_from_dict(data):
    _require(data, "n", "k", "supply")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidInstance("n must be an integer")
    supply = {}
    for label, count in data["supply"].items():
        mask = parse_type(label, n)
        if mask in supply:
            raise InvalidInstance(f"type {label!r} listed twice")
        supply[mask] = _number(count, f"supply of {label}")
    budgets = data.get("budgets")
    if budgets is not None:
        budgets = [_number(b, "budget") for b in budgets]
    return Instance(n, supply, _number(data["k"], "k"), budgets)


def profile_from_dict(data):
    _require(data, "k", "candidates", "approvals")
    return ApprovalProfile(data["candidates"], data["approvals"], data["k"])


def profile_to_dict(profile):
    return {
        "k": profile.k,
        "candidates": list(profile.candidates),
        "approvals": [[c for c in profile.candidates if c in ballot] for ballot in profile.approvals],
    }


def load_instance(data):
    """An :class:`Instance` from an instance or a profile object.

    Profiles are reduced to voter types; the candidate assignment is
    returned alongside (``None`` for plain instances).
    """
    if isinstance(data, dict) and "approvals" in data:
        return reduce_profile(profile_from_dict(data))
    return instance_from_dict(data), None


# --- committees ------------------------------------------------------------


def committee_to_dict(x):
    return {type_label(t): rational_str(v) for t, v in x.items()}


def committee_from_dict(data, n):
    if not isinstance(data, dict):
        raise InvalidInstance("a committee is a JSON object of type counts")
    return Committee({parse_type(label, n): _number(v, f"amount of {label}") for label, v in data.items()})


# --- general instances -----------------------------------------------------


def general_to_dict(g):
    return {
        "n": g.n,
        "fractional_budget": rational_str(g.fractional_budget),
        "integral_budget": rational_str(g.integral_budget),
        "candidates": [
            {"cost": rational_str(c.cost), "values": [rational_str(v) for v in c.values]} for c in g.candidates
        ],
    }


def general_from_dict(data):
    _require(data, "n", "fractional_budget", "integral_budget", "candidates")
    cands = []
    for pos, cand in enumerate(data["candidates"]):
        _require(cand, "cost", "values")
        cost = _number(cand["cost"], f"cost of candidate {pos + 1}")
        cands.append((cost, [_number(v, f"value of candidate {pos + 1}") for v in cand["values"]]))
    return GeneralInstance(
        data["n"],
        cands,
        _number(data["fractional_budget"], "fractional_budget"),
        _number(data["integral_budget"], "integral_budget"),
    )


def read_json(path):
    """Parse a JSON file, turning I/O and syntax problems into ``InvalidInstance``."""
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInstance(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
