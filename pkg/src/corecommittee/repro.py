"""Reproductions of the worked examples, one PASS/FAIL line per assertion.

Every reproduction is deterministic, so its output is byte-identical across
runs.
"""

from fractions import Fraction
from importlib import resources

from corecommittee import catalog
from corecommittee.analysis import feasibility_gap, verify_core, verify_pareto
from corecommittee.catalog import T
from corecommittee.integral import check_integralizability, emit_normaliz
from corecommittee.lp import compute_L
from corecommittee.model import Committee, coalition_budget, reduce_profile, type_label, utility
from corecommittee.rules import mes_outcome, pav
from corecommittee.search import canonical_supply, search_nonintegralizable
from corecommittee.solver import N3Trace, solve_core_n3, solve_core_pareto


class Checks:
    """Collects ``(ok, message)`` pairs; an exception in a check counts as a failure."""

    def __init__(self):
        self.results = []

    def check(self, message, predicate):
        try:
            ok = bool(predicate())
        except Exception as exc:  # a crashing check is a failed check
            ok = False
            message = f"{message} ({type(exc).__name__}: {exc})"
        self.results.append((ok, message))
        return ok

    def lines(self):
        return [f"{'PASS' if ok else 'FAIL'}: {msg}" for ok, msg in self.results]

    @property
    def passed(self):
        return all(ok for ok, _ in self.results)


def _fmt(vector):
    return "(" + ",".join(str(v) for v in vector) + ")"


def _coalition(mask):
    return "{" + type_label(mask) + "}"


def pav_counterexample(out):
    instance, _ = reduce_profile(catalog.pav_counterexample_profile())
    out.check(
        "profile reduces to n=3, k=18, b=(6,6,6), c = {1,2}:10, {1}:1, {2}:1, {3}:8",
        lambda: instance == catalog.pav_counterexample(),
    )
    committee = pav(instance)
    u = utility(instance, committee)
    out.check(f"PAV utilities {_fmt(u)} == (10,10,8)", lambda: u == (10, 10, 8))
    cert = verify_core(instance, committee)
    out.check(
        "blocking coalition {1,2} found",
        lambda: cert is not None and cert.coalition == T(1, 2),
    )
    out.check(
        "deviation has 12 candidates and improves both members",
        lambda: cert.deviation.size == 12 and all(g > 0 for g in cert.gains),
    )
    report = solve_core_pareto(instance)
    out.check(
        f"solver output {_fmt(report.utilities)} unblocked",
        lambda: verify_core(instance, report.committee) is None,
    )
    out.check("solver output Pareto-optimal", lambda: verify_pareto(instance, report.committee) is None)


def _gap_example(out, instance, search_args, core):
    ones = (1,) * instance.n
    report = check_integralizability(instance)
    out.check(
        f"gap u={_fmt(ones)} reported",
        lambda: not report.integralizable and report.counterexample[0] == ones,
    )
    witness = report.counterexample[1] if report.counterexample else None
    out.check(
        "fractional witness is 1/2 on every type",
        lambda: witness is not None and all(witness[t] == Fraction(1, 2) for t in instance.types),
    )
    target = canonical_supply(instance.n, instance.supply)
    found = search_nonintegralizable(**search_args)
    out.check(
        f"search({', '.join(f'{k}={v}' for k, v in search_args.items())}) rediscovers it",
        lambda: any(canonical_supply(i.n, i.supply) == target and i.k == instance.k for i, _ in found),
    )
    out.check(
        f"core committee {core!r} is unblocked",
        lambda: verify_core(instance, core) is None,
    )


def ex4_6(out):
    _gap_example(
        out,
        catalog.two_triangles(),
        {"n": 6, "k_max": 3, "type_sizes": (2,)},
        Committee({T(1, 2): 1, T(1, 3): 1, T(4, 5): 1}),
    )


def ex4_7(out):
    _gap_example(
        out,
        catalog.four_candidates(),
        {"n": 6, "k_max": 2, "type_sizes": (3,)},
        Committee({T(1, 2, 6): 1, T(4, 5, 6): 1}),
    )


def _general(out, g, expected):
    report = feasibility_gap(g, (1, 1, 1))
    out.check(
        f"u=(1,1,1) fractionally feasible with x={_fmt(expected)}",
        lambda: report.fractional is not None and tuple(report.fractional) == expected,
    )
    out.check("u=(1,1,1) not integrally feasible", lambda: report.integral is None)


def ex7_1(out):
    half = Fraction(1, 2)
    _general(out, catalog.nonunit_costs(), (half, half, half))


def ex7_2(out):
    third = Fraction(1, 3)
    _general(out, catalog.additive_valuations(), (third, third, third))


def ex7_3(out):
    half = Fraction(1, 2)
    _general(out, catalog.droop(), (half, half, half))


def exB_1(out):
    instance = catalog.mes_three_voters()
    outcome = mes_outcome(instance, catalog.MES_THREE_VOTERS_PRIORITY)
    u_mes = utility(instance, outcome.committee)
    out.check(f"MES utilities {_fmt(u_mes)} == (6,6,3)", lambda: u_mes == (6, 6, 3))
    out.check(
        "MES committee is 6 x {1,2} and 3 x {3}",
        lambda: outcome.committee == Committee({T(1, 2): 6, T(3): 3}),
    )
    better = Committee({T(1, 2): 5, T(1, 3): 2, T(2, 3): 2})
    out.check(
        "grand coalition blocks it with 5 x {1,2}, 2 x {1,3}, 2 x {2,3}",
        lambda: better.size <= coalition_budget(instance, T(1, 2, 3))
        and all(a > b for a, b in zip(utility(instance, better), u_mes)),
    )
    out.check("verify_core confirms a blocking coalition", lambda: verify_core(instance, outcome.committee) is not None)
    trace = N3Trace()
    x = solve_core_n3(instance, trace)
    u = utility(instance, x)
    out.check(
        f"three-voter method gives {_fmt(u)}, strictly better for every voter",
        lambda: all(a > b for a, b in zip(u, u_mes)),
    )
    out.check(f"three-voter committee has size {x.size} == 9", lambda: x.size == 9)
    out.check("three-voter committee unblocked", lambda: verify_core(instance, x) is None)
    out.check("three-voter committee Pareto-optimal", lambda: verify_pareto(instance, x) is None)


def exB_2(out):
    instance = catalog.mes_nine_voters()
    outcome = mes_outcome(instance)
    types = catalog.MES_NINE_TYPES
    expected = Committee({types["a"]: 18, types["b"]: 3, types["c"]: 3, types["d"]: 3})
    out.check("MES selects {a:18, b:3, c:3, d:3}", lambda: outcome.committee == expected)
    u = utility(instance, outcome.committee)
    out.check(f"MES utilities {_fmt(u)} == (18 x6, 6 x3)", lambda: u == (18,) * 6 + (6,) * 3)
    out.check("MES spends every budget", lambda: all(r == 0 for r in outcome.remaining))
    cert = verify_core(instance, outcome.committee)
    coalition = T(1, 2, 3, 4, 7, 8, 9)
    out.check(
        f"blocking coalition {_coalition(coalition)} with budget {coalition_budget(instance, coalition)}",
        lambda: cert is not None and cert.coalition == coalition,
    )
    out.check(
        "deviation is 7 x {e,f,g} (21 candidates)",
        lambda: cert.deviation == Committee({types["e"]: 7, types["f"]: 7, types["g"]: 7}),
    )
    out.check(
        f"gains {_fmt(cert.gains if cert else ())} == (3,3,3,3,1,1,1)",
        lambda: cert.gains == (3, 3, 3, 3, 1, 1, 1),
    )


def table1(out):
    values = tuple(compute_L(n) for n in range(1, 6))
    out.check(f"L = {_fmt(values)} == (1,1,2,6,60)", lambda: values == (1, 1, 2, 6, 60))


def reference_normaliz_n5():
    """The published n = 5 generator file shipped with the package."""
    return resources.files("corecommittee").joinpath("data/normaliz_n5.in").read_text(encoding="utf-8")


def fig5(out):
    text = emit_normaliz(5)
    lines = text.splitlines()
    ref = reference_normaliz_n5().splitlines()
    out.check("headers 'amb_space 37' / 'cone 68'", lambda: lines[:2] == ["amb_space 37", "cone 68"] == ref[:2])
    rows = lines[2:]
    out.check(
        f"{len(rows)} rows of dimension 37",
        lambda: len(rows) == 68 and all(len(r.split()) == 37 for r in rows),
    )
    out.check("row multiset matches the reference", lambda: sorted(rows) == sorted(ref[2:]))
    out.check("file is byte-identical to the reference", lambda: text == reference_normaliz_n5())


REPRODUCTIONS = {
    "fig1": pav_counterexample,
    "ex4.6": ex4_6,
    "ex4.7": ex4_7,
    "ex7.1": ex7_1,
    "ex7.2": ex7_2,
    "ex7.3": ex7_3,
    "exB.1": exB_1,
    "exB.2": exB_2,
    "table1": table1,
    "fig5": fig5,
}


def run(name):
    """Run one reproduction and return its :class:`Checks`."""
    out = Checks()
    REPRODUCTIONS[name](out)
    return out
