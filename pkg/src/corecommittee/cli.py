"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 resource cap reached.
"""

import argparse
import json
import sys
from fractions import Fraction

from corecommittee import io
from corecommittee.analysis import feasibility_gap, verify_core, verify_pareto
from corecommittee.corpus import random_instance
from corecommittee.errors import (
    ConvergenceError,
    CoreCommitteeError,
    InvariantViolation,
    ResourceLimitError,
)
from corecommittee.fractional import approx_fractional_core
from corecommittee.integral import DEFAULT_CAP, check_integralizability, emit_normaliz, round_committee
from corecommittee.lp import tau_witness
from corecommittee.model import Committee, expand_committee, members, parse_type, type_label, utility
from corecommittee.repro import REPRODUCTIONS, run
from corecommittee.rules import DEFAULT_PAV_CAP, mes_outcome, pav
from corecommittee.search import DEFAULT_SEARCH_CAP, search_nonintegralizable
from corecommittee.solver import N3Trace, solve_core_n3, solve_core_pareto

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(CoreCommitteeError):
    pass


# --- argument helpers ------------------------------------------------------


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number") from None


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return value


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma separated list of integers") from None


def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="instance, profile or general-instance JSON file")
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--epsilon", type=_rational, metavar="P/Q", help="budget overshoot of the fractional step")
    common.add_argument("--order", type=_int_list, metavar="I,J,K", help="1-based voter order for Pareto improvement")
    common.add_argument("--jobs", type=_positive_int, default=1, metavar="N")
    common.add_argument("--cap", type=_positive_int, metavar="N", help="resource cap of the chosen search")
    common.add_argument("--seed", type=int, default=0, metavar="N", help="seed for random corpora")
    return common


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(
        prog="corecommittee",
        description="Core committees for approval elections with few voter types. "
        "Options go after the command name.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, description=help_text, parents=[common])

    add("solve", "Pareto-optimal core committee (at most five voter types)")
    add("solve-n3", "core committee of size k for three voters")
    for name, text in (("verify-core", "search for a blocking coalition"), ("verify-pareto", "search for a dominating committee")):
        p = add(name, text)
        p.add_argument("--committee", metavar="PATH", help="committee JSON (or a 'committee' field in the input)")
    add("check-integralizable", "look for a fractionally but not integrally feasible utility vector")
    p = add("tau", "minimum fractional committee size realizing a utility vector")
    p.add_argument("--utilities", type=_int_list, required=True, metavar="U1,U2,...")
    p = add("round", "round a fractional committee keeping floor utilities")
    p.add_argument("--committee", metavar="PATH")
    add("fractional-core", "approximate fractional core point, verified exactly")
    p = add("rule", "run a voting rule")
    p.add_argument("rule", choices=("pav", "mes"))
    p.add_argument("--priority", metavar="R;R;...", help="MES tie-break types, e.g. '1,2;3'")
    p = add("search-nonintegralizable", "enumerate small non-integralizable instances")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--k-max", type=_positive_int, required=True)
    p.add_argument("--max-type-size", type=_positive_int)
    p.add_argument("--type-sizes", type=_int_list, metavar="S1,S2")
    p.add_argument("--supply-cap", type=_positive_int, default=1)
    p = add("emit-normaliz", "Normaliz input for the monoid cone")
    p.add_argument("n", type=_positive_int)
    p.add_argument("--output", metavar="PATH")
    p = add("gap", "fractional versus integral feasibility in a general instance")
    p.add_argument("--utilities", type=_int_list, required=True, metavar="U1,U2,...")
    p = add("repro", "run a named reproduction")
    p.add_argument("example", choices=tuple(REPRODUCTIONS))
    add("random-instance", "print a random instance for --seed")
    return parser


# --- output ------------------------------------------------------------------


def _vec(values):
    return "(" + ", ".join(str(v) for v in values) + ")"


def _committee_text(x):
    if not len(x):
        return "{}"
    return ", ".join(f"{{{type_label(t)}}}: {v}" for t, v in x.items())


def _utilities_json(values):
    return [io.rational_str(v) for v in values]


class Output:
    def __init__(self, fmt, stream):
        self.fmt = fmt
        self.stream = stream
        self.data = {}
        self.lines = []

    def put(self, key, human, value):
        self.data[key] = value
        self.lines.append(f"{key}: {human}")

    def text(self, line):
        self.lines.append(line)

    def flush(self):
        if self.fmt == "json":
            json.dump(self.data, self.stream, indent=2)
            self.stream.write("\n")
        else:
            for line in self.lines:
                self.stream.write(line + "\n")


# --- commands ----------------------------------------------------------------


def _load(args):
    if not args.input:
        raise UsageError("--input is required")
    data = io.read_json(args.input)
    instance, assignment = io.load_instance(data)
    return data, instance, assignment


def _committee_arg(args, data, n):
    if getattr(args, "committee", None):
        raw = io.read_json(args.committee)
    elif isinstance(data, dict) and "committee" in data:
        raw = data["committee"]
    else:
        raise UsageError("a committee is required (--committee or a 'committee' field)")
    return io.committee_from_dict(raw, n)


def _order(args, n):
    if args.order is None:
        return None
    order = tuple(i - 1 for i in args.order)
    if sorted(order) != list(range(n)):
        raise UsageError(f"--order must be a permutation of 1..{n}")
    return order


def _report_committee(out, instance, assignment, x):
    out.put("instance", f"n={instance.n} k={instance.k} budgets={_vec(instance.budgets)}", io.instance_to_dict(instance))
    out.put("committee", _committee_text(x), io.committee_to_dict(x))
    out.put("size", str(x.size), io.rational_str(x.size))
    u = utility(instance, x)
    out.put("utilities", _vec(u), _utilities_json(u))
    if assignment is not None and x.integral:
        names = sorted(expand_committee(instance, assignment, x), key=list(assignment).index)
        out.put("candidates", " ".join(names), names)


def cmd_solve(args, out):
    _, instance, assignment = _load(args)
    report = solve_core_pareto(instance, _order(args, instance.n), args.epsilon)
    _report_committee(out, instance, assignment, report.committee)
    out.put("epsilon", str(report.epsilon), io.rational_str(report.epsilon))
    return EXIT_OK


def cmd_solve_n3(args, out):
    _, instance, assignment = _load(args)
    trace = N3Trace()
    x = solve_core_n3(instance, trace)
    _report_committee(out, instance, assignment, x)
    stages = []
    for stage, amounts, budgets in trace.checkpoints:
        out.text(f"after {stage}: x = {_committee_text(Committee(amounts))}, B = {_vec(budgets)}")
        stages.append({"stage": stage, "x": io.committee_to_dict(Committee(amounts)), "B": _utilities_json(budgets)})
    out.data["trace"] = stages
    return EXIT_OK


def cmd_verify_core(args, out):
    data, instance, _ = _load(args)
    x = _committee_arg(args, data, instance.n)
    cert = verify_core(instance, x)
    if cert is None:
        out.put("core", "no blocking coalition", True)
        return EXIT_OK
    out.put("core", "blocked", False)
    coalition = [i + 1 for i in members(cert.coalition)]
    out.put("coalition", "{" + ",".join(map(str, coalition)) + "}", coalition)
    out.put("deviation", _committee_text(cert.deviation), io.committee_to_dict(cert.deviation))
    out.put("deviation_size", str(cert.deviation.size), cert.deviation.size)
    out.put("gains", _vec(cert.gains), _utilities_json(cert.gains))
    return EXIT_FAILED


def cmd_verify_pareto(args, out):
    data, instance, _ = _load(args)
    x = _committee_arg(args, data, instance.n)
    better = verify_pareto(instance, x)
    if better is None:
        out.put("pareto_optimal", "yes", True)
        return EXIT_OK
    out.put("pareto_optimal", "no", False)
    out.put("dominating", _committee_text(better), io.committee_to_dict(better))
    out.put("utilities", _vec(utility(instance, better)), _utilities_json(utility(instance, better)))
    return EXIT_FAILED


def cmd_check(args, out):
    _, instance, _ = _load(args)
    report = check_integralizability(instance, args.cap or DEFAULT_CAP)
    out.put("integralizable", "yes" if report.integralizable else "no", report.integralizable)
    if report.integralizable:
        return EXIT_OK
    u, witness = report.counterexample
    out.put("gap", _vec(u), list(u))
    out.put("fractional_witness", _committee_text(witness), io.committee_to_dict(witness))
    return EXIT_FAILED


def cmd_tau(args, out):
    _, instance, _ = _load(args)
    found = tau_witness(instance, args.utilities)
    if found is None:
        out.put("tau", "infinite (supply too small)", None)
        return EXIT_OK
    value, witness = found
    out.put("tau", str(value), io.rational_str(value))
    out.put("witness", _committee_text(witness), io.committee_to_dict(witness))
    return EXIT_OK


def cmd_round(args, out):
    data, instance, assignment = _load(args)
    x = _committee_arg(args, data, instance.n)
    rounded = round_committee(instance, x)
    out.put("input_utilities", _vec(utility(instance, x)), _utilities_json(utility(instance, x)))
    _report_committee(out, instance, assignment, rounded)
    return EXIT_OK


def cmd_fractional(args, out):
    _, instance, _ = _load(args)
    point = approx_fractional_core(instance, args.epsilon)
    out.put("committee", _committee_text(point.x), io.committee_to_dict(point.x))
    out.put("size", str(point.x.size), io.rational_str(point.x.size))
    u = utility(instance, point.x)
    out.put("utilities", _vec(u), _utilities_json(u))
    out.put("epsilon", str(point.epsilon_used), io.rational_str(point.epsilon_used))
    out.put("verified", "yes" if point.verified else "no", point.verified)
    return EXIT_OK if point.verified else EXIT_FAILED


def cmd_rule(args, out):
    _, instance, assignment = _load(args)
    if args.rule == "pav":
        x = pav(instance, args.cap or DEFAULT_PAV_CAP)
        _report_committee(out, instance, assignment, x)
        return EXIT_OK
    priority = None
    if args.priority:
        priority = [parse_type(label, instance.n) for label in args.priority.split(";") if label.strip()]
    outcome = mes_outcome(instance, priority)
    _report_committee(out, instance, assignment, outcome.committee)
    out.put("payments", _vec(outcome.payments), _utilities_json(outcome.payments))
    out.put("remaining", _vec(outcome.remaining), _utilities_json(outcome.remaining))
    return EXIT_OK


def cmd_search(args, out):
    found = search_nonintegralizable(
        args.n,
        args.k_max,
        max_type_size=args.max_type_size,
        supply_cap=args.supply_cap,
        type_sizes=args.type_sizes,
        cap=args.cap or DEFAULT_SEARCH_CAP,
        jobs=args.jobs,
    )
    out.put("count", str(len(found)), len(found))
    items = []
    for instance, u in found:
        supply = ", ".join(f"{{{type_label(t)}}}: {instance.c(t)}" for t in instance.types)
        out.text(f"k={instance.k} supply={{{supply}}} gap={_vec(u)}")
        items.append({"instance": io.instance_to_dict(instance), "gap": list(u)})
    out.data["instances"] = items
    return EXIT_OK


def cmd_emit(args, out):
    text = emit_normaliz(args.n)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror}") from None
        out.put("written", args.output, args.output)
    elif args.format == "json":
        out.data["normaliz"] = text
    else:
        out.stream.write(text)
    return EXIT_OK


def cmd_gap(args, out):
    if not args.input:
        raise UsageError("--input is required")
    g = io.general_from_dict(io.read_json(args.input))
    report = feasibility_gap(g, args.utilities)
    for side in ("fractional", "integral"):
        witness = getattr(report, side)
        human = "infeasible" if witness is None else _vec(witness)
        out.put(side, human, None if witness is None else _utilities_json(witness))
    out.put("gap", "yes" if report.is_gap else "no", report.is_gap)
    return EXIT_OK


def cmd_repro(args, out):
    checks = run(args.example)
    for line in checks.lines():
        out.text(line)
    out.data["example"] = args.example
    out.data["checks"] = [{"pass": ok, "message": msg} for ok, msg in checks.results]
    return EXIT_OK if checks.passed else EXIT_FAILED


def cmd_random(args, out):
    instance = random_instance(args.seed, rational_budgets=True)
    json.dump(io.instance_to_dict(instance), out.stream, indent=2)
    out.stream.write("\n")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "solve-n3": cmd_solve_n3,
    "verify-core": cmd_verify_core,
    "verify-pareto": cmd_verify_pareto,
    "check-integralizable": cmd_check,
    "tau": cmd_tau,
    "round": cmd_round,
    "fractional-core": cmd_fractional,
    "rule": cmd_rule,
    "search-nonintegralizable": cmd_search,
    "emit-normaliz": cmd_emit,
    "gap": cmd_gap,
    "repro": cmd_repro,
    "random-instance": cmd_random,
}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    out = Output(args.format, stdout)
    try:
        code = COMMANDS[args.command](args, out)
    except ResourceLimitError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    except (InvariantViolation, ConvergenceError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_FAILED
    except (CoreCommitteeError, TypeError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
