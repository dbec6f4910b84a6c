"""Command-line front end.

One executable, ``kgraph``, with a subcommand per analysis.  Graphs travel
as JSON documents; every command reads one from a file argument (or stdin
when the argument is "-") and writes a canonical JSON report to stdout:
keys sorted, two-space indent, trailing newline, no timestamps, so equal
inputs give byte-identical outputs.

Exit codes: 0 success, 1 validation or precondition failure (including a
check command whose verdict is negative), 2 an enumeration or search bound
was exceeded, 3 malformed input (bad JSON, bad literals, bad flags).

Numbers are emitted in dual format: exact rationals as fraction strings
("1/2", "1"), inexact values as JSON floats.  An optional ``--config``
file supplies defaults for tolerances and bounds in ``key = value`` lines;
explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import builders
from . import degrees as dg
from .errors import (CompositionError, ConvergenceError, EnumerationCapError,
                     GraphValidationError, InputFormatError,
                     NonConstantRatioError, NotIrreducibleError,
                     NotPeriodicError, NotStronglyConnectedError,
                     PeriodicityUndecidedError, SegmentRangeError,
                     WitnessSearchError)
from .graphs import ENUM_CAP, KGraph
from .kms import (KMS_TOL, TOEPLITZ_TOL, KMSStates, PhaseQuery, parse_state)
from .measure import (CONSISTENCY_TOL, CylinderMeasure, agreement_mass,
                      consistency_check, decay_check, find_decay_witness,
                      periodicity_mass_profile)
from .periodicity import periodicity_group
from .perron import MatrixFamily, perron_data
from .scalars import QQi, format_fraction

DEFAULT_BOUND = 2

# config keys a command picks defaults from when its flag is absent
CONFIG_KEYS = ("bound", "cap", "tol", "level", "a_max", "j_max")


# ----------------------------------------------------------------------
# serialization helpers

def emit(doc):
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def jnum(value):
    """Fractions as "p/q" strings (integers as "n"), floats as floats."""
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, int):
        return format_fraction(value)
    return float(value)


def jrho(value):
    """Spectral radii: plain ints when integral, else the dual format."""
    if isinstance(value, (int, Fraction)) and Fraction(value).denominator == 1:
        return int(value)
    return jnum(value)


def jscalar(value):
    """A complex algebra value as {"re": ..., "im": ...}."""
    if isinstance(value, QQi):
        return {"re": jnum(value.re), "im": jnum(value.im)}
    z = complex(value)
    return {"re": z.real, "im": z.imag}


def provenance(graph, command, options):
    return {
        "graph_sha256": graph.sha256(),
        "command": command,
        "options": {k: v for k, v in sorted(options.items())},
    }


# ----------------------------------------------------------------------
# input helpers

def load_graph(arg):
    if arg == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(arg, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputFormatError(f"cannot read graph file {arg!r}: {exc}")
    return KGraph.from_json(text)


def read_config(path):
    opts = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputFormatError(f"cannot read config file {path!r}: {exc}")
    for i, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise InputFormatError(
                f"config line {i} is not of the form key = value: {line!r}")
        key, _, value = text.partition("=")
        key = key.strip().replace("-", "_")
        if key not in CONFIG_KEYS:
            raise InputFormatError(f"unknown config key {key!r} on line {i}")
        opts[key] = value.strip()
    return opts


def resolve(args, name, parse, default):
    """Flag value if given, else config value, else the default."""
    given = getattr(args, name, None)
    if given is not None:
        return given
    config = getattr(args, "_config", {})
    if name in config:
        try:
            return parse(config[name])
        except ValueError as exc:
            raise InputFormatError(
                f"bad config value for {name}: {config[name]!r}") from exc
    return default


def parse_number(text):
    """Exact Fraction when the literal is one, float otherwise."""
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def parse_vector(text):
    return tuple(parse_number(p) for p in text.split(","))


# ----------------------------------------------------------------------
# shared analysis setup

def graph_context(graph, bound, cap, with_group=True):
    """Perron data, measure, and (optionally) the periodicity group."""
    pd = perron_data(MatrixFamily.from_graph(graph))
    cm = CylinderMeasure(graph, pd)
    group = periodicity_group(graph, bound=bound, cap=cap) if with_group \
        else None
    return pd, cm, group


# ----------------------------------------------------------------------
# subcommand bodies (each returns the process exit code)

def cmd_gen(args):
    name = args.name
    if name == "single-vertex":
        if args.loops is None:
            raise InputFormatError("single-vertex needs --loops n1,n2,...")
        loops = [int(p) for p in args.loops.split(",")]
        squares = None
        if args.squares is not None:
            squares = {}
            table = json.loads(args.squares)
            for pair, quads in table.items():
                i, j = (int(p) for p in pair.split(","))
                squares[(i, j)] = {(s, t): (u, v) for s, t, u, v in quads}
        graph = builders.make_single_vertex(len(loops), loops, squares)
    elif name in builders.FIXTURES:
        graph = builders.FIXTURES[name]()
    else:
        known = ", ".join(sorted(builders.FIXTURES) + ["single-vertex"])
        raise InputFormatError(f"unknown fixture {name!r} (know: {known})")
    sys.stdout.write(graph.to_json())
    return 0


def cmd_validate(args):
    graph = load_graph(args.graph)
    report = graph.validate()
    doc = report.to_dict()
    doc["provenance"] = provenance(graph, "validate", {})
    emit(doc)
    return 0 if report.valid else 1


def cmd_info(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    bound = resolve(args, "bound", int, DEFAULT_BOUND)
    cap = resolve(args, "cap", int, ENUM_CAP)
    pd, _, group = graph_context(graph, bound, cap)
    doc = {
        "rho": [jrho(v) for v in pd.rho_values()],
        "x": {lab: jnum(v) for lab, v in zip(pd.labels, pd.x_values())},
        "per_basis": [list(b) for b in group.basis],
        "per_rank": group.rank,
        "exact": pd.exact,
        "F_bound": pd.F_bound,
        "provenance": provenance(graph, "info",
                                 {"bound": bound, "cap": cap}),
    }
    emit(doc)
    return 0


def cmd_periodicity(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    bound = resolve(args, "bound", int, DEFAULT_BOUND)
    cap = resolve(args, "cap", int, ENUM_CAP)
    group = periodicity_group(graph, bound=bound, cap=cap)
    doc = group.to_dict()
    doc["aperiodic"] = group.rank == 0
    doc["bound"] = doc.pop("search_bound")
    doc["provenance"] = provenance(graph, "periodicity",
                                   {"bound": bound, "cap": cap})
    emit(doc)
    return 0


def cmd_measure_mass(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    pd = perron_data(MatrixFamily.from_graph(graph))
    cm = CylinderMeasure(graph, pd)
    path = graph.parse_path(args.path)
    doc = {
        "path": path.literal(),
        "degree": list(path.degree),
        "mass": jnum(cm.mass(path)),
        "exact": cm.exact,
        "provenance": provenance(graph, "measure mass", {}),
    }
    emit(doc)
    return 0


def cmd_measure_consistency(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    tol = resolve(args, "tol", float, CONSISTENCY_TOL)
    pd = perron_data(MatrixFamily.from_graph(graph))
    cm = CylinderMeasure(graph, pd)
    m = dg.parse_degree(args.m, graph.k)
    n = dg.parse_degree(args.n, graph.k)
    report = consistency_check(cm, m, n, tol=tol, cap=cap)
    doc = {
        "m": list(report.m),
        "n": list(report.n),
        "exact": report.exact,
        "max_refinement_error": report.max_refinement_error,
        "total_mass_error": report.total_mass_error,
        "passed": report.passed,
        "provenance": provenance(graph, "measure consistency",
                                 {"cap": cap, "tol": tol}),
    }
    emit(doc)
    return 0 if report.passed else 1


def cmd_measure_shift(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    level = resolve(args, "level", int, 5)
    pd = perron_data(MatrixFamily.from_graph(graph))
    cm = CylinderMeasure(graph, pd)
    m = dg.parse_degree(args.m, graph.k)
    n = dg.parse_degree(args.n, graph.k)
    profile = periodicity_mass_profile(cm, m, n, level, cap=cap)
    doc = {
        "m": list(m),
        "n": list(n),
        "levels": [jnum(v) for v in profile],
        "final": jnum(profile[-1]),
        "provenance": provenance(graph, "measure shift",
                                 {"cap": cap, "level": level}),
    }
    emit(doc)
    return 0


def cmd_measure_agreement(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    bound = resolve(args, "bound", int, DEFAULT_BOUND)
    level = resolve(args, "level", int, 3)
    pd, cm, group = graph_context(graph, bound, cap)
    mu = graph.parse_path(args.mu)
    nu = graph.parse_path(args.nu)
    report = agreement_mass(cm, mu, nu, level, group=group, cap=cap)
    doc = {
        "mu": mu.literal(),
        "nu": nu.literal(),
        "periodic": report.periodic,
        "theta_matched": report.theta_matched,
        "closed_form": jnum(report.closed_form),
        "level": report.level,
        "level_bound": jnum(report.level_bound),
        "provenance": provenance(graph, "measure agreement",
                                 {"bound": bound, "cap": cap,
                                  "level": level}),
    }
    emit(doc)
    return 0


def cmd_measure_decay(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    a_max = resolve(args, "a_max", int, 6)
    j_max = resolve(args, "j_max", int, 3)
    pd = perron_data(MatrixFamily.from_graph(graph))
    cm = CylinderMeasure(graph, pd)
    mu = graph.parse_path(args.mu)
    nu = graph.parse_path(args.nu)
    gvec = dg.sub(mu.degree, nu.degree)
    witness = find_decay_witness(cm, gvec, a_max=a_max, cap=cap)
    report = decay_check(cm, witness, mu, nu, j_max, cap=cap)
    doc = {
        "mu": mu.literal(),
        "nu": nu.literal(),
        "g": list(witness.g),
        "a": list(witness.a),
        "tails": {v: p.literal() for v, p in sorted(witness.tails.items())},
        "K": jnum(witness.K),
        "masses": [jnum(v) for v in report.masses],
        "bounds": [jnum(v) for v in report.bounds],
        "exact": report.exact,
        "passed": report.passed,
        "provenance": provenance(graph, "measure decay",
                                 {"a_max": a_max, "cap": cap,
                                  "j_max": j_max}),
    }
    emit(doc)
    return 0 if report.passed else 1


def cmd_kms_eval(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    bound = resolve(args, "bound", int, DEFAULT_BOUND)
    pd, cm, group = graph_context(graph, bound, cap)
    states = KMSStates(graph, pd, measure=cm, group=group, cap=cap)
    state = parse_state(args.state)
    mu = graph.parse_path(args.mu)
    nu = graph.parse_path(args.nu)
    value = states.phi_eval(state, mu, nu, theta_blind=args.theta_blind)
    doc = {
        "state": state.describe(),
        "mu": mu.literal(),
        "nu": nu.literal(),
        "grade": list(dg.sub(mu.degree, nu.degree)),
        "value": jscalar(value),
        "exact": cm.exact and state.is_exact,
        "provenance": provenance(graph, "kms eval",
                                 {"bound": bound, "cap": cap,
                                  "theta_blind": args.theta_blind}),
    }
    emit(doc)
    return 0


def cmd_kms_check(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    bound = resolve(args, "bound", int, DEFAULT_BOUND)
    tol = resolve(args, "tol", float, KMS_TOL)
    pd, cm, group = graph_context(graph, bound, cap)
    states = KMSStates(graph, pd, measure=cm, group=group, cap=cap)
    state = parse_state(args.state)
    max_degree = dg.parse_degree(args.max_degree, graph.k)
    report = states.kms_check(state, max_degree, tol=tol,
                              theta_blind=args.theta_blind)
    doc = {
        "state": report.state,
        "max_degree": list(report.max_degree),
        "exact": report.exact,
        "theta_blind": report.theta_blind,
        "total_quadruples": report.total_quadruples,
        "support_size": report.support_size,
        "explicit_checked": report.explicit_checked,
        "failure_count": report.failure_count,
        "failures": [dict(f) for f in report.failures],
        "max_deviation": report.max_deviation,
        "ck_screen_pairs": report.ck_screen_pairs,
        "ck_screen_violations": report.ck_screen_violations,
        "passed": report.passed,
        "provenance": provenance(graph, "kms check",
                                 {"bound": bound, "cap": cap, "tol": tol}),
    }
    emit(doc)
    return 0 if report.passed else 1


def cmd_phase(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    bound = resolve(args, "bound", int, DEFAULT_BOUND)
    pd, cm, group = graph_context(graph, bound, cap)
    states = KMSStates(graph, pd, measure=cm, group=group, cap=cap)
    beta = parse_number(args.beta)
    report = states.phase_diagram(beta)
    doc = report.to_dict()
    doc["provenance"] = provenance(graph, "phase",
                                   {"beta": args.beta, "bound": bound,
                                    "cap": cap})
    emit(doc)
    return 0


def cmd_toeplitz(args):
    graph = load_graph(args.graph)
    graph.require_valid()
    cap = resolve(args, "cap", int, ENUM_CAP)
    tol = resolve(args, "tol", float, TOEPLITZ_TOL)
    pd = perron_data(MatrixFamily.from_graph(graph))
    cm = CylinderMeasure(graph, pd)
    states = KMSStates(graph, pd, measure=cm, group=None, cap=cap)
    beta = parse_number(args.beta)
    r = tuple(float(v) for v in parse_vector(args.r))
    report = states.toeplitz_kms_exists(PhaseQuery(beta=beta, r=r), tol=tol)
    doc = {
        "beta": report.beta,
        "r": list(report.r),
        "gaps": list(report.gaps),
        "exists": report.exists,
        "factors_through_quotient": report.factors_through_quotient,
        "provenance": provenance(graph, "toeplitz",
                                 {"cap": cap, "tol": tol}),
    }
    emit(doc)
    return 0


# ----------------------------------------------------------------------
# parser

def _add_graph_arg(sub):
    sub.add_argument("graph", help="graph JSON file, or - for stdin")


def _add_common(sub):
    sub.add_argument("--config", default=None,
                     help="key = value file with option defaults")
    sub.add_argument("--cap", type=int, default=None,
                     help="path-enumeration guard")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kgraph",
        description="Higher-rank graph analysis: Perron data, periodicity, "
                    "cylinder measures, and equilibrium states.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="write a named example graph as JSON")
    p.add_argument("name",
                   help="b2 | fib | pullback-b2 | product-b2-c2 | "
                        "single-vertex")
    p.add_argument("--loops", default=None,
                   help="single-vertex: loops per color, e.g. 2,2")
    p.add_argument("--squares", default=None,
                   help='single-vertex: JSON {"i,j": [[s,t,u,v], ...]} of '
                        "factorization squares (defaults to the flip)")
    p.set_defaults(func=cmd_gen)

    p = subs.add_parser("validate", help="check the graph axioms")
    _add_graph_arg(p)
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("info", help="Perron data and periodicity basis")
    _add_graph_arg(p)
    _add_common(p)
    p.add_argument("--bound", type=int, default=None,
                   help="periodicity search bound")
    p.set_defaults(func=cmd_info)

    p = subs.add_parser("periodicity", help="periodicity group of the graph")
    _add_graph_arg(p)
    _add_common(p)
    p.add_argument("--bound", type=int, default=None,
                   help="search bound for candidate vectors")
    p.set_defaults(func=cmd_periodicity)

    p = subs.add_parser("measure", help="cylinder-measure computations")
    msubs = p.add_subparsers(dest="measure_command", required=True)

    q = msubs.add_parser("mass", help="measure of one cylinder set")
    _add_graph_arg(q)
    _add_common(q)
    q.add_argument("--path", required=True, help="path literal")
    q.set_defaults(func=cmd_measure_mass)

    q = msubs.add_parser("consistency",
                         help="refinement identities between two levels")
    _add_graph_arg(q)
    _add_common(q)
    q.add_argument("--m", required=True, help="coarse degree, e.g. 1,0")
    q.add_argument("--n", required=True, help="fine degree, m <= n")
    q.add_argument("--tol", type=float, default=None)
    q.set_defaults(func=cmd_measure_consistency)

    q = msubs.add_parser("shift",
                         help="mass of the shift-agreement set for (m, n)")
    _add_graph_arg(q)
    _add_common(q)
    q.add_argument("--m", required=True)
    q.add_argument("--n", required=True)
    q.add_argument("--level", type=int, default=None,
                   help="deepest approximation level")
    q.set_defaults(func=cmd_measure_shift)

    q = msubs.add_parser("agreement",
                         help="measure of infinite paths equalizing two "
                              "finite paths")
    _add_graph_arg(q)
    _add_common(q)
    q.add_argument("--mu", required=True)
    q.add_argument("--nu", required=True)
    q.add_argument("--level", type=int, default=None)
    q.add_argument("--bound", type=int, default=None)
    q.set_defaults(func=cmd_measure_agreement)

    q = msubs.add_parser("decay",
                         help="geometric decay of non-matching agreement "
                              "masses")
    _add_graph_arg(q)
    _add_common(q)
    q.add_argument("--mu", required=True)
    q.add_argument("--nu", required=True)
    q.add_argument("--a-max", dest="a_max", type=int, default=None)
    q.add_argument("--j-max", dest="j_max", type=int, default=None)
    q.set_defaults(func=cmd_measure_decay)

    p = subs.add_parser("kms", help="equilibrium-state computations")
    ksubs = p.add_subparsers(dest="kms_command", required=True)

    q = ksubs.add_parser("eval", help="state value on one span term")
    _add_graph_arg(q)
    _add_common(q)
    q.add_argument("--state", required=True,
                   help='"haar" or z=<turns>, e.g. z=1/4,0')
    q.add_argument("--mu", required=True)
    q.add_argument("--nu", required=True)
    q.add_argument("--bound", type=int, default=None)
    q.add_argument("--theta-blind", action="store_true",
                   help="negative control: drop the bijection condition")
    q.set_defaults(func=cmd_kms_eval)

    q = ksubs.add_parser("check",
                         help="exhaustive equilibrium identity check")
    _add_graph_arg(q)
    _add_common(q)
    q.add_argument("--state", required=True)
    q.add_argument("--max-degree", dest="max_degree", required=True,
                   help="per-color degree box, e.g. 2,2")
    q.add_argument("--tol", type=float, default=None)
    q.add_argument("--bound", type=int, default=None)
    q.add_argument("--theta-blind", action="store_true")
    q.set_defaults(func=cmd_kms_check)

    p = subs.add_parser("phase",
                        help="extreme-point count by inverse temperature")
    _add_graph_arg(p)
    _add_common(p)
    p.add_argument("--beta", required=True)
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(func=cmd_phase)

    p = subs.add_parser("toeplitz",
                        help="equilibrium existence for scaled dynamics")
    _add_graph_arg(p)
    _add_common(p)
    p.add_argument("--beta", required=True)
    p.add_argument("--r", required=True, help="per-color scale, e.g. 0.7,0")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_toeplitz)

    return parser


# ----------------------------------------------------------------------
# entry point

VALIDATION_ERRORS = (GraphValidationError, NotStronglyConnectedError,
                     NotIrreducibleError, CompositionError,
                     SegmentRangeError, NotPeriodicError)
BOUND_ERRORS = (EnumerationCapError, PeriodicityUndecidedError,
                ConvergenceError, NonConstantRatioError, WitnessSearchError)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are malformed input here
        return 3 if exc.code not in (0, None) else 0
    try:
        args._config = read_config(args.config) \
            if getattr(args, "config", None) else {}
        return args.func(args)
    except (InputFormatError, json.JSONDecodeError) as exc:
        print(f"kgraph: input error: {exc}", file=sys.stderr)
        return 3
    except VALIDATION_ERRORS as exc:
        print(f"kgraph: validation failure: {exc}", file=sys.stderr)
        return 1
    except BOUND_ERRORS as exc:
        print(f"kgraph: bound exceeded: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
