"""``structnet`` command-line front end.

Each invocation prints one JSON document (validated against
:data:`structnet.harness.reports.SCHEMAS`) unless ``--dot`` or ``--csv``
redirects the payload. Exit codes: 0 success, 1 property fails under
``--strict``, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from ..config import PROFILES
from ..graph import GraphError, SystemGraph, parse_graph, serialize_graph, to_dot, to_json
from ..linear import (
    compare_linear_nonlinear,
    linear_min_driver_count,
    linear_min_sensor_count,
    linear_structural_controllability,
    linear_structural_observability,
)
from ..structural import StructuralError, analysis_report, minimal_driver_set, minimal_sensor_set
from ..dynamics import (
    DynamicsError,
    ExprSyntaxError,
    GraphExtractionError,
    PiecewiseConstantInput,
    SimulationError,
    SingularEvaluationError,
    accessibility_lie_rank,
    check_autonomous_candidate,
    check_hidden_candidate,
    extract_graph,
    observability_rank,
    parse_dynamics,
    parse_expr,
    serialize_dynamics,
    simulate,
    witness_accessible_dynamics,
    witness_observable_dynamics,
)
from .ablation import ablate_all
from .generators import MODELS, GenSpec, generate
from .reports import validate_report

CHECKS = ("graph", "observability", "accessibility", "autonomous", "hidden")


class UsageError(Exception):
    """Bad command-line input; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage().strip()}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str) -> SystemGraph:
    return parse_graph(_read(path))


def _names(nodes) -> list[str]:
    return [str(n) for n in sorted(nodes)]


def _linear_dict(v) -> dict:
    w = v.dilation_or_contraction_witness
    return {
        "reachability_ok": v.reachability_ok,
        "cover_ok": v.cover_ok,
        "witness": None if w is None else _names(w),
        "unreached": _names(v.unreached),
    }


def _emit(kind: str, doc: dict, out) -> None:
    doc = validate_report(kind, {"command": kind, **doc} if kind != "error" else doc)
    out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")


# --- subcommands ------------------------------------------------------------
# Each returns (report kind, document, property_holds) or writes its own
# payload and returns None for the document.


def cmd_analyze(args):
    g = _load_graph(args.graph)
    if args.dot:
        return None, to_dot(g), True
    lc, lo = linear_structural_controllability(g), linear_structural_observability(g)
    rep = analysis_report(g)
    doc = {
        "accessible": rep["accessible"],
        "observable": rep["observable"],
        "lin_controllable": lc.controllable_or_observable,
        "lin_observable": lo.controllable_or_observable,
        **{k: v for k, v in rep.items() if k not in ("accessible", "observable")},
        "linear": {"controllability": _linear_dict(lc), "observability": _linear_dict(lo)},
    }
    return "analyze", doc, rep["accessible"] and rep["observable"]


def _nodeset(args, which: str):
    g = _load_graph(args.graph)
    nodes = minimal_driver_set(g) if which == "drivers" else minimal_sensor_set(g)
    lin = linear_min_driver_count(g) if which == "drivers" else linear_min_sensor_count(g)
    return which, {"nodes": _names(nodes), "count": len(nodes), "linear_count": lin}, True


def cmd_drivers(args):
    return _nodeset(args, "drivers")


def cmd_sensors(args):
    return _nodeset(args, "sensors")


def cmd_compare(args):
    rep = compare_linear_nonlinear(_load_graph(args.graph))
    d = rep.to_dict()
    return "compare", d, d["lin_controllable"] and d["lin_observable"]


def cmd_ablate(args):
    rep = ablate_all(_load_graph(args.graph), include_io=args.include_io)
    d = rep.to_dict()
    intact = all(e["still_accessible"] and e["still_observable"] for e in d["ablations"].values())
    return "ablate", d, intact


def _param(text: str):
    key, sep, val = text.partition("=")
    if not sep:
        raise UsageError(f"generator parameter {text!r} must look like key=value")
    key = key.strip().replace("-", "_")
    for cast in (int, float):
        try:
            return key, cast(val)
        except ValueError:
            pass
    return key, val


def cmd_gen(args):
    params = dict(_param(p) for p in args.params)
    try:
        spec = GenSpec(model=args.model, seed=args.seed, **params)
    except TypeError as exc:
        raise UsageError(f"bad generator parameter: {exc}") from None
    g = generate(spec)
    text = serialize_graph(g)
    if args.out:
        Path(args.out).write_text(text)
    if args.dot:
        return None, to_dot(g), True
    return "gen", {"params": {"model": spec.model, **params, "seed": args.seed}, "graph": to_json(g), "text": text}, True


def cmd_verify(args):
    spec = parse_dynamics(_read(args.dynamics))
    check, *rest = args.check
    if check not in CHECKS:
        raise UsageError(f"--check must be one of {', '.join(CHECKS)}")
    needs_expr = check in ("autonomous", "hidden")
    if needs_expr != bool(rest) or len(rest) > 1:
        raise UsageError(f"--check {check} takes {'one expression' if needs_expr else 'no argument'}")
    tol = PROFILES[args.tolerance_profile]
    trials = args.trials if args.trials is not None else tol.trials
    if check == "graph":
        g = extract_graph(spec, trials=trials, seed=args.seed, tol=tol)
        if args.dot:
            return None, to_dot(g), True
        doc = {"decision": "yes", "evidence": {"text": serialize_graph(g)}, "graph": to_json(g)}
        return "verify", {"check": check, **doc}, True
    if check == "observability":
        v = observability_rank(spec, orders=args.orders, trials=trials, seed=args.seed, tol=tol)
    elif check == "accessibility":
        v = accessibility_lie_rank(spec, depth=args.depth, trials=trials, seed=args.seed, tol=tol)
    elif check == "autonomous":
        k = args.k_max if args.k_max is not None else max(spec.N, 1)
        v = check_autonomous_candidate(spec, parse_expr(rest[0]), k, trials=trials, seed=args.seed, tol=tol)
    else:
        v = check_hidden_candidate(spec, parse_expr(rest[0]), orders=args.orders, trials=trials, seed=args.seed, tol=tol)
    d = v.to_dict()
    # a confirmed autonomous or hidden element means the property fails
    holds = d["decision"] != "yes" if needs_expr else d["decision"] == "yes"
    return "verify", {"check": check, **d}, holds


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"cannot parse numbers from {text!r}") from None


def cmd_simulate(args):
    spec = parse_dynamics(_read(args.dynamics))
    x0 = _floats(" ".join(args.x0)) if args.x0 else [0.0] * spec.N
    if len(x0) != spec.N:
        raise UsageError(f"--x0 needs {spec.N} values, got {len(x0)}")
    if args.dt <= 0 or args.T < 0:
        raise UsageError("--dt must be positive and --T non-negative")
    period = args.period if args.period is not None else 10 * args.dt
    traj = simulate(spec, x0, PiecewiseConstantInput(period, args.amplitude), args.T, args.dt, seed=args.seed)
    if args.csv:
        csv_text = traj.to_csv()
        if args.csv == "-":
            return None, csv_text, True
        Path(args.csv).write_text(csv_text)
    return "simulate", traj.to_dict(), True


def cmd_witness(args):
    g = _load_graph(args.graph)
    try:
        spec = (witness_accessible_dynamics if args.mode == "accessible" else witness_observable_dynamics)(g, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = serialize_dynamics(spec)
    if args.out:
        Path(args.out).write_text(text)
    doc = {"mode": args.mode, "f": [str(e) for e in spec.f], "h": [str(e) for e in spec.h], "inputs": spec.M, "text": text}
    return "witness", doc, True


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report (the default)")
    common.add_argument("--dot", action="store_true", help="emit the graph in DOT format instead")
    common.add_argument("--strict", action="store_true", help="exit 1 when the analysed property fails")
    common.add_argument("--tolerance-profile", choices=sorted(PROFILES), default="default")

    p = _Parser(prog="structnet", description="Structural accessibility/observability analysis of system graphs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True, metavar="COMMAND")

    for name, fn, helptext in (
        ("analyze", cmd_analyze, "full nonlinear + linear structural report"),
        ("drivers", cmd_drivers, "minimal driver set"),
        ("sensors", cmd_sensors, "minimal sensor set"),
        ("compare", cmd_compare, "nonlinear vs linear driver/sensor counts"),
        ("ablate", cmd_ablate, "remove each state node in turn"),
    ):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("graph")
        sp.set_defaults(func=fn)
        if name == "ablate":
            sp.add_argument("--include-io", action="store_true", help="also ablate input and output nodes")

    sp = sub.add_parser("gen", parents=[common], help="generate a random graph")
    sp.add_argument("model", choices=MODELS)
    sp.add_argument("params", nargs="*", help="key=value, e.g. n=8 p=0.3 m_roots=2 attach=random")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="also write the graph file here")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", parents=[common], help="numeric verdicts on a dynamics file")
    sp.add_argument("dynamics")
    sp.add_argument("--check", nargs="+", required=True, metavar="CHECK", help="graph | observability | accessibility | autonomous EXPR | hidden EXPR")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--orders", type=int, help="output derivative orders (default N-1)")
    sp.add_argument("--depth", type=int, help="Lie bracket depth (default N)")
    sp.add_argument("--k-max", type=int, help="derivative orders for autonomous checks (default N)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", parents=[common], help="RK4 simulation with piecewise-constant random inputs")
    sp.add_argument("dynamics")
    sp.add_argument("--x0", nargs="+", help="initial state, e.g. --x0 1 1 or --x0 1,1")
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--period", type=float, help="input switching period (default 10*dt)")
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--csv", help="write the trajectory as CSV to this path ('-' for stdout)")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("witness", parents=[common], help="build witness dynamics for a graph")
    sp.add_argument("graph")
    sp.add_argument("--mode", choices=("accessible", "observable"), required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="also write the dynamics file here")
    sp.set_defaults(func=cmd_witness)
    return p


_INPUT_ERRORS = (
    UsageError,
    GraphError,
    DynamicsError,
    ExprSyntaxError,
    StructuralError,
    GraphExtractionError,
    SingularEvaluationError,
    SimulationError,
    ValueError,
)


def run_cli(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"structnet: error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        kind, doc, holds = args.func(args)
    except _INPUT_ERRORS as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "line": getattr(exc, "line", None)}
        stderr.write(f"structnet: error: {exc}\n")
        if args.json:
            _emit("error", err, stdout)
        return 2
    if kind is None:
        stdout.write(doc)
    else:
        _emit(kind, doc, stdout)
    return 1 if args.strict and not holds else 0


def main() -> None:
    sys.exit(run_cli())
