"""Command-line front end.

Exit codes partition cleanly for CI use: 0 means the command's gate
passed, 1 means evaluation findings failed a gate (structural findings,
active defeaters, unsound case, inconsistent judgments, unacceptable
risks), and 2 means usage or parse errors.

`A2_LOG` controls log verbosity (debug/info/warning/error).  Threshold
and config values come from a key=value file plus flags; flags win.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional

from . import measures as cm
from .caseformat import detect_format, parse_case, serialize_case
from .confidence import ConfidenceInput, Method, propagate_confidence
from .model import Assessment, CaseGraph, structural_check
from .report import (
    build_report,
    render_dot,
    render_report_json,
    render_text,
)
from .risk import RiskThresholds, categorize, collect_residual_entries, final_gate
from .validity import (
    LeafInputs,
    PreconditionViolated,
    active_defeaters,
    assess_validity,
    soundness_gate,
)

log = logging.getLogger("a2")

EXIT_OK = 0
EXIT_GATE = 1
EXIT_USAGE = 2

METHOD_FLAG = {"product": Method.PRODUCT, "doubts": Method.DOUBTS}


def _fmt_measure(v: float) -> str:
    if v == float("inf"):
        return "+inf"
    if v == float("-inf"):
        return "-inf"
    return format(v, ".6g")

CONFIG_KEYS = (
    "individual_threshold",
    "class_threshold",
    "negligible_threshold",
    "base",
    "method",
)


class UsageError(Exception):
    pass


def _setup_logging() -> None:
    level_name = os.environ.get("A2_LOG", "warning").strip().lower()
    level = {
        "debug": logging.DEBUG,
        "info": logging.INFO,
        "warning": logging.WARNING,
        "error": logging.ERROR,
    }.get(level_name, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="a2: %(levelname)s: %(message)s")


def _load_config(path: Optional[str]) -> dict:
    """Parse a key=value config file (comments with '#')."""
    if path is None:
        return {}
    config: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key = value")
                key, _, value = line.partition("=")
                key, value = key.strip(), value.strip().strip('"')
                if key not in CONFIG_KEYS:
                    raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
                config[key] = value
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    return config


def _thresholds_from(config: dict) -> RiskThresholds:
    defaults = RiskThresholds()
    try:
        return RiskThresholds(
            individual=float(config.get("individual_threshold", defaults.individual)),
            class_cumulative=float(config.get("class_threshold", defaults.class_cumulative)),
            negligible=float(config.get("negligible_threshold", defaults.negligible)),
        )
    except ValueError as e:
        raise UsageError(f"bad thresholds: {e}") from None


def _load_case(path: str, fmt: Optional[str] = None) -> CaseGraph:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read case {path}: {e}") from None
    if fmt is None:
        fmt = "json" if path.endswith(".json") else detect_format(text)
    result = parse_case(text, format=fmt, filename=path)
    for d in result.diagnostics:
        print(d.render(), file=sys.stderr)
    if not result.ok:
        raise UsageError(f"{path}: case does not parse")
    log.info("loaded %s (%d nodes)", path, len(result.graph.nodes))
    return result.graph


def _leaf_inputs(args) -> LeafInputs:
    return LeafInputs(concur_all=bool(getattr(args, "concur_all", False)))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    g = _load_case(args.case)
    findings = structural_check(g)
    if not findings:
        print("no structural findings")
        return EXIT_OK
    for f in findings:
        print(f"[{f.code}] {f.message}")
    return EXIT_GATE


def cmd_validity(args) -> int:
    g = _load_case(args.case)
    findings = structural_check(g)
    if findings:
        for f in findings:
            print(f"[{f.code}] {f.message}")
        print("validity: not assessable (structural findings present)")
        return EXIT_GATE
    inputs = _leaf_inputs(args)
    m = assess_validity(g, inputs)
    for node_id in sorted(m.values):
        suffix = " (residual, bypassed)" if node_id in m.bypassed else ""
        print(f"{node_id}: {m.values[node_id].value} [{m.causes[node_id]}]{suffix}")
    active = active_defeaters(g, m)
    if active:
        print("active defeaters:")
        for a in active:
            print(f"  {a.defeater} ({a.assessment.value}) -> {a.affected}: {a.diagnosis}")
    else:
        print("active defeaters: none")
    for w in m.warnings:
        print(f"warning: {w}")
    top_true = g.top is not None and m.values[g.top] is Assessment.TRUE
    return EXIT_OK if top_true and not active else EXIT_GATE


def cmd_sound(args) -> int:
    g = _load_case(args.case)
    verdict = soundness_gate(g, None, _leaf_inputs(args), base=args.base)
    print("SOUND" if verdict.sound else "NOT SOUND")
    for reason in verdict.reasons:
        print(f"  - {reason}")
    return EXIT_OK if verdict.sound else EXIT_GATE


def cmd_confidence(args) -> int:
    g = _load_case(args.case)
    method = METHOD_FLAG[args.method]
    try:
        cmap = propagate_confidence(
            g,
            ConfidenceInput(),
            method,
            exploratory=args.exploratory,
            leaf_inputs=_leaf_inputs(args),
        )
    except PreconditionViolated as e:
        print(f"confidence: {e}", file=sys.stderr)
        return EXIT_GATE
    print(f"method: {cmap.method.value}")
    print(f"note: {cmap.caveat}")
    for node_id in sorted(cmap.values):
        print(f"{node_id}: {cmap.values[node_id]:.6g} ({cmap.provenance[node_id]})")
    if g.top in cmap.values:
        print(f"top {g.top}: {cmap.values[g.top]:.6g}")
    for lint in cmap.lints:
        print(f"lint: {lint}")
    return EXIT_OK


def cmd_measures(args) -> int:
    g = _load_case(args.case)
    nodes = [n for n in g.evidence()]
    if args.node is not None:
        matching = [n for n in nodes if n.id == args.node]
        if not matching:
            raise UsageError(f"{args.node} is not an evidence node of this case")
        nodes = matching
    inconsistent = False
    for e in nodes:
        if e.elicitation is None or e.elicitation.is_empty():
            print(f"{e.id}: no elicitation recorded")
            continue
        results = cm.available_measures(e.elicitation, args.base)
        rendered = " ".join(f"{r.measure}={_fmt_measure(r.value)}" for r in results)
        print(f"{e.id}: {rendered}" if rendered else f"{e.id}: elicitation insufficient")
        for f in cm.cross_check(e.elicitation):
            inconsistent = True
            print(f"  inconsistent: {f.message}")
    return EXIT_GATE if inconsistent else EXIT_OK


def cmd_risks(args) -> int:
    g = _load_case(args.case)
    thresholds = _thresholds_from(_load_config(args.thresholds))
    entries, pending = collect_residual_entries(g)
    print(
        "thresholds: individual {:g}, class {:g}, negligible {:g}".format(
            thresholds.individual, thresholds.class_cumulative, thresholds.negligible
        )
    )
    if not entries:
        print("no residual doubts recorded")
        for p in pending:
            print(f"pending: {p}")
        return EXIT_OK
    result = categorize(entries, thresholds)
    for node_id in sorted(result.categories):
        print(f"{node_id}: risk {result.risks[node_id]:.6g} -> {result.categories[node_id].value}")
    for label in sorted(result.classes):
        verdict = result.classes[label]
        word = "Manageable" if verdict.manageable else "NOT manageable"
        print(f"class {label}: total {verdict.total_risk:.6g} -> {word}")
    gate = final_gate(entries, thresholds)
    for p in pending:
        print(f"pending: {p}")
    if gate.acceptable:
        print("gate: acceptable")
        return EXIT_OK
    print("gate: unacceptable (" + ", ".join(gate.offenders) + ")")
    return EXIT_GATE


def cmd_export(args) -> int:
    g = _load_case(args.case)
    inputs = _leaf_inputs(args)
    if args.dot:
        m = None
        if not structural_check(g):
            m = assess_validity(g, inputs)
        print(render_dot(g, m), end="")
        return EXIT_OK
    report = build_report(g, leaf_inputs=inputs, exploratory=args.exploratory)
    print(render_report_json(report), end="")
    return EXIT_OK


def cmd_fmt(args) -> int:
    g = _load_case(args.case)
    print(serialize_case(g, args.format), end="")
    return EXIT_OK


def cmd_report(args) -> int:
    g = _load_case(args.case)
    report = build_report(
        g,
        leaf_inputs=_leaf_inputs(args),
        thresholds=_thresholds_from(_load_config(args.thresholds)),
        base=args.base,
        exploratory=args.exploratory,
    )
    print(render_text(report), end="")
    return EXIT_OK if report.soundness.sound else EXIT_GATE


def cmd_serve(args) -> int:
    from .service import ServiceConfig, Session, serve

    thresholds = _thresholds_from(_load_config(args.thresholds))
    config = ServiceConfig(case_path=args.case, thresholds=thresholds, base=args.base)
    session = Session(config)
    server = serve(session, port=args.port)
    host, port = server.server_address[:2]
    print(f"serving case API on http://{host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 2, matching the usage-error contract
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="a2", description="assurance case evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def case_cmd(name: str, help_text: str, func, concur: bool = False, base: bool = False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("case", help="case file (.a2 DSL or .json)")
        if concur:
            p.add_argument(
                "--concur-all",
                action="store_true",
                help="record human concurrence on every reasoning step",
            )
        if base:
            p.add_argument("--base", type=float, default=cm.DEFAULT_BASE, help="log base")
        p.set_defaults(func=func)
        return p

    case_cmd("check", "structural validity", cmd_check)
    case_cmd("validity", "three-valued assessment and active defeaters", cmd_validity, concur=True)
    case_cmd("sound", "full soundness gate", cmd_sound, concur=True, base=True)

    p = case_cmd("confidence", "propagate probabilistic confidence", cmd_confidence, concur=True)
    p.add_argument("--method", choices=sorted(METHOD_FLAG), required=True)
    p.add_argument(
        "--exploratory",
        action="store_true",
        help="acknowledge an unsound case and propagate anyway",
    )

    p = case_cmd("measures", "confirmation measures per evidence node", cmd_measures, base=True)
    p.add_argument("--node", help="restrict to one evidence node")

    p = case_cmd("risks", "residual risk ledger and final gate", cmd_risks)
    p.add_argument("--thresholds", help="key=value thresholds file")

    p = case_cmd("export", "export DOT graph or JSON report", cmd_export, concur=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--dot", action="store_true", help="Graphviz DOT text")
    group.add_argument("--json", action="store_true", help="JSON report document")
    p.add_argument("--exploratory", action="store_true")

    p = case_cmd("fmt", "canonical serialization", cmd_fmt)
    p.add_argument("--format", choices=("dsl", "json"), default="dsl")

    p = case_cmd("report", "full text report", cmd_report, concur=True, base=True)
    p.add_argument("--thresholds", help="key=value thresholds file")
    p.add_argument("--exploratory", action="store_true")

    p = sub.add_parser("serve", help="start the JSON service")
    p.add_argument("--port", type=int, default=8037)
    p.add_argument("--case", help="case file to load and persist to")
    p.add_argument("--thresholds", help="key=value thresholds file")
    p.add_argument("--base", type=float, default=cm.DEFAULT_BASE)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"a2: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionViolated as e:
        print(f"a2: {e}", file=sys.stderr)
        return EXIT_GATE


if __name__ == "__main__":
    sys.exit(main())
