"""Command-line interface: ``tdlaudit {audit,theorems,emit,check}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .audit import DEFAULT_FILES, fixture_path, render_csv, render_text, run_audit
from .dataset import default_bindings, load_config, load_dataset
from .engine import emit_smtlib
from .errors import TDLError
from .formula import free_variables, parse_formula
from .norms import render_report, theorem_report
from .semantics import evaluate, load_model
from .suites import ground_property, suite_properties


def _paths(args):
    data_name, cfg_name = DEFAULT_FILES[args.suite]
    return args.data or fixture_path(data_name), args.config or fixture_path(cfg_name)


def cmd_audit(args):
    data, config = _paths(args)
    report = run_audit(data, config, args.suite, args.mode, cross_check=args.cross_check)
    timing = not args.no_timing
    sys.stdout.write(render_text(report, cap=args.cap, show_all=args.all, timing=timing))
    if args.report:
        Path(args.report).write_text(render_csv(report, timing=timing), encoding="utf-8")
    return report.exit_code


def cmd_theorems(args):
    reports = theorem_report(args.max_states, args.max_atoms)
    text = render_report(reports)
    sys.stdout.write(render_report(reports, details=args.details))
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    return 0


def cmd_emit(args):
    data, config = _paths(args)
    cfg = load_config(config, args.suite)
    props = {sp.id: sp for sp in suite_properties(args.suite)}
    if args.property not in props:
        raise TDLError(f"unknown property {args.property!r}; expected one of {', '.join(props)}")
    g = ground_property(props[args.property].formula, load_dataset(data, cfg), default_bindings(args.suite, cfg),
                        mode=args.mode, property_id=args.property)
    text = emit_smtlib(g, inline_thresholds=args.inline_thresholds, get_model=args.get_model)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_check(args):
    m = load_model(args.model)
    f = parse_formula(args.formula)
    sigma = {}
    for item in args.assign:
        var, sep, const = item.partition("=")
        if not sep:
            raise TDLError(f"--assign expects var=constant, got {item!r}")
        sigma[var.strip()] = const.strip()
    missing = free_variables(f) - set(sigma)
    if missing:
        raise TDLError(f"assign the free variables with --assign: {', '.join(sorted(missing))}")
    states = [args.state] if args.state is not None else list(m.state_names)
    for s in states:
        print(f"{s}: {'true' if evaluate(m, s, sigma, f) else 'false'}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="tdlaudit", description="Temporal deontic logic checks and dataset ethics audits.")
    sub = p.add_subparsers(dest="command", required=True)

    def data_args(sp):
        sp.add_argument("--suite", choices=sorted(DEFAULT_FILES), required=True)
        sp.add_argument("--data", help="CSV dataset (defaults to the bundled fixture)")
        sp.add_argument("--config", help="suite config file (defaults to the bundled one)")
        sp.add_argument("--mode", choices=("reproduction", "strict"), default="reproduction")

    a = sub.add_parser("audit", help="audit a dataset against a property suite")
    data_args(a)
    a.add_argument("--report", help="write the verdict CSV here")
    a.add_argument("--all", action="store_true", help="print every counterexample")
    a.add_argument("--cap", type=int, default=10, help="counterexamples printed per property")
    a.add_argument("--no-timing", action="store_true", help="leave timings out for byte-stable output")
    a.add_argument("--cross-check", action="store_true", help="also run the solver in AUDIT_SOLVER_CMD")
    a.set_defaults(func=cmd_audit)

    t = sub.add_parser("theorems", help="check the theorems over bounded traces")
    t.add_argument("--max-states", type=int, default=3)
    t.add_argument("--max-atoms", type=int, default=6)
    t.add_argument("--report", help="write theorems.report here")
    t.add_argument("--details", action="store_true", help="print counterexample models")
    t.set_defaults(func=cmd_theorems)

    e = sub.add_parser("emit", help="write SMT-LIB 2 for one grounded property")
    data_args(e)
    e.add_argument("--property", required=True)
    e.add_argument("--out", help="output file (stdout when omitted)")
    e.add_argument("--inline-thresholds", action="store_true")
    e.add_argument("--get-model", action="store_true")
    e.set_defaults(func=cmd_emit)

    c = sub.add_parser("check", help="evaluate a formula on a model file")
    c.add_argument("--model", required=True)
    c.add_argument("--formula", required=True)
    c.add_argument("--state", help="state name (all states when omitted)")
    c.add_argument("--assign", action="append", default=[], metavar="VAR=CONST")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TDLError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
