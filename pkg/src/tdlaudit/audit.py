"""End-to-end dataset audits and their text/CSV reports."""

from __future__ import annotations

import csv
import io
import time
import warnings
from dataclasses import dataclass, field
from importlib import resources

from .dataset import default_bindings, load_config, load_dataset
from .engine import (
    SATISFIED,
    UNSATISFIED,
    Verdict,
    check_grounded,
    emit_smtlib,
    explain,
    parse_solver_result,
    run_solver,
)
from .errors import StrictModeError, TDLError
from .suites import ground_property, suite_properties

REFUSED = "Refused"
CSV_COLUMNS = ("property", "status", "counterexamples", "elapsed_ms")


def fixture_path(name):
    """Path of a bundled fixture such as ``compas_fixture.csv`` or ``loan.cfg``."""
    return str(resources.files("tdlaudit") / "data" / name)


DEFAULT_FILES = {
    "compas": ("compas_fixture.csv", "compas.cfg"),
    "loan": ("loan_fixture.csv", "loan.cfg"),
}


@dataclass
class PropertyResult:
    property_id: str
    formula: str
    verdict: Verdict = None
    grounded: object = field(default=None, repr=False)
    explanation: object = field(default=None, repr=False)
    error: str = ""
    elapsed_ms: float = 0.0
    solver_status: str = ""

    @property
    def status(self):
        return self.verdict.status if self.verdict is not None else REFUSED


@dataclass
class AuditReport:
    suite: str
    mode: str
    data_path: str
    rows: int
    skipped_rows: tuple
    config_echo: str
    results: list

    @property
    def statuses(self):
        return {r.property_id: r.status for r in self.results}

    @property
    def ethical(self):
        return all(r.status == SATISFIED for r in self.results)

    @property
    def exit_code(self):
        if any(r.status == REFUSED for r in self.results):
            return 2
        if any(r.solver_status and r.solver_status != r.status for r in self.results):
            return 2
        return 0 if self.ethical else 1


def run_audit(data_path, config_path, suite, mode="reproduction", *, cross_check=False, solver_cmd=None):
    """Ground and check every property of ``suite`` against one dataset."""
    cfg = load_config(config_path, suite)
    data = load_dataset(data_path, cfg)
    bindings = default_bindings(suite, cfg)
    results, skipped = [], []
    for sp in suite_properties(suite):
        start = time.perf_counter()
        res = PropertyResult(sp.id, sp.text)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                g = ground_property(sp.formula, data, bindings, mode=mode, property_id=sp.id)
        except StrictModeError as exc:
            res.error = str(exc)
        else:
            res.grounded = g
            res.verdict = check_grounded(g)
            skipped.extend(i for i in g.skipped_rows if i not in skipped)
            if res.verdict.status == UNSATISFIED:
                res.explanation = explain(res.verdict, g)
            if cross_check:
                out = run_solver(emit_smtlib(g), solver_cmd)
                res.solver_status = parse_solver_result(out).verdict
        res.elapsed_ms = (time.perf_counter() - start) * 1000.0
        results.append(res)
    return AuditReport(suite, mode, str(data_path), len(data), tuple(skipped), cfg.echo(), results)


def _valuation(v):
    return " ".join(f"{name}={'true' if val else 'false'}" for name, val in v.valuation)


def render_text(report, *, cap=10, show_all=False, timing=True):
    lines = [
        f"audit suite={report.suite} mode={report.mode} data={report.data_path} "
        f"rows={report.rows} skipped={len(report.skipped_rows)}",
        f"config: {report.config_echo}",
    ]
    if report.skipped_rows:
        lines.append("skipped rows (missing values): " + ", ".join(report.skipped_rows))
    for r in report.results:
        head = f"{r.property_id}  {r.status:<11}  {r.formula}"
        if timing:
            head += f"  [{r.elapsed_ms:.1f} ms]"
        if r.solver_status:
            head += f"  solver={r.solver_status}"
        lines.append(head)
        if r.error:
            lines.append(f"   error: {r.error}")
            continue
        if r.verdict.vacuous:
            lines.append("   warning: no rows left to check; the property holds vacuously")
        cex = r.verdict.counterexamples
        shown = cex if show_all else cex[:cap]
        for v in shown:
            lines.append(f"   counterexample rows {', '.join(v.rows)}: {v.clause}")
            lines.append(f"      {_valuation(v)}")
        if len(shown) < len(cex):
            lines.append(f"   ... {len(cex) - len(shown)} more (use --all)")
        if r.explanation is not None:
            lines.append(f"   explanation: {r.explanation.conclusion}")
    bad = sum(r.status == UNSATISFIED for r in report.results)
    if report.ethical:
        lines.append(f"overall: ethical per suite ({len(report.results)} of {len(report.results)} satisfied)")
    else:
        lines.append(f"overall: not ethical per suite ({bad} of {len(report.results)} unsatisfied)")
    lines.append("solver reading: the SMT-LIB export asserts the negated property, so sat means Unsatisfied "
                 "and unsat means Satisfied; asserting the property itself would read sat as consistent.")
    return "\n".join(lines) + "\n"


def render_csv(report, *, timing=True):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.results:
        n = len(r.verdict.counterexamples) if r.verdict is not None else 0
        w.writerow([r.property_id, r.status, n, f"{r.elapsed_ms:.3f}" if timing else ""])
    return buf.getvalue()


def parse_report_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or tuple(rows[0].keys()) != CSV_COLUMNS:
        raise TDLError("not an audit report CSV")
    return {r["property"]: r["status"] for r in rows}
