"""Verdicts for grounded properties, SMT-LIB export, solver output parsing and explanations.

Dataset atoms have fixed values, so deciding a grounded property is plain
circuit evaluation.  The SMT-LIB export asserts the atom values together
with the *negated* property: a solver answering ``sat`` has found a
violation, ``unsat`` means the property holds.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from .dataset import Threshold, _show
from .errors import ExplanationError, SolverOutputError, SolverUnknownError
from .suites import (
    GAnd,
    GAtom,
    GConst,
    GIff,
    GImplies,
    GNot,
    GOr,
    circuit_atoms,
    render_circuit,
)

SATISFIED = "Satisfied"
UNSATISFIED = "Unsatisfied"


@dataclass(frozen=True)
class Violation:
    rows: tuple
    clause: str
    valuation: tuple        # ((atom text, value), ...)


@dataclass(frozen=True)
class Verdict:
    property_id: str
    status: str
    counterexamples: tuple = ()
    stats: dict = field(default_factory=dict, compare=False)
    vacuous: bool = False

    @property
    def satisfied(self):
        return self.status == SATISFIED


def _atom_text(a):
    return f"{a.pred}({', '.join(a.ids)})"


def check_grounded(g):
    """Evaluate the circuit; every false top-level clause becomes one counterexample."""
    start = time.perf_counter()
    violations = []
    for c in g.clauses:
        if not c.circuit.eval():
            vals = tuple((_atom_text(a), a.value) for a in circuit_atoms(c.circuit))
            violations.append(Violation(c.rows, c.text, vals))
    holds = g.circuit.eval()
    if holds != (not violations):
        raise AssertionError("clause split disagrees with the circuit")
    stats = {
        "rows_checked": g.rows_checked,
        "pairs_checked": g.pairs_checked,
        "skipped_rows": len(g.skipped_rows),
        "elapsed_ms": (time.perf_counter() - start) * 1000.0,
    }
    vacuous = g.rows_checked == 0
    return Verdict(g.property_id, SATISFIED if holds else UNSATISFIED, tuple(violations), stats, vacuous)


# -- SMT-LIB -----------------------------------------------------------------

_SIMPLE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


def _symbol(text):
    if _SIMPLE.fullmatch(text):
        return text
    return "|" + text.replace("|", "_").replace("\\", "_") + "|"


def atom_symbol(pred, ids):
    return _symbol(pred + "".join(f"_r{i}" for i in ids))


def _smt_num(v, is_int):
    if is_int:
        n = int(v)
        return str(n) if n >= 0 else f"(- {-n})"
    x = float(v)
    body = repr(abs(x)) if not x.is_integer() else f"{abs(x):.1f}"
    return body if x >= 0 else f"(- {body})"


_SMT_OPS = {">=": ">=", ">": ">", "<=": "<=", "<": "<"}


def emit_smtlib(g, *, inline_thresholds=False, get_model=False):
    """SMT-LIB 2 text asserting the atom facts and the negated property.

    With ``inline_thresholds`` each threshold atom becomes a comparison on a
    declared numeric column constant, so the solver does the arithmetic.
    """
    atoms = sorted(g.atoms(), key=lambda a: (a.pred, a.ids))
    types = g.data.types if g.data is not None else {}
    inlined, numeric = {}, {}
    if inline_thresholds:
        for a in atoms:
            b = g.bindings.get(a.pred)
            if isinstance(b, Threshold):
                is_int = types.get(b.column) == "integer"
                const = atom_symbol(b.column, a.ids)
                numeric[const] = ("Int" if is_int else "Real", g.data.row(a.ids[0])[b.column], is_int)
                inlined[a.key] = f"({_SMT_OPS[b.op]} {const} {_smt_num(b.bound, is_int)})"
    sorts = {s for s, _, _ in numeric.values()}
    logic = "QF_UF" if not sorts else {frozenset({"Int"}): "QF_LIA", frozenset({"Real"}): "QF_LRA"}.get(
        frozenset(sorts), "QF_LIRA")

    def term(node):
        if isinstance(node, GConst):
            return "true" if node.value else "false"
        if isinstance(node, GAtom):
            return inlined.get(node.key) or atom_symbol(node.pred, node.ids)
        if isinstance(node, GNot):
            return f"(not {term(node.arg)})"
        if isinstance(node, (GAnd, GOr)):
            if not node.args:
                return "true" if isinstance(node, GAnd) else "false"
            if len(node.args) == 1:
                return term(node.args[0])
            op = "and" if isinstance(node, GAnd) else "or"
            return f"({op} {' '.join(term(a) for a in node.args)})"
        if isinstance(node, GImplies):
            return f"(=> {term(node.left)} {term(node.right)})"
        if isinstance(node, GIff):
            return f"(= {term(node.left)} {term(node.right)})"
        raise TypeError(node)

    lines = [f"; property {g.property_id}" if g.property_id else "; grounded property",
             f"(set-logic {logic})"]
    facts = []
    for const in sorted(numeric):
        sort, value, is_int = numeric[const]
        lines.append(f"(declare-fun {const} () {sort})")
        facts.append(f"(= {const} {_smt_num(value, is_int)})")
    for a in atoms:
        if a.key in inlined:
            continue
        sym = atom_symbol(a.pred, a.ids)
        lines.append(f"(declare-fun {sym} () Bool)")
        facts.append(sym if a.value else f"(not {sym})")
    negated = f"(not {term(g.circuit)})"
    if facts:
        lines.append("(assert (and")
        lines += ["  " + f for f in facts]
        lines.append("  " + negated + "))")
    else:
        lines.append(f"(assert {negated})")
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- solver output -----------------------------------------------------------

@dataclass(frozen=True)
class SolverResult:
    status: str             # sat | unsat
    verdict: str            # the property's status under the negated-assertion convention
    model: dict = field(default_factory=dict)


_SEXP_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\|[^|]*\|)|(\"(?:[^\"]|\"\")*\")|([^\s()|\"]+))")


def _sexps(text):
    stack, pos = [[]], 0
    text = re.sub(r";[^\n]*", "", text)
    while pos < len(text):
        m = _SEXP_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise SolverOutputError(f"unreadable solver output near {text[pos:pos + 20]!r}")
            break
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise SolverOutputError("unbalanced ')' in solver output")
            done = stack.pop()
            stack[-1].append(done)
        else:
            tok = m.group(3) or m.group(4) or m.group(5)
            stack[-1].append(tok[1:-1] if tok.startswith("|") else tok)
    if len(stack) != 1:
        raise SolverOutputError("unbalanced '(' in solver output")
    return stack[0]


def _value(v):
    if v == "true":
        return True
    if v == "false":
        return False
    if isinstance(v, list) and len(v) == 2 and v[0] == "-":
        inner = _value(v[1])
        return -inner
    if isinstance(v, list) and len(v) == 3 and v[0] == "/":
        return _value(v[1]) / _value(v[2])
    try:
        return int(v)
    except (TypeError, ValueError):
        try:
            return float(v)
        except (TypeError, ValueError):
            raise SolverOutputError(f"cannot read model value {v!r}") from None


def _model_entries(items):
    for item in items:
        if isinstance(item, list):
            if len(item) == 5 and item[0] == "define-fun" and item[2] == []:
                yield item[1], _value(item[4])
            else:
                yield from _model_entries(item)


def parse_solver_result(text):
    """Read a solver's stdout for the negated-assertion export."""
    items = _sexps(text)
    if not items or not isinstance(items[0], str):
        raise SolverOutputError(f"solver output does not start with sat/unsat/unknown: {text[:40]!r}")
    head = items[0]
    if head == "unknown":
        raise SolverUnknownError("solver answered unknown")
    if head not in ("sat", "unsat"):
        raise SolverOutputError(f"solver output does not start with sat/unsat/unknown: {text[:40]!r}")
    model = dict(_model_entries(items[1:])) if head == "sat" else {}
    return SolverResult(head, UNSATISFIED if head == "sat" else SATISFIED, model)


def solver_command(cmd=None):
    return cmd or os.environ.get("AUDIT_SOLVER_CMD") or None


def run_solver(smt_text, cmd=None, timeout=60):
    """Run the external solver named by ``cmd`` (or ``AUDIT_SOLVER_CMD``) on ``smt_text``."""
    cmd = solver_command(cmd)
    if not cmd:
        raise SolverOutputError("no solver configured; set AUDIT_SOLVER_CMD")
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False, encoding="utf-8") as fh:
        fh.write(smt_text)
        path = fh.name
    try:
        proc = subprocess.run(shlex.split(cmd) + [path], capture_output=True, text=True, timeout=timeout)
    finally:
        os.unlink(path)
    if not proc.stdout.strip():
        raise SolverOutputError(f"solver produced no output (exit {proc.returncode}): {proc.stderr.strip()}")
    return proc.stdout


# -- explanations ------------------------------------------------------------

@dataclass(frozen=True)
class ExplanationStep:
    rule: str               # negate | monotonicity | atom-eval | transitivity
    statement: str
    claims: tuple = ()      # ((pred, ids), value) pairs this step relies on


@dataclass(frozen=True)
class ExplanationTrace:
    property_id: str
    clause: str
    steps: tuple
    conclusion: str
    grounded: object = field(default=None, repr=False, compare=False)
    clause_circuit: object = field(default=None, repr=False, compare=False)

    def render(self):
        lines = [f"property {self.property_id}: {self.conclusion}"]
        lines += [f"  {n}. [{s.rule}] {s.statement}" for n, s in enumerate(self.steps, start=1)]
        return "\n".join(lines)

    def replay(self, data=None, bindings=None):
        """Recompute every claimed atom from the data and re-derive the violation."""
        g = self.grounded
        data = data if data is not None else g.data
        bindings = bindings if bindings is not None else g.bindings
        fresh = {}
        for step in self.steps:
            for (pred, ids), value in step.claims:
                actual = bool(bindings[pred].evaluate(data, *ids))
                if actual != value:
                    return False
                fresh[(pred, ids)] = actual
        return not self.clause_circuit.eval(fresh) and not g.circuit.eval(fresh)


def _literal_requirement(node, bindings, positive=True):
    if isinstance(node, GNot):
        return _literal_requirement(node.arg, bindings, not positive)
    if isinstance(node, GAtom):
        req = bindings[node.pred].requirement()
        return req if positive else f"not ({req})"
    return render_circuit(node) if positive else f"not ({render_circuit(node)})"


def _found(node, g):
    atoms = circuit_atoms(node)
    if len(atoms) == 1:
        a = atoms[0]
        return g.bindings[a.pred].found(g.data, *a.ids)
    return "; ".join(f"{_atom_text(a)}: {g.bindings[a.pred].found(g.data, *a.ids)}" for a in atoms)


def _true_literals(node):
    """Atom literals that make ``node`` true, for describing a satisfied antecedent."""
    if isinstance(node, GAtom):
        return [node] if node.value else []
    if isinstance(node, GNot) and isinstance(node.arg, GAtom):
        return [node] if not node.arg.value else []
    if isinstance(node, GAnd):
        return [lit for a in node.args for lit in _true_literals(a)]
    if isinstance(node, GOr):
        for a in node.args:
            if a.eval():
                return _true_literals(a)
    return [node] if node.eval() else []


def _contradiction(c, g):
    b = g.bindings
    if isinstance(c, GImplies):
        premise = " and ".join(_literal_requirement(lit, b) for lit in _true_literals(c.left))
        left_atoms = circuit_atoms(c.left)
        if any(g.bindings[a.pred].arity == 2 for a in left_atoms):
            premise += " [" + "; ".join(b[a.pred].found(g.data, *a.ids)
                                        for a in left_atoms if b[a.pred].arity == 2) + "]"
        if isinstance(c.right, GIff):
            l_atoms = circuit_atoms(c.right)
            want = " = ".join(_atom_text(a) for a in l_atoms)
            found = " vs ".join(f"{_atom_text(a)} {b[a.pred].found(g.data, *a.ids)}" for a in l_atoms)
            return f"{premise} requires {want}, found {found}"
        return f"{premise} requires {_literal_requirement(c.right, b)}, found {_found(c.right, g)}"
    if isinstance(c, GNot):
        arg = c.arg
        if isinstance(arg, GOr):
            arg = next(a for a in arg.args if a.eval())
        return f"{render_circuit(arg)} is forbidden, found {_found(arg, g)}"
    if isinstance(c, GOr):
        return f"no instance of {render_circuit(c)} holds"
    return f"{render_circuit(c)} fails, found {_found(c, g)}"


def explain(v, g, index=0):
    """Refutation trace for counterexample ``index`` of an unsatisfied verdict."""
    if v.status != UNSATISFIED:
        raise ExplanationError("only an unsatisfied verdict has a refutation to explain")
    failing = [c for c in g.clauses if not c.circuit.eval()]
    if not 0 <= index < len(failing):
        raise ExplanationError(f"no counterexample number {index}")
    clause = failing[index]
    c = clause.circuit
    atoms = circuit_atoms(c)
    claims = tuple((a.key, a.value) for a in atoms)
    evidence = ", ".join(
        f"{_atom_text(a)} = {_show(a.value)} [{g.bindings[a.pred].found(g.data, *a.ids)}]" for a in atoms)
    conclusion = _contradiction(c, g)
    steps = (
        ExplanationStep("negate", f"assume the negation !({g.formula}) to refute the property"),
        ExplanationStep("monotonicity", f"the grounded conjunction fails if one conjunct fails; isolate {clause.text}"),
        ExplanationStep("atom-eval", f"substitute row values: {evidence}", claims),
        ExplanationStep("transitivity", f"{conclusion}; so {clause.text} is false and the property does not hold",
                        claims),
    )
    return ExplanationTrace(g.property_id, clause.text, steps, conclusion, g, c)
