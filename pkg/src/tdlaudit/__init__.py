"""Temporal deontic logic: formulas, finite-model semantics, bounded theorem
checking and ethics audits of tabular datasets."""

from .audit import AuditReport, fixture_path, run_audit
from .dataset import Dataset, default_bindings, load_config, load_csv, similar
from .engine import (
    ExplanationTrace,
    Verdict,
    check_grounded,
    emit_smtlib,
    explain,
    parse_solver_result,
)
from .formula import (
    Always,
    And,
    Atom,
    Const,
    Eventually,
    Exists,
    Forall,
    Forb,
    Formula,
    Iff,
    Implies,
    Not,
    Oblig,
    Or,
    Perm,
    PredicateSymbol,
    Until,
    Var,
    free_variables,
    normalize_duals,
    parse_formula,
    render_formula,
    substitute,
)
from .norms import axiom_formula, theorem_spec, validate_theorem
from .semantics import (
    Bounds,
    Counterexample,
    KripkeModel,
    TraceModel,
    ValidUpToBounds,
    check_validity,
    enumerate_models,
    evaluate,
    evaluate_trace,
)
from .suites import compas_suite, ground_property, loan_suite

__version__ = "0.1.0"
