"""Ethics axioms and theorems over a small predicate vocabulary, checked by enumeration.

Each axiom and theorem is written with the variables ``x`` (a system),
``a`` (an action) and ``c`` (a fairness constraint).  Before checking, every
variable is bound to the single constant of its sort and quantifiers are
expanded over that sort, so the enumerated models only carry ground atoms.

Premises come in two scopes.  ``global`` premises are implications used
pointwise at every time and are asserted as ``[](...)`` at the initial
state; ``initial`` premises already carry their own temporal operators
and are asserted at the initial state as written.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TDLError
from .formula import (
    Always,
    Atom,
    Const,
    Exists,
    Forall,
    PredicateSymbol,
    Var,
    _rebuild,
    children,
    parse_formula,
    predicates,
)
from .semantics import (
    Bounds,
    Counterexample,
    _infer_atoms,
    check_validity,
    dump_model,
)

VOCABULARY = {
    s.name: s
    for s in (
        PredicateSymbol("ethical", 1),       # E(x)
        PredicateSymbol("guidelines", 1),    # G(x)
        PredicateSymbol("fair", 1),          # F(x)
        PredicateSymbol("bias", 1),          # B(x)
        PredicateSymbol("learns", 1),        # L(x)
        PredicateSymbol("inherent_xai", 1),  # X(x)
        PredicateSymbol("retrofit_xai", 1),  # R(x)
        PredicateSymbol("cf", 2),            # C(x, c)
        PredicateSymbol("transparent", 1),   # T(x)
        PredicateSymbol("ethical_a", 1),     # E(a)
        PredicateSymbol("fair_train", 1),
        PredicateSymbol("fair_deploy", 1),
        PredicateSymbol("bias_train", 1),
        PredicateSymbol("bias_deploy", 1),
        PredicateSymbol("performs", 2),      # x_a
        PredicateSymbol("bm", 0),            # bias-mitigation event
    )
}

SORTS = {"x": ("x",), "a": ("a",), "c": ("c",)}


class UnknownNormError(TDLError, KeyError):
    pass


@dataclass(frozen=True)
class AxiomSchema:
    id: str
    text: str
    prose: str
    scope: str = "global"

    @property
    def formula(self):
        return parse_formula(self.text)


@dataclass(frozen=True)
class TheoremSpec:
    id: str
    premises: tuple
    conclusion: str
    expected_status: str = "unknown"
    note: str = ""

    @property
    def conclusion_formula(self):
        return parse_formula(self.conclusion)

    def premise_schemas(self):
        return [premise(p) for p in self.premises]


AXIOMS = {
    a.id: a
    for a in (
        AxiomSchema("A1.1", "ethical(x) -> O(performs(x, a) & ethical_a(a))",
                    "an ethical system is obliged to perform ethical actions"),
        AxiomSchema("A1.2", "ethical(x) -> !P(performs(x, a) & !ethical_a(a))",
                    "an ethical system may not perform an unethical action"),
        AxiomSchema("A1.3", "ethical(x) -> P(performs(x, a) & ethical_a(a))",
                    "an ethical system may perform an ethical action"),
        AxiomSchema("A1.4", "guidelines(x) -> forall a. ethical_a(a)",
                    "following guidelines means acting ethically"),
        AxiomSchema("A2.1", "[]O(fair(x))", "fairness is a standing obligation", "initial"),
        AxiomSchema("A2.2", "bias(x) -> !ethical(x)", "bias rules out ethical behaviour"),
        AxiomSchema("A2.3", "!bias(x) U fair(x)", "no bias until fairness is in place", "initial"),
        AxiomSchema("A2.4", "!([](fair_train(x) -> fair_deploy(x)))",
                    "training fairness need not carry over to deployment", "witness"),
        AxiomSchema("A2.5", "!fair(x) -> bias(x)", "unfairness means bias"),
        AxiomSchema("A3.1", "transparent(x) -> ethical(x)", "transparency suffices for ethics"),
        AxiomSchema("A3.2", "cf(x, c) -> !bias(x)", "counterfactual fairness removes bias"),
        AxiomSchema("A3.3", "retrofit_xai(x) -> ethical(x)", "retrofitted explanations suffice for ethics"),
    )
}

# Auxiliary assumptions spelled out in the theorem arguments; never added silently.
AUXILIARY = {
    a.id: a
    for a in (
        AxiomSchema("T5/step2", "learns(x) -> <>fair(x)", "a learning system eventually becomes fair"),
        AxiomSchema("T6/step3", "<>ethical(x)", "the system eventually becomes ethical", "initial"),
        AxiomSchema("T6/step5a", "<>!bias_deploy(x) -> bm", "a bias-free deployment point triggers mitigation"),
        AxiomSchema("T6/step5b", "bm -> <>[]!bias_deploy(x)", "mitigation removes deployment bias for good"),
        AxiomSchema("T7/step1", "!(inherent_xai(x) | retrofit_xai(x)) -> !transparent(x)",
                    "without explanations a system is not transparent"),
        AxiomSchema("T8/step5", "ethical(x) -> !bias(x)", "ethical systems are unbiased"),
        AxiomSchema("T8/step6", "[]!bias(x) -> <>ethical(x)", "lasting absence of bias leads to ethics"),
    )
}

_P = "performs(x, a) & ethical_a(a)"

THEOREMS = {
    t.id: t
    for t in (
        TheoremSpec("T1", ("A1.4",), "O(performs(x, a) & ethical_a(a)) -> O(performs(x, a) & guidelines(x))"),
        TheoremSpec("T2", (), f"O({_P}) -> !P(!({_P}))", "valid-up-to-bounds"),
        TheoremSpec("T3", ("A2.2", "A2.5"), "<>!fair(x) -> <>!ethical(x)", "valid-up-to-bounds"),
        TheoremSpec("T4", ("A2.1", "A2.2", "A2.5"),
                    "ethical(x) -> ([]fair(x) | (<>fair(x) & [](!fair(x) U fair(x))))"),
        TheoremSpec("T5", ("A2.1", "T5/step2"),
                    "ethical(x) & learns(x) -> [](<>fair_train(x) & <>fair_deploy(x))",
                    note="A2.4 is a satisfiability claim and is checked separately"),
        TheoremSpec("T6", ("A2.2", "T6/step3", "T6/step5a", "T6/step5b"),
                    "bias_train(x) & learns(x) -> <>(!bias_deploy(x) & []!bias_deploy(x))"),
        TheoremSpec("T7", ("A3.1", "T7/step1"), "ethical(x) -> <>(inherent_xai(x) | retrofit_xai(x))"),
        TheoremSpec("T8", ("A3.2", "T8/step5", "T8/step6"), "<>[]cf(x, c) -> <>ethical(x)"),
    )
}


def premise(pid):
    try:
        return AXIOMS[pid] if pid in AXIOMS else AUXILIARY[pid]
    except KeyError:
        raise UnknownNormError(f"unknown axiom or assumption {pid!r}") from None


def ground_sorted(f, sorts=SORTS, sigma=None):
    """Bind each variable to its sort's constants and expand quantifiers by sort.

    Free variables must have a single constant in their sort.
    """
    sigma = dict(sigma or {})
    if isinstance(f, Atom):
        args = []
        for t in f.args:
            if isinstance(t, Var):
                if t.name not in sigma:
                    dom = sorts.get(t.name)
                    if dom is None or len(dom) != 1:
                        raise UnknownNormError(f"variable {t.name!r} has no single-constant sort")
                    sigma[t.name] = dom[0]
                args.append(Const(sigma[t.name]))
            else:
                args.append(t)
        return Atom(f.pred, tuple(args))
    if isinstance(f, (Forall, Exists)):
        dom = sorts.get(f.var)
        if not dom:
            raise UnknownNormError(f"no sort for bound variable {f.var!r}")
        parts = [ground_sorted(f.body, sorts, {**sigma, f.var: d}) for d in dom]
        out = parts[0]
        for p in parts[1:]:
            out = (out & p) if isinstance(f, Forall) else (out | p)
        return out
    return _rebuild(f, [ground_sorted(k, sorts, sigma) for k in children(f)])


def axiom_formula(aid):
    """The axiom with its variables bound over the bounded domain."""
    if aid not in AXIOMS:
        raise UnknownNormError(f"unknown axiom {aid!r}")
    return ground_sorted(AXIOMS[aid].formula)


def theorem_spec(tid):
    try:
        return THEOREMS[tid]
    except KeyError:
        raise UnknownNormError(f"unknown theorem {tid!r}") from None


def asserted_premise(schema):
    f = ground_sorted(schema.formula)
    return Always(f) if schema.scope == "global" else f


@dataclass(frozen=True)
class ValidationReport:
    id: str
    premises: tuple
    status: str
    models_checked: int
    counterexample: object = None
    atoms: tuple = field(default=(), repr=False)

    def line(self):
        return f"{self.id} premises=[{','.join(self.premises)}] {self.status} models={self.models_checked}"


def theorem_obligation(tid):
    """Premises as asserted at the initial state, and the ground conclusion."""
    spec = theorem_spec(tid)
    prem = [asserted_premise(s) for s in spec.premise_schemas()]
    return prem, ground_sorted(spec.conclusion_formula)


def validate_theorem(tid, bounds=None, *, max_states=3, max_atoms=6, engine="auto"):
    """Check one theorem over every trace of up to ``max_states`` states.

    The atom set is read off the ground premises and conclusion.  Theorems
    needing more than ``max_atoms`` atoms are reported as ``skipped``.
    """
    spec = theorem_spec(tid)
    prem, concl = theorem_obligation(tid)
    found = _infer_atoms(prem + [concl])
    if bounds is None:
        if len(found) > max_atoms:
            return ValidationReport(tid, spec.premises, "skipped", 0, None, found)
        bounds = Bounds(max_states=max_states, atoms=found)
    else:
        missing = [a for a in found if a not in bounds.atoms]
        bounds = Bounds(bounds.max_states, bounds.atoms + tuple(missing), bounds.domain,
                        bounds.trace_only, bounds.min_states)
    result = check_validity(prem, concl, bounds, at="initial", engine=engine)
    if isinstance(result, Counterexample):
        return ValidationReport(tid, spec.premises, "counterexample", result.models_checked, result, bounds.atoms)
    return ValidationReport(tid, spec.premises, "valid", result.models_checked, None, bounds.atoms)


def a24_witness(max_states=3):
    """A trace where training fairness does not carry into deployment, if one exists."""
    f = ground_sorted(AXIOMS["A2.4"].formula)
    found = _infer_atoms([f])
    result = check_validity([], ~f, Bounds(max_states=max_states, atoms=found), at="initial")
    status = "satisfiable" if isinstance(result, Counterexample) else "unsatisfiable"
    return ValidationReport("A2.4", (), status, result.models_checked, result, found)


def vocabulary_violations(f):
    """Predicates of ``f`` missing from the vocabulary or used at the wrong arity."""
    bad = []
    for name, arity in predicates(f).items():
        sym = VOCABULARY.get(name)
        if sym is None or sym.arity != arity:
            bad.append(name)
    return bad


def theorem_report(max_states=3, max_atoms=6, ids=None, *, with_witness=True):
    reports = [validate_theorem(t, max_states=max_states, max_atoms=max_atoms) for t in (ids or THEOREMS)]
    if with_witness:
        reports.append(a24_witness(max_states))
    return reports


def render_report(reports, *, details=False):
    lines = [r.line() for r in reports]
    if details:
        for r in reports:
            if r.counterexample is not None and r.status == "counterexample":
                lines.append(f"# {r.id} counterexample:")
                lines += ["#   " + ln for ln in dump_model(r.counterexample.model).splitlines()]
                lines.append(f"#   falsified at {r.counterexample.model.state_names[r.counterexample.state]}")
    return "\n".join(lines) + "\n"
