from pathlib import Path

import pytest

from tdlaudit.formula import Atom, Const, parse_formula, predicates
from tdlaudit.norms import (
    AUXILIARY,
    AXIOMS,
    THEOREMS,
    VOCABULARY,
    UnknownNormError,
    a24_witness,
    asserted_premise,
    axiom_formula,
    ground_sorted,
    render_report,
    theorem_obligation,
    theorem_report,
    theorem_spec,
    validate_theorem,
)
from tdlaudit.semantics import Bounds, Counterexample, check_validity, evaluate

GOLDEN = Path(__file__).parent / "golden" / "theorems.report"


def test_axiom_a21_example():
    assert axiom_formula("A2.1") == parse_formula("[]O(fair('x'))")


def test_grounding_expands_quantifiers_by_sort():
    f = ground_sorted(parse_formula("forall a. ethical_a(a)"))
    assert f == Atom("ethical_a", (Const("a"),))
    f = ground_sorted(parse_formula("exists c. cf(x, c)"), {"x": ("x",), "c": ("c1", "c2")})
    assert f == parse_formula("cf('x', 'c1') | cf('x', 'c2')")


def test_unknown_ids():
    with pytest.raises(UnknownNormError):
        axiom_formula("A9.9")
    with pytest.raises(UnknownNormError):
        theorem_spec("T99")


def test_vocabulary_covers_every_norm():
    for schema in list(AXIOMS.values()) + list(AUXILIARY.values()):
        for name, arity in predicates(schema.formula).items():
            assert VOCABULARY[name].arity == arity, schema.id
    for spec in THEOREMS.values():
        for name, arity in predicates(spec.conclusion_formula).items():
            assert VOCABULARY[name].arity == arity, spec.id


def test_global_premises_are_boxed():
    assert asserted_premise(AXIOMS["A2.2"]) == parse_formula("[](bias('x') -> !ethical('x'))")
    assert asserted_premise(AXIOMS["A2.3"]) == parse_formula("!bias('x') U fair('x')")


def test_t2_valid_over_all_bounded_traces():
    r = validate_theorem("T2")
    assert r.status == "valid"
    assert r.models_checked == Bounds(3, r.atoms).count() == 33032


def test_t2_small_bound_count():
    b = Bounds(2, (("performs", ("x", "a")), ("ethical_a", ("a",))), min_states=2)
    r = validate_theorem("T2", b)
    assert r.status == "valid" and r.models_checked == 2 ** (2 * 2 + 4) == 256


@pytest.mark.parametrize("tid", ["T1", "T4", "T5", "T6", "T7"])
def test_counterexamples_are_genuine(tid):
    r = validate_theorem(tid)
    assert r.status == "counterexample"
    prem, concl = theorem_obligation(tid)
    m = r.counterexample.model
    assert all(evaluate(m, 0, {}, p) for p in prem)
    assert not evaluate(m, 0, {}, concl)


@pytest.mark.parametrize("tid", ["T3", "T8"])
def test_valid_theorems(tid):
    assert validate_theorem(tid).status == "valid"


def test_premises_are_needed():
    # T3 fails once its premises are dropped
    _, concl = theorem_obligation("T3")
    assert isinstance(check_validity([], concl, Bounds(3, (("fair", ("x",)), ("ethical", ("x",)))), at="initial"),
                      Counterexample)


def test_premise_monotonicity():
    prem, concl = theorem_obligation("T3")
    extra = asserted_premise(AXIOMS["A3.1"])
    atoms = (("fair", ("x",)), ("ethical", ("x",)), ("bias", ("x",)), ("transparent", ("x",)))
    assert check_validity(prem + [extra], concl, Bounds(3, atoms), at="initial")


def test_a24_has_a_witness():
    r = a24_witness()
    assert r.status == "satisfiable"
    m = r.counterexample.model
    assert evaluate(m, 0, {}, axiom_formula("A2.4"))


def test_skipped_when_too_many_atoms():
    r = validate_theorem("T6", max_atoms=2)
    assert r.status == "skipped" and r.models_checked == 0


def test_report_matches_golden():
    assert render_report(theorem_report()) == GOLDEN.read_text(encoding="utf-8")


def test_report_details_include_models():
    text = render_report([validate_theorem("T7")], details=True)
    assert "# T7 counterexample:" in text and "falsified at" in text
