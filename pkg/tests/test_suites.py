import pytest
from hypothesis import given, strategies as st

from tdlaudit.audit import fixture_path
from tdlaudit.dataset import Dataset, default_bindings, load_config, load_dataset
from tdlaudit.errors import BindingError, StrictModeError
from tdlaudit.formula import parse_formula
from tdlaudit.suites import (
    GAnd,
    GImplies,
    compas_suite,
    deontic_closure,
    evaluate_on_dataset,
    ground_property,
    ground_suite,
    loan_suite,
)

CFG = {s: load_config(fixture_path(f"{s}.cfg")) for s in ("compas", "loan")}
BIND = {s: default_bindings(s, CFG[s]) for s in CFG}


def compas_rows(*rows):
    keys = ("race", "gender", "age", "priors_count", "decile_score", "outcome", "appeal")
    return Dataset.from_records(CFG["compas"].schema,
                                [dict(zip(keys, r), id=k + 1) for k, r in enumerate(rows)])


def loan_rows(*rows):
    keys = ("gender", "age", "credit_score", "income", "applied", "approved", "appeal")
    return Dataset.from_records(CFG["loan"].schema,
                                [dict(zip(keys, r), id=k + 1) for k, r in enumerate(rows)])


THREE = compas_rows(("A", "M", 30, 1, 7, 1, 0), ("B", "F", 40, 0, 2, 0, 0), ("A", "F", 22, 3, 9, 1, 1))


def test_suites_have_five_properties():
    assert list(compas_suite()) == list("abcde")
    assert list(loan_suite()) == list("abcde")


def test_suite_formulas():
    assert compas_suite()["a"] == parse_formula("P(forall i. priors(i) -> assess(i))")
    assert compas_suite()["d"] == parse_formula("forall i. !priors(i) -> Forb(recid(i))")
    assert compas_suite()["b"] == parse_formula("forall i. recid(i) -> assess(i)")
    assert loan_suite()["a"] == parse_formula("O(forall i. applies(i) -> (approved(i) | !approved(i)))")
    assert loan_suite()["b"] == parse_formula("forall i. (credit(i) | income(i)) -> approved(i)")
    assert loan_suite()["c"] == parse_formula("O(forall i, j. similar(i, j) -> (approved(i) <-> approved(j)))")


def test_universal_becomes_conjunction_of_implications():
    g = ground_property("forall i. priors(i) -> assess(i)", THREE, BIND["compas"])
    assert isinstance(g.circuit, GAnd) and len(g.circuit.args) == 3
    assert all(isinstance(a, GImplies) for a in g.circuit.args)
    assert [c.rows for c in g.clauses] == [("1",), ("2",), ("3",)]
    assert g.quantifiers == (("i", 3),)


def test_loan_c_over_two_rows_has_four_pair_instances():
    d = loan_rows(("F", 35, 650, 4000, 1, 0, 1), ("M", 35, 650, 4000, 1, 1, 0))
    g = ground_property(loan_suite()["c"], d, BIND["loan"], pair_index=False)
    assert g.pairs_checked == 4 and len(g.clauses) == 4
    assert not g.evaluate()
    indexed = ground_property(loan_suite()["c"], d, BIND["loan"])
    assert indexed.evaluate() == g.evaluate()


def test_pair_index_prunes_dissimilar_rows():
    d = loan_rows(("F", 35, 650, 4000, 1, 0, 1), ("M", 50, 800, 9000, 1, 1, 0))
    g = ground_property(loan_suite()["c"], d, BIND["loan"])
    assert g.pairs_checked == 2 and g.evaluate()


def test_unbound_predicate():
    with pytest.raises(BindingError):
        ground_property("forall i. explain(i)", THREE, BIND["compas"])


def test_strict_mode_refuses_deontic_operators():
    with pytest.raises(StrictModeError):
        ground_property(compas_suite()["a"], THREE, BIND["compas"], mode="strict")
    g = ground_property(compas_suite()["b"], THREE, BIND["compas"], mode="strict")
    assert g.evaluate()


def test_deontic_closure_respects_enclosing_quantifiers():
    f = deontic_closure(parse_formula("forall i. !priors(i) -> Forb(recid(i))"))
    assert f == parse_formula("forall i. !priors(i) -> Forb(recid(i))")
    assert deontic_closure(parse_formula("P(recid(i) -> appeal(i))")) == \
        parse_formula("P(exists i. recid(i) -> appeal(i))")
    assert deontic_closure(parse_formula("O(f(i))")) == parse_formula("O(forall i. f(i))")


def test_missing_values_are_skipped_with_warning():
    d = compas_rows(("A", "M", 30, 1, None, 1, 0), ("B", "F", 40, 0, 2, 0, 0))
    with pytest.warns(UserWarning, match="skipped"):
        g = ground_property(compas_suite()["b"], d, BIND["compas"])
    assert g.skipped_rows == ("1",) and g.rows_checked == 1


def test_fixture_verdict_pattern():
    for system, expect in (("compas", [True, False, False, False, True]), ("loan", [True, True, False, False, True])):
        data = load_dataset(fixture_path(f"{system}_fixture.csv"), CFG[system])
        got = [g.evaluate() for g in ground_suite(system, data, BIND[system]).values()]
        assert got == expect, system


# -- properties ----------------------------------------------------------------

compas_row = st.tuples(
    st.sampled_from(["A", "B"]), st.sampled_from(["M", "F"]), st.sampled_from([30, 40]),
    st.integers(0, 2), st.sampled_from([1, 5, 8]), st.integers(0, 1), st.integers(0, 1),
)
loan_row = st.tuples(
    st.sampled_from(["M", "F"]), st.sampled_from([30, 40]), st.sampled_from([650, 720]),
    st.sampled_from([4000, 6000]), st.integers(0, 1), st.integers(0, 1), st.integers(0, 1),
)
datasets = st.one_of(
    st.lists(compas_row, min_size=1, max_size=4).map(lambda rs: ("compas", compas_rows(*rs))),
    st.lists(loan_row, min_size=1, max_size=4).map(lambda rs: ("loan", loan_rows(*rs))),
)


@given(datasets)
def test_grounding_soundness(sd):
    system, d = sd
    suite = compas_suite() if system == "compas" else loan_suite()
    for pid, f in suite.items():
        g = ground_property(f, d, BIND[system])
        assert g.evaluate() == evaluate_on_dataset(f, d, BIND[system]), pid


@given(datasets, st.data())
def test_universal_properties_antitone(sd, draw):
    system, d = sd
    keep = draw.draw(st.lists(st.sampled_from(d.ids), min_size=1, unique=True))
    sub = d.subset(keep)
    universal = ["b"] + (["d"] if system == "compas" else [])
    suite = compas_suite() if system == "compas" else loan_suite()
    for pid in universal:
        full = ground_property(suite[pid], d, BIND[system]).evaluate()
        part = ground_property(suite[pid], sub, BIND[system]).evaluate()
        if full:
            assert part
        if not part:
            assert not full
