from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from tdlaudit.audit import fixture_path
from tdlaudit.dataset import (
    BoolColumn,
    Dataset,
    IsNull,
    PairIndex,
    SimilarPair,
    Threshold,
    coerce,
    default_bindings,
    load_config,
    load_dataset,
    parse_config,
    similar,
)
from tdlaudit.errors import (
    BindingError,
    CoercionError,
    ConfigError,
    DuplicateIdError,
    EmptyDatasetError,
    MissingColumnError,
)

COMPAS_COLS = "id,race,gender,age,priors_count,decile_score,outcome,appeal"


@pytest.fixture(scope="module")
def compas_cfg():
    return load_config(fixture_path("compas.cfg"))


@pytest.fixture(scope="module")
def loan_cfg():
    return load_config(fixture_path("loan.cfg"))


@pytest.fixture(scope="module")
def loan(loan_cfg):
    return load_dataset(fixture_path("loan_fixture.csv"), loan_cfg)


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_three_rows(tmp_path, compas_cfg):
    p = write(tmp_path, COMPAS_COLS + "\n1,A,M,30,1,7,1,0\n2,B,F,40,0,2,0,0\n3,A,F,22,3,9,1,1\n")
    d = load_dataset(p, compas_cfg)
    assert len(d) == 3 and d.columns == tuple(COMPAS_COLS.split(","))
    assert d.row(3)["decile_score"] == 9 and d.ids == ("1", "2", "3")


def test_coercion_error_reports_cell(tmp_path, compas_cfg):
    p = write(tmp_path, COMPAS_COLS + "\n1,A,M,30,1,7,1,0\n2,B,F,forty,0,2,0,0\n")
    with pytest.raises(CoercionError) as info:
        load_dataset(p, compas_cfg)
    assert (info.value.row, info.value.column) == (3, "age")


def test_empty_data_section(tmp_path, compas_cfg):
    p = write(tmp_path, COMPAS_COLS + "\n")
    with pytest.raises(EmptyDatasetError, match="at least one row"):
        load_dataset(p, compas_cfg)


def test_missing_column_and_duplicate_id(tmp_path, compas_cfg):
    with pytest.raises(MissingColumnError):
        load_dataset(write(tmp_path, "id,race\n1,A\n"), compas_cfg)
    with pytest.raises(DuplicateIdError):
        load_dataset(write(tmp_path, COMPAS_COLS + "\n1,A,M,30,1,7,1,0\n1,B,F,40,0,2,0,0\n"), compas_cfg)


def test_coerce():
    assert coerce(" 7 ", "integer") == 7
    assert coerce("2.5", "real") == 2.5
    assert coerce("Yes", "boolean") is True
    assert coerce("", "integer") is None
    with pytest.raises(ValueError):
        coerce("inf", "real")


def test_rows_are_read_only(loan):
    with pytest.raises(TypeError):
        loan.rows[0]["income"] = 1


def test_compas_bindings(compas_cfg):
    b = default_bindings("compas", compas_cfg)
    d = Dataset.from_records(compas_cfg.schema, [
        {"id": 1, "priors_count": 0, "decile_score": 7, "outcome": 1, "appeal": 0},
    ])
    assert b["assess"].evaluate(d, "1")
    assert not b["priors"].evaluate(d, "1")
    assert b["recid"].evaluate(d, "1")
    assert not b["appeal"].evaluate(d, "1")
    assert b["assess"].requirement() == "decile_score ≥ 5"


def test_loan_similar_rows(loan, loan_cfg):
    assert similar(loan, 4, 9, loan_cfg)
    assert loan.row(4)["gender"] != loan.row(9)["gender"]
    assert not similar(loan, 1, 2, loan_cfg)
    with pytest.raises(ValueError):
        similar(loan, 4, 4, loan_cfg)
    with pytest.raises(KeyError):
        similar(loan, 4, 99, loan_cfg)


def test_flip_binding_finds_the_loan_pair(loan, loan_cfg):
    flip = default_bindings("loan", loan_cfg)["sensitive"]
    flagged = [i for i in loan.ids if flip.evaluate(loan, i)]
    assert flagged == ["4", "9"]
    assert "gender" in flip.found(loan, "4")


def test_binding_requires_schema_column(loan_cfg):
    text = Path(fixture_path("loan.cfg")).read_text(encoding="utf-8").replace("credit = credit_score", "credit = fico")
    with pytest.raises(BindingError):
        default_bindings("loan", parse_config(text))


def test_other_rules():
    d = Dataset.from_records({"id": "categorical", "flag": "boolean", "x": "real"},
                             [{"id": "a", "flag": True, "x": None}, {"id": "b", "flag": False, "x": 1.5}])
    assert BoolColumn("f", "flag").evaluate(d, "a")
    assert IsNull("n", "x").evaluate(d, "a") and not IsNull("n", "x").evaluate(d, "b")
    assert Threshold("t", "x", "<", 2).evaluate(d, "b")


@pytest.mark.parametrize(
    "edit, message",
    [
        (("decile_threshold = 5", "decile_threshold = nan"), "finite"),
        (("decile_threshold = 5", "decile_threshold = five"), "not a number"),
        (("decile_threshold = 5", ""), "required"),
        (("[columns.nonsensitive]\nage", "[columns.nonsensitive]\nrace\nage"), "both sensitive"),
        (("age = integer", "age = float"), "unknown type"),
        (("[columns.sensitive]\nrace", "[columns.sensitive]\nethnicity"), "absent from the schema"),
    ],
)
def test_config_errors(edit, message):
    text = Path(fixture_path("compas.cfg")).read_text(encoding="utf-8")
    assert edit[0] in text
    with pytest.raises(ConfigError, match=message):
        parse_config(text.replace(edit[0], edit[1]))


def test_config_system_mismatch():
    with pytest.raises(ConfigError):
        load_config(fixture_path("compas.cfg"), "loan")


def test_config_echo(loan_cfg):
    assert loan_cfg.echo() == ("credit_threshold=700 income_threshold=5000 "
                               "sensitive=gender nonsensitive=age,credit_score,income")


def test_empty_records_rejected():
    with pytest.raises(EmptyDatasetError):
        Dataset.from_records({"id": "categorical"}, [])


def test_pair_index_groups(loan, loan_cfg):
    idx = PairIndex(loan, loan_cfg.nonsensitive)
    assert [r["id"] for r in idx.partners(loan.row(4))] == ["4", "9"]


# -- properties ----------------------------------------------------------------

_rows = st.lists(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.sampled_from("MF")), min_size=1, max_size=6
)


def _data(rows):
    return Dataset.from_records({"id": "categorical", "a": "integer", "b": "integer", "g": "categorical"},
                                [{"id": k, "a": a, "b": b, "g": g} for k, (a, b, g) in enumerate(rows)])


@given(_rows)
def test_similar_is_symmetric_and_transitive(rows):
    d = _data(rows)
    s = SimilarPair("similar", ("a", "b"), ("g",))
    ids = d.ids
    for i in ids:
        for j in ids:
            assert s.evaluate(d, i, j) == s.evaluate(d, j, i)
            for k in ids:
                if s.evaluate(d, i, j) and s.evaluate(d, j, k):
                    assert s.evaluate(d, i, k)
