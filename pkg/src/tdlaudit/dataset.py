"""Typed CSV datasets, audit configuration files and predicate bindings.

A binding turns a predicate symbol into a decidable rule over the columns of
one row (or a pair of rows).  Each binding can also say, in words, what it
requires and what a given row actually holds, which the explanation
builder uses.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

from .errors import (
    BindingError,
    CoercionError,
    ConfigError,
    DuplicateIdError,
    EmptyDatasetError,
    MissingColumnError,
)

TYPES = ("integer", "real", "categorical", "boolean")
_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def coerce(text, type_tag):
    """Parse one cell; empty cells become ``None``."""
    text = text.strip()
    if text == "":
        return None
    if type_tag == "integer":
        return int(text)
    if type_tag == "real":
        value = float(text)
        if not math.isfinite(value):
            raise ValueError(text)
        return value
    if type_tag == "boolean":
        return _BOOL[text.lower()]
    if type_tag == "categorical":
        return text
    raise ValueError(f"unknown column type {type_tag!r}")


@dataclass(frozen=True)
class Dataset:
    schema: tuple          # ((name, type_tag), ...)
    rows: tuple            # read-only mappings, file order
    id_column: str
    source: str = ""

    def __post_init__(self):
        if not self.rows:
            raise EmptyDatasetError("dataset must contain at least one row")
        names = [n for n, _ in self.schema]
        if self.id_column not in names:
            raise MissingColumnError(f"id column {self.id_column!r} is not in the schema")
        seen = set()
        for row in self.rows:
            rid = row[self.id_column]
            if rid is None:
                raise DuplicateIdError("row without an id")
            if rid in seen:
                raise DuplicateIdError(f"duplicate id {rid!r}")
            seen.add(rid)
        object.__setattr__(self, "_by_id", {r[self.id_column]: r for r in self.rows})

    @classmethod
    def from_records(cls, schema, records, id_column="id", source=""):
        schema = tuple((n, t) for n, t in (schema.items() if isinstance(schema, dict) else schema))
        rows = []
        for rec in records:
            row = {n: rec.get(n) for n, _ in schema}
            row[id_column] = None if row[id_column] is None else str(row[id_column])
            rows.append(MappingProxyType(row))
        return cls(schema, tuple(rows), id_column, source)

    @property
    def columns(self):
        return tuple(n for n, _ in self.schema)

    @property
    def types(self):
        return dict(self.schema)

    @property
    def ids(self):
        return tuple(r[self.id_column] for r in self.rows)

    def __len__(self):
        return len(self.rows)

    def row(self, rid):
        try:
            return self._by_id[str(rid)]
        except KeyError:
            raise KeyError(f"unknown row id {rid!r}") from None

    def subset(self, ids):
        keep = set(map(str, ids))
        return Dataset(self.schema, tuple(r for r in self.rows if r[self.id_column] in keep),
                       self.id_column, self.source)


def load_csv(path, schema, id_column="id"):
    """Read a header-first CSV, keeping only the columns named in ``schema``."""
    schema = tuple(schema.items()) if isinstance(schema, dict) else tuple(schema)
    for name, tag in schema:
        if tag not in TYPES:
            raise ConfigError(f"column {name!r}: unknown type {tag!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDatasetError(f"{path}: dataset must contain at least one row") from None
        missing = [n for n, _ in schema if n not in header]
        if missing:
            raise MissingColumnError(f"{path}: missing column(s) {', '.join(missing)}")
        pos = {n: header.index(n) for n, _ in schema}
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if not any(c.strip() for c in cells):
                continue
            row = {}
            for name, tag in schema:
                i = pos[name]
                cell = cells[i] if i < len(cells) else ""
                try:
                    row[name] = coerce(cell, "categorical" if name == id_column else tag)
                except (ValueError, KeyError):
                    raise CoercionError(lineno, name, cell, tag) from None
            rows.append(MappingProxyType(row))
    if not rows:
        raise EmptyDatasetError(f"{path}: dataset must contain at least one row")
    return Dataset(schema, tuple(rows), id_column, str(path))


# -- configuration -----------------------------------------------------------

_ROLE_DEFAULTS = {
    "compas": {"priors": "priors_count", "decile": "decile_score", "outcome": "outcome", "appeal": "appeal"},
    "loan": {"credit": "credit_score", "income": "income", "applied": "applied",
             "approved": "approved", "appeal": "appeal"},
}
_REQUIRED_THRESHOLDS = {"compas": ("decile_threshold",), "loan": ("credit_threshold", "income_threshold")}


@dataclass(frozen=True)
class AuditConfig:
    system: str
    id_column: str
    schema: tuple
    thresholds: dict
    sensitive: tuple
    nonsensitive: tuple
    bindings: dict = field(default_factory=dict)
    source: str = ""

    def __post_init__(self):
        if self.system not in _ROLE_DEFAULTS:
            raise ConfigError(f"unknown system {self.system!r}; expected compas or loan")
        overlap = set(self.sensitive) & set(self.nonsensitive)
        if overlap:
            raise ConfigError(f"columns both sensitive and nonsensitive: {', '.join(sorted(overlap))}")
        for key in _REQUIRED_THRESHOLDS[self.system]:
            if key not in self.thresholds:
                raise ConfigError(f"[thresholds] {key} is required for {self.system}")
        for key, value in self.thresholds.items():
            if not math.isfinite(value):
                raise ConfigError(f"threshold {key} must be finite")
        roles = dict(_ROLE_DEFAULTS[self.system])
        unknown = set(self.bindings) - set(roles)
        if unknown:
            raise ConfigError(f"unknown binding role(s): {', '.join(sorted(unknown))}")
        roles.update(self.bindings)
        object.__setattr__(self, "bindings", roles)

    def column(self, role):
        return self.bindings[role]

    @property
    def outcome_column(self):
        return self.bindings["outcome" if self.system == "compas" else "approved"]

    def echo(self):
        parts = [f"{k}={_fmt(v)}" for k, v in sorted(self.thresholds.items())]
        parts.append("sensitive=" + ",".join(self.sensitive))
        parts.append("nonsensitive=" + ",".join(self.nonsensitive))
        return " ".join(parts)


def _fmt(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def parse_config(text, system=None, source=""):
    cp = configparser.ConfigParser(allow_no_value=True, interpolation=None, delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    ds = cp["dataset"] if cp.has_section("dataset") else {}
    system = system or ds.get("system")
    if not system:
        raise ConfigError("no system given (set [dataset] system = compas|loan)")
    if system != ds.get("system", system):
        raise ConfigError(f"config is for {ds.get('system')!r}, not {system!r}")
    if not cp.has_section("schema"):
        raise ConfigError("config needs a [schema] section")
    schema = []
    for name, tag in cp.items("schema"):
        if tag not in TYPES:
            raise ConfigError(f"[schema] {name}: unknown type {tag!r}")
        schema.append((name, tag))
    thresholds = {}
    if cp.has_section("thresholds"):
        for key, value in cp.items("thresholds"):
            try:
                thresholds[key] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"[thresholds] {key}: not a number: {value!r}") from None
    names = [n for n, _ in schema]

    def column_list(section):
        cols = tuple(cp[section]) if cp.has_section(section) else ()
        bad = [c for c in cols if c not in names]
        if bad:
            raise ConfigError(f"[{section}] names columns absent from the schema: {', '.join(bad)}")
        return cols

    bindings = dict(cp.items("bindings")) if cp.has_section("bindings") else {}
    return AuditConfig(
        system=system,
        id_column=ds.get("id_column", "id"),
        schema=tuple(schema),
        thresholds=thresholds,
        sensitive=column_list("columns.sensitive"),
        nonsensitive=column_list("columns.nonsensitive"),
        bindings=bindings,
        source=source,
    )


def load_config(path, system=None):
    return parse_config(Path(path).read_text(encoding="utf-8"), system, str(path))


def load_dataset(path, cfg):
    return load_csv(path, cfg.schema, cfg.id_column)


# -- bindings ----------------------------------------------------------------

class PairIndex:
    """Rows grouped by their nonsensitive-column tuple, in file order."""

    def __init__(self, data, nonsensitive, rows=None):
        self.nonsensitive = tuple(nonsensitive)
        self.groups = {}
        for r in rows if rows is not None else data.rows:
            self.groups.setdefault(self.key(r), []).append(r)

    def key(self, row):
        return tuple(row[c] for c in self.nonsensitive)

    def partners(self, row):
        return self.groups.get(self.key(row), [])


class PredicateBinding:
    arity = 1

    def columns(self):
        return ()

    def evaluate(self, data, *ids):
        raise NotImplementedError

    def requirement(self):
        """What the predicate demands, in words."""
        raise NotImplementedError

    def found(self, data, *ids):
        """What the row(s) actually hold, in words."""
        raise NotImplementedError

    def describe(self, data, *ids):
        return f"{self.requirement()} (found {self.found(data, *ids)})"

    def check_schema(self, data):
        missing = [c for c in self.columns() if c not in data.columns]
        if missing:
            raise MissingColumnError(f"{self.name}: column(s) {', '.join(missing)} not in the dataset")


_OPS = {">=": (lambda a, b: a >= b, "≥"), ">": (lambda a, b: a > b, ">"),
        "<=": (lambda a, b: a <= b, "≤"), "<": (lambda a, b: a < b, "<")}


@dataclass(frozen=True)
class Threshold(PredicateBinding):
    name: str
    column: str
    op: str
    bound: float

    def columns(self):
        return (self.column,)

    def evaluate(self, data, i):
        return bool(_OPS[self.op][0](data.row(i)[self.column], self.bound))

    def requirement(self):
        return f"{self.column} {_OPS[self.op][1]} {_fmt(self.bound)}"

    def found(self, data, i):
        return _show(data.row(i)[self.column])


@dataclass(frozen=True)
class Equals(PredicateBinding):
    name: str
    column: str
    value: object

    def columns(self):
        return (self.column,)

    def evaluate(self, data, i):
        return data.row(i)[self.column] == self.value

    def requirement(self):
        return f"{self.column} = {_show(self.value)}"

    def found(self, data, i):
        return _show(data.row(i)[self.column])


@dataclass(frozen=True)
class IsNull(PredicateBinding):
    name: str
    column: str

    def columns(self):
        return (self.column,)

    def evaluate(self, data, i):
        return data.row(i)[self.column] is None

    def requirement(self):
        return f"{self.column} is empty"

    def found(self, data, i):
        return _show(data.row(i)[self.column])


@dataclass(frozen=True)
class BoolColumn(PredicateBinding):
    name: str
    column: str

    def columns(self):
        return (self.column,)

    def evaluate(self, data, i):
        return bool(data.row(i)[self.column])

    def requirement(self):
        return f"{self.column} is true"

    def found(self, data, i):
        return _show(data.row(i)[self.column])


@dataclass(frozen=True)
class SimilarPair(PredicateBinding):
    """Two rows agreeing on every nonsensitive column."""

    name: str
    nonsensitive: tuple
    sensitive: tuple = ()
    arity = 2

    def columns(self):
        return tuple(self.nonsensitive)

    def evaluate(self, data, i, j):
        a, b = data.row(i), data.row(j)
        return all(a[c] == b[c] for c in self.nonsensitive)

    def requirement(self):
        return "equal " + ", ".join(self.nonsensitive)

    def found(self, data, i, j):
        a, b = data.row(i), data.row(j)
        diff = [c for c in self.nonsensitive if a[c] != b[c]]
        if diff:
            return "rows differ on " + ", ".join(diff)
        flips = [f"{c} {_show(a[c])}/{_show(b[c])}" for c in self.sensitive if a[c] != b[c]]
        return "rows agree" + (" and differ only on " + ", ".join(flips) if flips else "")


@dataclass(frozen=True)
class SensitiveFlip(PredicateBinding):
    """True for a row that has a matched partner (equal nonsensitive columns)
    differing on a sensitive column and receiving a different outcome."""

    name: str
    sensitive: tuple
    nonsensitive: tuple
    outcome: str

    def columns(self):
        return tuple(self.sensitive) + tuple(self.nonsensitive) + (self.outcome,)

    def witnesses(self, data, i, index=None):
        row = data.row(i)
        index = index or PairIndex(data, self.nonsensitive)
        out = []
        for other in index.partners(row):
            if other is row:
                continue
            if other[self.outcome] != row[self.outcome] and any(other[c] != row[c] for c in self.sensitive):
                out.append(other)
        return out

    def evaluate(self, data, i, index=None):
        return bool(self.witnesses(data, i, index))

    def requirement(self):
        return (f"{self.outcome} unchanged for rows matching on {', '.join(self.nonsensitive)} "
                f"but differing on {', '.join(self.sensitive)}")

    def found(self, data, i):
        row = data.row(i)
        ws = self.witnesses(data, i)
        if not ws:
            return "no outcome flip"
        other = ws[0]
        diff = [c for c in self.sensitive if other[c] != row[c]]
        return (f"row {other[data.id_column]} differs on {', '.join(diff)} "
                f"with {self.outcome} {_show(other[self.outcome])} vs {_show(row[self.outcome])}")


def _show(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def default_bindings(system, cfg):
    """Predicate bindings for the ``compas`` or ``loan`` suite, keyed by predicate name."""
    c = cfg.column
    flip = SensitiveFlip("sensitive", cfg.sensitive, cfg.nonsensitive, cfg.outcome_column)
    if system == "compas":
        out = [
            Threshold("priors", c("priors"), ">", 0),
            Equals("recid", c("outcome"), 1),
            Threshold("assess", c("decile"), ">=", cfg.thresholds["decile_threshold"]),
            flip,
            Equals("appeal", c("appeal"), 1),
        ]
    elif system == "loan":
        out = [
            Threshold("credit", c("credit"), ">=", cfg.thresholds["credit_threshold"]),
            Threshold("income", c("income"), ">=", cfg.thresholds["income_threshold"]),
            Equals("applies", c("applied"), 1),
            Equals("approved", c("approved"), 1),
            SimilarPair("similar", cfg.nonsensitive, cfg.sensitive),
            Equals("appeal", c("appeal"), 1),
            flip,
        ]
    else:
        raise ConfigError(f"unknown system {system!r}")
    names = {n for n, _ in cfg.schema}
    for b in out:
        missing = [col for col in b.columns() if col not in names]
        if missing:
            raise BindingError(f"binding {b.name}: column(s) {', '.join(missing)} not in the schema")
    return {b.name: b for b in out}


def similar(data, i, j, cfg):
    """Whether rows ``i`` and ``j`` agree on every nonsensitive column."""
    if str(i) == str(j):
        raise ValueError("similar() compares two distinct rows")
    return SimilarPair("similar", cfg.nonsensitive).evaluate(data, str(i), str(j))
