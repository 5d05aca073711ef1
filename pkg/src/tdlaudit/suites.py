"""Property suites and their grounding into boolean circuits over dataset rows.

Grounding expands quantifiers over row ids (``forall`` to a conjunction,
``exists`` to a disjunction) and replaces each ground atom by its bound
rule's value on the row.  In ``reproduction`` mode deontic operators are
read as quantifier shapes: ``O`` closes its free variables universally,
``P`` existentially and ``Forb`` as a negated existential.  Temporal
operators collapse to the single snapshot a dataset provides.  ``strict``
mode refuses deontic operators instead.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from .dataset import PairIndex, SensitiveFlip, SimilarPair
from .errors import ArityError, BindingError, StrictModeError
from .formula import (
    Always,
    And,
    Atom,
    Const,
    Eventually,
    Exists,
    Forall,
    Forb,
    Iff,
    Implies,
    Not,
    Oblig,
    Or,
    Perm,
    Until,
    Var,
    _rebuild,
    children,
    free_variables,
    parse_formula,
    predicates,
    substitute,
)
from .semantics import KripkeModel, evaluate


@dataclass(frozen=True)
class SuiteProperty:
    id: str
    text: str
    summary: str

    @property
    def formula(self):
        return parse_formula(self.text)


_COMPAS = (
    SuiteProperty("a", "P(forall i. priors(i) -> assess(i))",
                  "assessing recidivism of people with prior offenses is permitted"),
    SuiteProperty("b", "forall i. recid(i) -> assess(i)",
                  "a recidivist label needs a decile score at or above the threshold"),
    SuiteProperty("c", "forall i. Forb(sensitive(i) & recid(i))",
                  "no recidivist label that flips with a sensitive attribute"),
    SuiteProperty("d", "forall i. !priors(i) -> Forb(recid(i))",
                  "no recidivist label without prior offenses"),
    SuiteProperty("e", "P(recid(i) -> appeal(i))",
                  "recidivists may appeal"),
)

_LOAN = (
    SuiteProperty("a", "O(forall i. applies(i) -> (approved(i) | !approved(i)))",
                  "every applicant gets a decision"),
    SuiteProperty("b", "forall i. (credit(i) | income(i)) -> approved(i)",
                  "credit or income above threshold leads to approval"),
    SuiteProperty("c", "O(forall i, j. similar(i, j) -> (approved(i) <-> approved(j)))",
                  "similar applicants get the same outcome"),
    SuiteProperty("d", "forall i. Forb(sensitive(i))",
                  "no decision flips with a sensitive attribute"),
    SuiteProperty("e", "P(!approved(i) -> appeal(i))",
                  "rejected applicants may appeal"),
)


def compas_suite():
    return {p.id: p.formula for p in _COMPAS}


def loan_suite():
    return {p.id: p.formula for p in _LOAN}


def suite_properties(system):
    if system == "compas":
        return _COMPAS
    if system == "loan":
        return _LOAN
    raise KeyError(f"unknown suite {system!r}")


# -- circuits ----------------------------------------------------------------

@dataclass(frozen=True)
class GConst:
    value: bool

    def eval(self, env=None):
        return self.value


@dataclass(frozen=True)
class GAtom:
    pred: str
    ids: tuple
    value: bool

    @property
    def key(self):
        return (self.pred, self.ids)

    def eval(self, env=None):
        return env[self.key] if env is not None and self.key in env else self.value


@dataclass(frozen=True)
class GNot:
    arg: object

    def eval(self, env=None):
        return not self.arg.eval(env)


@dataclass(frozen=True)
class GAnd:
    args: tuple

    def eval(self, env=None):
        return all(a.eval(env) for a in self.args)


@dataclass(frozen=True)
class GOr:
    args: tuple

    def eval(self, env=None):
        return any(a.eval(env) for a in self.args)


@dataclass(frozen=True)
class GImplies:
    left: object
    right: object

    def eval(self, env=None):
        return (not self.left.eval(env)) or self.right.eval(env)


@dataclass(frozen=True)
class GIff:
    left: object
    right: object

    def eval(self, env=None):
        return self.left.eval(env) == self.right.eval(env)


def circuit_atoms(g):
    """Distinct atoms of a circuit in first-occurrence order."""
    seen = {}
    stack = [g]
    while stack:
        node = stack.pop()
        if isinstance(node, GAtom):
            seen.setdefault(node.key, node)
        elif isinstance(node, GNot):
            stack.append(node.arg)
        elif isinstance(node, (GAnd, GOr)):
            stack.extend(reversed(node.args))
        elif isinstance(node, (GImplies, GIff)):
            stack.extend((node.right, node.left))
    return list(seen.values())


def render_circuit(g, top=True):
    if isinstance(g, GConst):
        return "true" if g.value else "false"
    if isinstance(g, GAtom):
        return f"{g.pred}({', '.join(g.ids)})"
    if isinstance(g, GNot):
        return "!" + render_circuit(g.arg, False)
    if isinstance(g, (GAnd, GOr)):
        if not g.args:
            return "true" if isinstance(g, GAnd) else "false"
        sep = " & " if isinstance(g, GAnd) else " | "
        body = sep.join(render_circuit(a, False) for a in g.args)
    else:
        sep = " -> " if isinstance(g, GImplies) else " <-> "
        body = render_circuit(g.left, False) + sep + render_circuit(g.right, False)
    return body if top else f"({body})"


def _and(parts):
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else GAnd(parts)


def _or(parts):
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else GOr(parts)


@dataclass(frozen=True)
class Clause:
    circuit: object
    rows: tuple
    text: str


@dataclass(frozen=True)
class GroundedProperty:
    property_id: str
    formula: object
    circuit: object
    clauses: tuple
    quantifiers: tuple      # (variable, instances expanded)
    rows_checked: int
    pairs_checked: int
    skipped_rows: tuple
    mode: str = "reproduction"
    bindings: dict = field(default_factory=dict, repr=False, compare=False)
    data: object = field(default=None, repr=False, compare=False)

    def evaluate(self, env=None):
        return self.circuit.eval(env)

    def atoms(self):
        return circuit_atoms(self.circuit)


# -- grounding ---------------------------------------------------------------

def _referenced_columns(f, bindings):
    cols = []
    for name in predicates(f):
        for c in bindings[name].columns():
            if c not in cols:
                cols.append(c)
    return cols


def _check_bindings(f, bindings):
    for name, arity in predicates(f).items():
        b = bindings.get(name)
        if b is None:
            raise BindingError(f"predicate {name!r} has no binding")
        if b.arity != arity:
            raise ArityError(f"{name} is bound with arity {b.arity}, used with {arity}")


def _is_pair_guard(f, var, bindings):
    """``similar(c, var) -> ...`` with ``similar`` an equality-on-columns binding."""
    if not isinstance(f, Implies) or not isinstance(f.left, Atom):
        return None
    b = bindings.get(f.left.pred)
    if not isinstance(b, SimilarPair) or len(f.left.args) != 2:
        return None
    first, second = f.left.args
    if isinstance(first, Const) and isinstance(second, Var) and second.name == var:
        return first.value
    return None


class _Grounder:
    def __init__(self, data, bindings, mode, pair_index):
        self.data = data
        self.bindings = bindings
        self.mode = mode
        self.ids = data.ids
        self.quantifiers = []
        self.pairs = 0
        self.pair_index = pair_index
        self._index = {}
        self._cache = {}
        for b in bindings.values():
            cols = getattr(b, "nonsensitive", None)
            if cols is not None:
                self._index[b.name] = PairIndex(data, cols)

    def atom(self, f):
        ids = tuple(a.value for a in f.args)
        key = (f.pred, ids)
        if key not in self._cache:
            b = self.bindings[f.pred]
            if isinstance(b, SensitiveFlip):
                value = b.evaluate(self.data, *ids, index=self._index[b.name])
            else:
                value = b.evaluate(self.data, *ids)
            self._cache[key] = GAtom(f.pred, ids, bool(value))
        return self._cache[key]

    def domain_for(self, var, body):
        partner = _is_pair_guard(body, var, self.bindings) if self.pair_index else None
        if partner is None:
            return self.ids
        b = self.bindings[body.left.pred]
        index = self._index[b.name]
        return tuple(r[self.data.id_column] for r in index.partners(self.data.row(partner)))

    def expand(self, var, body, universal):
        dom = self.domain_for(var, body)
        self.quantifiers.append((var, len(dom)))
        if _is_pair_guard(body, var, self.bindings) is not None:
            self.pairs += len(dom)
        parts = [self.ground(substitute(body, var, Const(d))) for d in dom]
        if not parts:
            return GConst(universal)
        return _and(parts) if universal else _or(parts)

    def close(self, f, universal):
        for v in sorted(free_variables(f), reverse=True):
            f = Forall(v, f) if universal else Exists(v, f)
        return f

    def ground(self, f):
        if isinstance(f, Atom):
            if not f.is_ground:
                raise ValueError(f"atom {f} still has variables")
            return self.atom(f)
        if isinstance(f, Not):
            return GNot(self.ground(f.arg))
        if isinstance(f, And):
            return GAnd((self.ground(f.left), self.ground(f.right)))
        if isinstance(f, Or):
            return GOr((self.ground(f.left), self.ground(f.right)))
        if isinstance(f, Implies):
            return GImplies(self.ground(f.left), self.ground(f.right))
        if isinstance(f, Iff):
            return GIff(self.ground(f.left), self.ground(f.right))
        if isinstance(f, (Always, Eventually)):
            return self.ground(f.arg)
        if isinstance(f, Until):
            return self.ground(f.right)
        if isinstance(f, (Forall, Exists)):
            return self.expand(f.var, f.body, isinstance(f, Forall))
        if isinstance(f, (Oblig, Perm, Forb)):
            if self.mode == "strict":
                raise StrictModeError(
                    f"deontic operator in {f} needs a deontic model; dataset audits refuse it in strict mode")
            if isinstance(f, Oblig):
                return self.ground(self.close(f.arg, True))
            inner = self.ground(self.close(f.arg, False))
            return inner if isinstance(f, Perm) else GNot(inner)
        raise TypeError(f"not a formula: {f!r}")


def _split(g):
    if isinstance(g, GAnd):
        for a in g.args:
            yield from _split(a)
    else:
        yield g


def ground_property(p, data, bindings, *, mode="reproduction", pair_index=True, property_id=""):
    """Ground formula ``p`` against ``data`` using ``bindings`` (predicate name to binding).

    Rows with an empty cell in any column the property reads are left out
    and listed in ``skipped_rows``.
    """
    if mode not in ("reproduction", "strict"):
        raise ValueError("mode must be 'reproduction' or 'strict'")
    if isinstance(p, str):
        p = parse_formula(p)
    _check_bindings(p, bindings)
    cols = _referenced_columns(p, bindings)
    complete = [r[data.id_column] for r in data.rows if all(r[c] is not None for c in cols)]
    skipped = tuple(i for i in data.ids if i not in set(complete))
    if skipped:
        warnings.warn(f"{len(skipped)} row(s) with missing values skipped", stacklevel=2)
    if skipped and complete:
        data = data.subset(complete)
    gr = _Grounder(data, bindings, mode, pair_index)
    closed = gr.close(deontic_closure(p), True)
    if not complete:
        gr.ids = ()
    circuit = gr.ground(closed)
    clauses = []
    for c in _split(circuit):
        rows = []
        for a in circuit_atoms(c):
            for rid in a.ids:
                if rid not in rows:
                    rows.append(rid)
        clauses.append(Clause(c, tuple(rows), render_circuit(c)))
    return GroundedProperty(
        property_id, p, circuit, tuple(clauses), tuple(gr.quantifiers),
        len(gr.ids), gr.pairs, skipped, mode, bindings, data,
    )


def ground_suite(system, data, bindings, **kw):
    return {sp.id: ground_property(sp.formula, data, bindings, property_id=sp.id, **kw)
            for sp in suite_properties(system)}


# -- the finite model a dataset induces ---------------------------------------

def deontic_closure(f, bound=frozenset()):
    """Bind the variables left free under each deontic operator.

    Variables not bound by an enclosing quantifier are closed under the
    operator: universally for ``O``, existentially for ``P`` and ``Forb``.
    This is the reading reproduction-mode grounding gives those operators.
    """
    if isinstance(f, Atom):
        return f
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, deontic_closure(f.body, bound | {f.var}))
    kids = [deontic_closure(k, bound) for k in children(f)]
    if isinstance(f, (Oblig, Perm, Forb)):
        body = kids[0]
        for v in sorted(free_variables(body) - bound, reverse=True):
            body = Forall(v, body) if isinstance(f, Oblig) else Exists(v, body)
        return type(f)(body)
    return _rebuild(f, kids)


def induced_model(data, bindings, preds=None):
    """One-state model over the row ids: every bound atom valued on the data,
    the state its own deontic alternative and its own temporal future."""
    ids = data.ids
    true = set()
    sig = {}
    for name, b in bindings.items():
        if preds is not None and name not in preds:
            continue
        sig[name] = b.arity
        index = PairIndex(data, b.nonsensitive) if isinstance(b, SensitiveFlip) else None
        for combo in itertools.product(ids, repeat=b.arity):
            value = b.evaluate(data, *combo, index=index) if index else b.evaluate(data, *combo)
            if value:
                true.add((name, combo))
    return KripkeModel(1, frozenset(), frozenset({(0, 0)}), (frozenset(true),), ids, sig)


def evaluate_on_dataset(p, data, bindings):
    """Direct semantic evaluation of a suite property on the induced model."""
    if isinstance(p, str):
        p = parse_formula(p)
    closed = deontic_closure(p)
    for v in sorted(free_variables(closed), reverse=True):
        closed = Forall(v, closed)
    m = induced_model(data, bindings, set(predicates(p)))
    return evaluate(m, 0, {}, closed)
