"""Temporal deontic formulas: abstract syntax, text grammar, and structural helpers.

Surface grammar (loosest binding first)::

    formula  := ("forall" | "exists") NAME ("," NAME)* "." formula | iff
    iff      := implies ("<->" implies)?
    implies  := or ("->" implies)?                 right associative
    or       := and ("|" and)*
    and      := until ("&" until)*
    until    := unary ("U" until)?                 right associative
    unary    := "!" unary | "[]" unary | "<>" unary
              | ("O" | "P" | "Forb") "(" formula ")" | quantified | primary
    primary  := "(" formula ")" | NAME ("(" term ("," term)* ")")?
    term     := NAME (variable) | 'quoted' or "quoted" or number (constant)

``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import FormulaSyntaxError

RESERVED = frozenset({"O", "P", "Forb", "U", "forall", "exists"})

_NAME_RE = re.compile(r"[^\W\d]\w*")
_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?")


def _check_name(name, what):
    if not isinstance(name, str) or not _NAME_RE.fullmatch(name) or name in RESERVED:
        raise ValueError(f"invalid {what} name: {name!r}")


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        _check_name(self.name, "variable")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str):
            object.__setattr__(self, "value", str(self.value))

    def __str__(self):
        if _NUMBER_RE.fullmatch(self.value):
            return self.value
        if "'" in self.value:
            return '"' + self.value + '"'
        return "'" + self.value + "'"


Term = Union[Var, Const]


class Formula:
    """Base of the formula tree. Operators build connectives: ``&``, ``|``, ``~``, ``>>``."""

    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)

    def __str__(self):
        return render_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple = ()

    def __post_init__(self):
        _check_name(self.pred, "predicate")
        args = tuple(self.args)
        for a in args:
            if not isinstance(a, (Var, Const)):
                raise TypeError(f"atom argument must be Var or Const, got {a!r}")
        object.__setattr__(self, "args", args)

    @property
    def arity(self):
        return len(self.args)

    @property
    def is_ground(self):
        return all(isinstance(a, Const) for a in self.args)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Oblig(Formula):
    arg: Formula


@dataclass(frozen=True)
class Perm(Formula):
    arg: Formula


@dataclass(frozen=True)
class Forb(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_name(self.var, "variable")


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_name(self.var, "variable")


UNARY = (Not, Oblig, Perm, Forb, Always, Eventually)
BINARY = (And, Or, Implies, Iff, Until)
QUANTIFIERS = (Forall, Exists)
DEONTIC = (Oblig, Perm, Forb)
TEMPORAL = (Always, Eventually, Until)


@dataclass(frozen=True)
class PredicateSymbol:
    name: str
    arity: int

    def __post_init__(self):
        _check_name(self.name, "predicate")
        if self.arity < 0:
            raise ValueError("arity must be non-negative")

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} arguments, got {len(args)}")
        return atom(self.name, *args)


def atom(pred, *args):
    """Build an atom; plain strings become variables, use ``Const`` for constants."""
    return Atom(pred, tuple(a if isinstance(a, (Var, Const)) else Var(a) for a in args))


def children(f):
    if isinstance(f, Atom):
        return ()
    if isinstance(f, UNARY):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f) -> Iterator[Formula]:
    """Pre-order traversal, the root first."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def depth(f):
    kids = children(f)
    return 0 if not kids else 1 + max(depth(k) for k in kids)


def size(f):
    return sum(1 for _ in subformulas(f))


def atoms(f):
    """Atom nodes of ``f`` in first-occurrence order, without duplicates."""
    seen = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            seen.setdefault(g, None)
    return tuple(seen)


def predicates(f):
    """Map each predicate name used in ``f`` to its arity; mixed arities are an error."""
    sig = {}
    for a in atoms(f):
        if sig.setdefault(a.pred, a.arity) != a.arity:
            raise ValueError(f"predicate {a.pred!r} used with arities {sig[a.pred]} and {a.arity}")
    return sig


def free_variables(f) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(a.name for a in f.args if isinstance(a, Var))
    if isinstance(f, QUANTIFIERS):
        return free_variables(f.body) - {f.var}
    out = frozenset()
    for k in children(f):
        out |= free_variables(k)
    return out


def is_closed(f):
    return not free_variables(f)


def _rebuild(f, kids):
    if isinstance(f, UNARY):
        return type(f)(kids[0])
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, kids[0])
    return f


def substitute(f, v, c):
    """Replace free occurrences of variable ``v`` by the constant ``c``."""
    if not isinstance(c, Const):
        c = Const(c)
    if isinstance(f, Atom):
        if not any(isinstance(a, Var) and a.name == v for a in f.args):
            return f
        return Atom(f.pred, tuple(c if isinstance(a, Var) and a.name == v else a for a in f.args))
    if isinstance(f, QUANTIFIERS) and f.var == v:
        return f
    return _rebuild(f, [substitute(k, v, c) for k in children(f)])


def normalize_duals(f):
    """Rewrite P and Forb through O: ``P(p) = !O(!p)``, ``Forb(p) = O(!p)``."""
    if isinstance(f, Atom):
        return f
    kids = [normalize_duals(k) for k in children(f)]
    if isinstance(f, Perm):
        return Not(Oblig(Not(kids[0])))
    if isinstance(f, Forb):
        return Oblig(Not(kids[0]))
    return _rebuild(f, kids)


# -- printer -----------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Until: 5}
_INFIX = {Iff: "<->", Implies: "->", Or: "|", And: "&", Until: "U"}
# minimum precedence required of (left, right) operands
_OPERAND_PREC = {Iff: (2, 2), Implies: (3, 2), Or: (3, 4), And: (4, 5), Until: (6, 5)}
_PREFIX = {Not: "!", Always: "[]", Eventually: "<>"}
_CALL = {Oblig: "O", Perm: "P", Forb: "Forb"}


def _render(f, min_prec):
    if isinstance(f, Atom):
        text = f.pred if not f.args else f"{f.pred}({', '.join(str(a) for a in f.args)})"
        prec = 7
    elif isinstance(f, tuple(_PREFIX)):
        text = _PREFIX[type(f)] + _render(f.arg, 6)
        prec = 6
    elif isinstance(f, tuple(_CALL)):
        text = f"{_CALL[type(f)]}({_render(f.arg, 0)})"
        prec = 7
    elif isinstance(f, tuple(_PREC)):
        lp, rp = _OPERAND_PREC[type(f)]
        text = f"{_render(f.left, lp)} {_INFIX[type(f)]} {_render(f.right, rp)}"
        prec = _PREC[type(f)]
    elif isinstance(f, QUANTIFIERS):
        kw = "forall" if isinstance(f, Forall) else "exists"
        text = f"{kw} {f.var}. {_render(f.body, 0)}"
        prec = 0
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if prec < min_prec else text


def render_formula(f):
    return _render(f, 0)


# -- tokenizer ---------------------------------------------------------------

_TOKENS = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("IFF", r"<->|↔"),
    ("IMPLIES", r"->|→"),
    ("BOX", r"\[\]|□"),
    ("DIAMOND", r"<>|◇|◊"),
    ("NOT", r"!|¬"),
    ("AND", r"&|∧"),
    ("OR", r"\||∨"),
    ("FORALL_SYM", r"∀"),
    ("EXISTS_SYM", r"∃"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("DOT", r"\."),
    ("STRING", r"'[^'\n]*'|\"[^\"\n]*\""),
    ("NUMBER", _NUMBER_RE.pattern),
    ("NAME", _NAME_RE.pattern),
]
_MASTER = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _TOKENS))

_SHOW = {
    "IFF": "'<->'", "IMPLIES": "'->'", "BOX": "'[]'", "DIAMOND": "'<>'", "NOT": "'!'",
    "AND": "'&'", "OR": "'|'", "LPAREN": "'('", "RPAREN": "')'", "COMMA": "','",
    "DOT": "'.'", "UNTIL": "'U'", "NAME": "identifier", "TERM": "term",
    "EOF": "end of input",
}
_STARTERS = {"'('", "identifier", "'!'", "'[]'", "'<>'", "'O'", "'P'", "'Forb'",
             "'forall'", "'exists'"}
_CONTINUERS = {"'&'", "'|'", "'->'", "'<->'", "'U'"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text):
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _MASTER.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("WS", "COMMENT"):
            if kind == "NAME" and m.group() == "U":
                kind = "UNTIL"
            yield _Tok(kind, m.group(), line, pos - line_start + 1)
        for i in range(pos, m.end()):
            if text[i] == "\n":
                line, line_start = line + 1, i + 1
        pos = m.end()
    yield _Tok("EOF", "", line, pos - line_start + 1)


class _Parser:
    def __init__(self, text):
        self.toks = list(_tokenize(text))
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise FormulaSyntaxError(f"unexpected {found}", t.line, t.col, expected)

    def expect(self, kind, extra=()):
        if self.tok.kind != kind:
            self.fail({_SHOW[kind], *extra})
        return self.advance()

    def is_keyword(self, word):
        return self.tok.kind == "NAME" and self.tok.text == word

    def parse(self):
        f = self.formula()
        if self.tok.kind != "EOF":
            self.fail(_CONTINUERS | {"end of input"})
        return f

    def formula(self):
        if self.is_keyword("forall") or self.is_keyword("exists") or self.tok.kind in ("FORALL_SYM", "EXISTS_SYM"):
            return self.quantified()
        return self.iff()

    def quantified(self):
        t = self.advance()
        universal = t.text in ("forall", "∀")
        names = [self.var_name()]
        while self.tok.kind == "COMMA":
            self.advance()
            names.append(self.var_name())
        self.expect("DOT", {"','"})
        body = self.formula()
        for name in reversed(names):
            body = Forall(name, body) if universal else Exists(name, body)
        return body

    def var_name(self):
        t = self.expect("NAME")
        if t.text in RESERVED:
            raise FormulaSyntaxError(f"reserved word {t.text!r} used as a variable", t.line, t.col, {"identifier"})
        return t.text

    def iff(self):
        left = self.implies()
        if self.tok.kind == "IFF":
            self.advance()
            return Iff(left, self.implies())
        return left

    def implies(self):
        left = self.disjunction()
        if self.tok.kind == "IMPLIES":
            self.advance()
            return Implies(left, self.implies())
        return left

    def _at_quantifier(self):
        return self.is_keyword("forall") or self.is_keyword("exists") or self.tok.kind in ("FORALL_SYM", "EXISTS_SYM")

    def disjunction(self):
        f = self.conjunction()
        while self.tok.kind == "OR":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.until()
        while self.tok.kind == "AND":
            self.advance()
            f = And(f, self.until())
        return f

    def until(self):
        left = self.unary()
        if self.tok.kind == "UNTIL":
            self.advance()
            return Until(left, self.until())
        return left

    def unary(self):
        kind = self.tok.kind
        if kind == "NOT":
            self.advance()
            return Not(self.unary())
        if kind == "BOX":
            self.advance()
            return Always(self.unary())
        if kind == "DIAMOND":
            self.advance()
            return Eventually(self.unary())
        if self._at_quantifier():
            return self.quantified()
        if kind == "NAME" and self.tok.text in ("O", "P", "Forb"):
            op = {"O": Oblig, "P": Perm, "Forb": Forb}[self.advance().text]
            self.expect("LPAREN")
            body = self.formula()
            self.expect("RPAREN", _CONTINUERS)
            return op(body)
        return self.primary()

    def primary(self):
        kind = self.tok.kind
        if kind == "LPAREN":
            self.advance()
            f = self.formula()
            self.expect("RPAREN", _CONTINUERS)
            return f
        if kind == "NAME" and self.tok.text not in RESERVED:
            name = self.advance().text
            if self.tok.kind != "LPAREN":
                return Atom(name)
            self.advance()
            args = [self.term()]
            while self.tok.kind == "COMMA":
                self.advance()
                args.append(self.term())
            self.expect("RPAREN", {"','"})
            return Atom(name, tuple(args))
        self.fail(_STARTERS)

    def term(self):
        t = self.tok
        if t.kind == "NAME" and t.text not in RESERVED:
            self.advance()
            return Var(t.text)
        if t.kind == "STRING":
            self.advance()
            return Const(t.text[1:-1])
        if t.kind == "NUMBER":
            self.advance()
            return Const(t.text)
        self.fail({"identifier", "quoted constant", "number"})


def parse_formula(text):
    if not text or not text.strip():
        raise FormulaSyntaxError("empty formula", 1, 1, _STARTERS)
    return _Parser(text).parse()


def parse_formula_lines(text) -> list:
    """Parse a file body holding one formula per line; blank and ``#`` lines are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            out.append(parse_formula(line))
        except FormulaSyntaxError as e:
            raise FormulaSyntaxError(e.message, lineno, e.column, e.expected) from None
    return out


def load_formula_file(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return parse_formula_lines(fh.read())
