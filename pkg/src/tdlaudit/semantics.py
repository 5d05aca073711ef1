"""Finite models, the satisfaction relation, and bounded model enumeration.

Two evaluators live here.  ``evaluate`` works on an arbitrary finite
``KripkeModel`` by computing state sets (reachability closures and a
least fixpoint for until).  ``evaluate_trace`` works on a linear
``TraceModel`` by labelling the trace right to left.  The trace labeller
only uses ``&``, ``|`` and ``^`` on its truth values, so the same code
runs on plain booleans and on numpy words that pack 64 traces each; the
validity checker uses the packed form to sweep millions of traces at once.

Always/eventually quantify over the reflexive-transitive temporal image
(``j >= k`` on a trace).  Until holds at ``k`` when some reachable state
satisfies the right operand and every earlier state on the path,
including ``k``, satisfies the left one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from .errors import (
    ArityError,
    ModelFormatError,
    ModelOverflowError,
    UnboundVariableError,
    UnknownPredicateError,
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
    Iff,
    Implies,
    Not,
    Oblig,
    Or,
    Perm,
    Until,
    Var,
    atoms,
    free_variables,
)

MAX_MODELS = 2**40


def atom_key(a):
    """Normalize ``"p"``, a ground ``Atom`` or a ``(pred, args)`` pair to ``(pred, args)``."""
    if isinstance(a, str):
        return (a, ())
    if isinstance(a, Atom):
        if not a.is_ground:
            raise ValueError(f"atom {a} is not ground")
        return (a.pred, tuple(c.value for c in a.args))
    pred, args = a
    return (pred, tuple(str(x) for x in args))


def key_text(key):
    pred, args = key
    return pred if not args else f"{pred}({','.join(args)})"


def _signature_of(keys, extra=None):
    sig = dict(extra or {})
    for pred, args in keys:
        if sig.setdefault(pred, len(args)) != len(args):
            raise ValueError(f"predicate {pred!r} used with two arities")
    return sig


def _ground(f, sigma, signature):
    arity = signature.get(f.pred)
    if arity is None:
        raise UnknownPredicateError(f"unknown predicate {f.pred!r}")
    if arity != len(f.args):
        raise ArityError(f"{f.pred} has arity {arity}, applied to {len(f.args)} arguments")
    out = []
    for a in f.args:
        if isinstance(a, Var):
            if a.name not in sigma:
                raise UnboundVariableError(f"variable {a.name!r} is not assigned")
            out.append(str(sigma[a.name]))
        else:
            out.append(a.value)
    return (f.pred, tuple(out))


def _require_assigned(f, sigma):
    missing = free_variables(f) - set(sigma)
    if missing:
        raise UnboundVariableError(f"unassigned free variables: {', '.join(sorted(missing))}")


# -- models ------------------------------------------------------------------

@dataclass(frozen=True)
class KripkeModel:
    """States are ``0..n_states-1``; ``valuation[s]`` holds the ground atoms true at ``s``."""

    n_states: int
    rt: frozenset
    ro: frozenset
    valuation: tuple
    domain: tuple = ()
    signature: Mapping = None
    state_names: tuple = None

    def __post_init__(self):
        if self.n_states < 1:
            raise ValueError("a model needs at least one state")
        set_ = lambda name, value: object.__setattr__(self, name, value)
        set_("rt", frozenset((int(a), int(b)) for a, b in self.rt))
        set_("ro", frozenset((int(a), int(b)) for a, b in self.ro))
        for a, b in self.rt | self.ro:
            if not (0 <= a < self.n_states and 0 <= b < self.n_states):
                raise ValueError(f"edge ({a}, {b}) leaves the state set")
        val = tuple(frozenset(atom_key(x) for x in v) for v in self.valuation)
        if len(val) != self.n_states:
            raise ValueError("one valuation per state is required")
        set_("valuation", val)
        set_("domain", tuple(str(d) for d in self.domain))
        set_("signature", _signature_of(itertools.chain.from_iterable(val), self.signature))
        names = self.state_names or tuple(f"s{i}" for i in range(self.n_states))
        if len(names) != self.n_states or len(set(names)) != self.n_states:
            raise ValueError("state names must be unique, one per state")
        set_("state_names", tuple(names))

    @cached_property
    def rt_succ(self):
        out = [set() for _ in range(self.n_states)]
        for a, b in self.rt:
            out[a].add(b)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def ro_succ(self):
        out = [set() for _ in range(self.n_states)]
        for a, b in self.ro:
            out[a].add(b)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def reach(self):
        """Reflexive-transitive closure of the temporal relation, per state."""
        out = []
        for s in range(self.n_states):
            seen, todo = {s}, [s]
            while todo:
                for t in self.rt_succ[todo.pop()]:
                    if t not in seen:
                        seen.add(t)
                        todo.append(t)
            out.append(frozenset(seen))
        return tuple(out)

    def state_index(self, s):
        if isinstance(s, str):
            try:
                return self.state_names.index(s)
            except ValueError:
                raise KeyError(f"unknown state {s!r}") from None
        if not 0 <= s < self.n_states:
            raise IndexError(f"state {s} out of range")
        return s

    def is_chain(self):
        return self.rt == frozenset((i, i + 1) for i in range(self.n_states - 1))

    def as_trace(self):
        if not self.is_chain():
            raise ValueError("temporal relation is not the chain s0 -> s1 -> ...")
        return TraceModel(self.valuation, self.ro_succ, self.domain, self.signature, self.state_names)


@dataclass(frozen=True)
class TraceModel:
    """A finite linear trace; ``ro[k]`` is the set of deontic successors of state ``k``."""

    valuation: tuple
    ro: tuple = None
    domain: tuple = ()
    signature: Mapping = None
    state_names: tuple = None

    def __post_init__(self):
        set_ = lambda name, value: object.__setattr__(self, name, value)
        val = tuple(frozenset(atom_key(x) for x in v) for v in self.valuation)
        if not val:
            raise ValueError("a trace needs at least one state")
        n = len(val)
        ro = self.ro if self.ro is not None else [()] * n
        if isinstance(ro, Mapping):
            ro = [ro.get(k, ()) for k in range(n)]
        ro = tuple(frozenset(int(j) for j in succ) for succ in ro)
        if len(ro) != n or any(not 0 <= j < n for succ in ro for j in succ):
            raise ValueError("deontic successors must index into the trace")
        set_("valuation", val)
        set_("ro", ro)
        set_("domain", tuple(str(d) for d in self.domain))
        set_("signature", _signature_of(itertools.chain.from_iterable(val), self.signature))
        set_("state_names", tuple(self.state_names or (f"s{i}" for i in range(n))))

    def __len__(self):
        return len(self.valuation)

    def induced_model(self):
        n = len(self)
        return KripkeModel(
            n,
            frozenset((i, i + 1) for i in range(n - 1)),
            frozenset((k, j) for k in range(n) for j in self.ro[k]),
            self.valuation,
            self.domain,
            self.signature,
            self.state_names,
        )


# -- trace labelling ---------------------------------------------------------

class _ScalarTrace:
    top, bottom = True, False

    def __init__(self, t):
        self.n = len(t)
        self.signature = t.signature
        self.domain = t.domain
        self._val = t.valuation
        self._ro = t.ro

    def atom(self, key, k):
        return key in self._val[k]

    def ro(self, k, j):
        return j in self._ro[k]


def _label_trace(f, view, sigma):
    """Truth value of ``f`` at each trace position, in whatever algebra ``view`` uses."""
    n, top, bottom = view.n, view.top, view.bottom
    if isinstance(f, Atom):
        key = _ground(f, sigma, view.signature)
        return [view.atom(key, k) for k in range(n)]
    if isinstance(f, Not):
        return [x ^ top for x in _label_trace(f.arg, view, sigma)]
    if isinstance(f, (And, Or, Implies, Iff, Until)):
        left = _label_trace(f.left, view, sigma)
        right = _label_trace(f.right, view, sigma)
        if isinstance(f, And):
            return [a & b for a, b in zip(left, right)]
        if isinstance(f, Or):
            return [a | b for a, b in zip(left, right)]
        if isinstance(f, Implies):
            return [(a ^ top) | b for a, b in zip(left, right)]
        if isinstance(f, Iff):
            return [a ^ b ^ top for a, b in zip(left, right)]
        out, acc = [None] * n, bottom
        for k in reversed(range(n)):
            acc = right[k] | (left[k] & acc)
            out[k] = acc
        return out
    if isinstance(f, (Always, Eventually)):
        xs = _label_trace(f.arg, view, sigma)
        out = [None] * n
        if isinstance(f, Always):
            acc = top
            for k in reversed(range(n)):
                acc = acc & xs[k]
                out[k] = acc
        else:
            acc = bottom
            for k in reversed(range(n)):
                acc = acc | xs[k]
                out[k] = acc
        return out
    if isinstance(f, (Oblig, Perm, Forb)):
        xs = _label_trace(f.arg, view, sigma)
        out = []
        for k in range(n):
            if isinstance(f, Perm):
                acc = bottom
                for j in range(n):
                    acc = acc | (view.ro(k, j) & xs[j])
            else:
                acc = top
                for j in range(n):
                    hit = xs[j] ^ top if isinstance(f, Forb) else xs[j]
                    acc = acc & ((view.ro(k, j) ^ top) | hit)
            out.append(acc)
        return out
    if isinstance(f, (Forall, Exists)):
        universal = isinstance(f, Forall)
        out = [top if universal else bottom] * n
        for d in view.domain:
            body = _label_trace(f.body, view, {**sigma, f.var: d})
            out = [(a & b) if universal else (a | b) for a, b in zip(out, body)]
        return out
    raise TypeError(f"not a formula: {f!r}")


def evaluate_trace(t, k, sigma, f):
    """Finite-trace satisfaction of ``f`` at position ``k`` of trace ``t``."""
    if not 0 <= k < len(t):
        raise IndexError(f"position {k} outside trace of length {len(t)}")
    sigma = dict(sigma or {})
    _require_assigned(f, sigma)
    return bool(_label_trace(f, _ScalarTrace(t), sigma)[k])


def label_trace(t, sigma, f):
    """Truth value of ``f`` at every position of ``t``."""
    sigma = dict(sigma or {})
    _require_assigned(f, sigma)
    return [bool(x) for x in _label_trace(f, _ScalarTrace(t), sigma)]


# -- general models ----------------------------------------------------------

def _label_general(f, m, sigma):
    states = range(m.n_states)
    if isinstance(f, Atom):
        key = _ground(f, sigma, m.signature)
        return frozenset(s for s in states if key in m.valuation[s])
    if isinstance(f, Not):
        return frozenset(states) - _label_general(f.arg, m, sigma)
    if isinstance(f, (And, Or, Implies, Iff)):
        a = _label_general(f.left, m, sigma)
        b = _label_general(f.right, m, sigma)
        if isinstance(f, And):
            return a & b
        if isinstance(f, Or):
            return a | b
        if isinstance(f, Implies):
            return (frozenset(states) - a) | b
        return frozenset(s for s in states if (s in a) == (s in b))
    if isinstance(f, Until):
        a = _label_general(f.left, m, sigma)
        sat = set(_label_general(f.right, m, sigma))
        grew = True
        while grew:
            grew = False
            for s in a - sat:
                if m.rt_succ[s] & sat:
                    sat.add(s)
                    grew = True
        return frozenset(sat)
    if isinstance(f, Always):
        x = _label_general(f.arg, m, sigma)
        return frozenset(s for s in states if m.reach[s] <= x)
    if isinstance(f, Eventually):
        x = _label_general(f.arg, m, sigma)
        return frozenset(s for s in states if m.reach[s] & x)
    if isinstance(f, Oblig):
        x = _label_general(f.arg, m, sigma)
        return frozenset(s for s in states if m.ro_succ[s] <= x)
    if isinstance(f, Perm):
        x = _label_general(f.arg, m, sigma)
        return frozenset(s for s in states if m.ro_succ[s] & x)
    if isinstance(f, Forb):
        x = _label_general(f.arg, m, sigma)
        return frozenset(s for s in states if not m.ro_succ[s] & x)
    if isinstance(f, Forall):
        out = frozenset(states)
        for d in m.domain:
            out &= _label_general(f.body, m, {**sigma, f.var: d})
        return out
    if isinstance(f, Exists):
        out = frozenset()
        for d in m.domain:
            out |= _label_general(f.body, m, {**sigma, f.var: d})
        return out
    raise TypeError(f"not a formula: {f!r}")


def evaluate(m, s, sigma, f):
    """Satisfaction of ``f`` at state ``s`` (index or name) of a finite model."""
    s = m.state_index(s)
    sigma = dict(sigma or {})
    _require_assigned(f, sigma)
    return s in _label_general(f, m, sigma)


def satisfying_states(m, sigma, f):
    sigma = dict(sigma or {})
    _require_assigned(f, sigma)
    return _label_general(f, m, sigma)


# -- enumeration -------------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    """Model class for enumeration: every state count in ``min_states..max_states``,
    every valuation of ``atoms``, every deontic relation and, unless
    ``trace_only``, every temporal relation."""

    max_states: int = 3
    atoms: tuple = ()
    domain: tuple = ()
    trace_only: bool = True
    min_states: int = 1

    def __post_init__(self):
        if self.min_states < 1 or self.max_states < self.min_states:
            raise ValueError("need 1 <= min_states <= max_states")
        keys = []
        for a in self.atoms:
            k = atom_key(a)
            if k not in keys:
                keys.append(k)
        object.__setattr__(self, "atoms", tuple(keys))
        dom = self.domain
        if isinstance(dom, int):
            dom = tuple(f"d{i}" for i in range(dom))
        object.__setattr__(self, "domain", tuple(str(d) for d in dom))

    @property
    def signature(self):
        return _signature_of(self.atoms)

    def bits(self, n):
        return len(self.atoms) * n + n * n * (1 if self.trace_only else 2)

    def count(self):
        return sum(1 << self.bits(n) for n in range(self.min_states, self.max_states + 1))

    def check(self):
        total = self.count()
        if total > MAX_MODELS:
            raise ModelOverflowError(
                f"bounds describe {total} models (more than 2^40); "
                f"reduce max_states ({self.max_states}) or the atom count ({len(self.atoms)})"
            )
        return total


def model_from_index(bounds, n, index):
    """Decode model number ``index`` among the ``n``-state models of ``bounds``.

    Bit layout: atom ``i`` at state ``k`` is bit ``i*n + k``; deontic edge
    ``(k, j)`` follows at ``A*n + k*n + j``; temporal edges (non-trace mode)
    come last in the same layout.
    """
    a = len(bounds.atoms)
    val = [frozenset(bounds.atoms[i] for i in range(a) if index >> (i * n + k) & 1) for k in range(n)]
    base = a * n
    ro = frozenset((k, j) for k in range(n) for j in range(n) if index >> (base + k * n + j) & 1)
    if bounds.trace_only:
        rt = frozenset((i, i + 1) for i in range(n - 1))
    else:
        base += n * n
        rt = frozenset((k, j) for k in range(n) for j in range(n) if index >> (base + k * n + j) & 1)
    return KripkeModel(n, rt, ro, val, bounds.domain, bounds.signature)


def enumerate_models(bounds) -> Iterator[KripkeModel]:
    """Every model within ``bounds``, exactly once, ordered by state count then index."""
    bounds.check()
    for n in range(bounds.min_states, bounds.max_states + 1):
        for index in range(1 << bounds.bits(n)):
            yield model_from_index(bounds, n, index)


# -- validity ----------------------------------------------------------------

@dataclass(frozen=True)
class ValidUpToBounds:
    models_checked: int
    valid = True

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Counterexample:
    model: KripkeModel
    state: int
    assignment: Mapping = field(default_factory=dict)
    models_checked: int = 0
    valid = False

    def __bool__(self):
        return False

    def describe(self):
        return dump_model(self.model) + f"# falsified at {self.model.state_names[self.state]}\n"


def _assignments(formulas, domain):
    names = sorted(set().union(*(free_variables(f) for f in formulas)))
    if not names:
        return [{}]
    return [dict(zip(names, combo)) for combo in itertools.product(domain, repeat=len(names))]


def _infer_atoms(formulas):
    seen = []
    for f in formulas:
        for a in atoms(f):
            if a.is_ground and atom_key(a) not in seen:
                seen.append(atom_key(a))
    return tuple(seen)


def check_validity(premises, conclusion, bounds, *, at="all", engine="auto"):
    """Search ``bounds`` for a state where every premise holds and the conclusion fails.

    ``at`` is ``"all"`` (every state of every model) or ``"initial"`` (state 0).
    ``engine`` selects the set-based evaluator (``"scalar"``) or the
    word-parallel trace sweep (``"bitset"``, trace-only bounds);
    ``"auto"`` picks the bitset sweep whenever it applies.
    """
    premises = list(premises)
    if at not in ("all", "initial"):
        raise ValueError("at must be 'all' or 'initial'")
    if engine == "auto":
        engine = "bitset" if bounds.trace_only else "scalar"
    if engine == "bitset" and not bounds.trace_only:
        raise ValueError("the bitset engine only handles trace-only bounds")
    bounds.check()
    if engine == "bitset":
        return _check_bitset(premises, conclusion, bounds, at)
    if engine != "scalar":
        raise ValueError(f"unknown engine {engine!r}")
    sigmas = _assignments(premises + [conclusion], bounds.domain)
    for checked, m in enumerate(enumerate_models(bounds), start=1):
        states = range(m.n_states) if at == "all" else (0,)
        for sigma in sigmas:
            ok = frozenset(range(m.n_states))
            for p in premises:
                ok &= _label_general(p, m, sigma)
            bad = ok - _label_general(conclusion, m, sigma)
            for s in states:
                if s in bad:
                    return Counterexample(m, s, sigma, checked)
    return ValidUpToBounds(bounds.count())


# -- word-parallel sweep over all traces of one length ------------------------

_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_ZERO = np.uint64(0)
_LOW = tuple(np.uint64(sum(1 << i for i in range(64) if i >> b & 1)) for b in range(6))
CHUNK_WORDS = 1 << 15


class PackedTraces:
    """Traces ``first_word*64 ..`` of one length, bit ``m`` of a word standing for
    trace number ``m`` in the :func:`model_from_index` layout."""

    top, bottom = _ALL, _ZERO

    def __init__(self, bounds, n, first_word, n_words):
        self.n = n
        self.signature = bounds.signature
        self.domain = bounds.domain
        self._index = {k: i for i, k in enumerate(bounds.atoms)}
        self._a = len(bounds.atoms)
        self.first_word = first_word
        self.n_words = n_words
        total = 1 << bounds.bits(n)
        self.valid = np.full(n_words, _ALL)
        if total < 64:
            self.valid[0] = np.uint64((1 << total) - 1)
        self._words = np.arange(first_word, first_word + n_words, dtype=np.uint64)
        self._cache = {}

    def base(self, b):
        if b < 6:
            return _LOW[b]
        if b not in self._cache:
            bit = (self._words >> np.uint64(b - 6)) & np.uint64(1)
            self._cache[b] = np.where(bit.astype(bool), _ALL, _ZERO)
        return self._cache[b]

    def atom(self, key, k):
        i = self._index.get(key)
        return self.bottom if i is None else self.base(i * self.n + k)

    def ro(self, k, j):
        return self.base(self._a * self.n + k * self.n + j)

    def label(self, f, sigma=None):
        return _label_trace(f, self, dict(sigma or {}))

    def broadcast(self, x):
        return np.broadcast_to(np.asarray(x, dtype=np.uint64), (self.n_words,)) & self.valid


def packed_chunks(bounds, n, chunk_words=CHUNK_WORDS):
    total_words = max(1, (1 << bounds.bits(n)) // 64)
    for start in range(0, total_words, chunk_words):
        yield PackedTraces(bounds, n, start, min(chunk_words, total_words - start))


def first_set_bit(words):
    """Index of the lowest set bit across a word array, or ``None``."""
    nz = np.flatnonzero(words)
    if not len(nz):
        return None
    w = int(nz[0])
    word = int(words[w])
    return w * 64 + (word & -word).bit_length() - 1


def _check_bitset(premises, conclusion, bounds, at):
    sigmas = _assignments(premises + [conclusion], bounds.domain)
    checked = 0
    for n in range(bounds.min_states, bounds.max_states + 1):
        states = range(n) if at == "all" else (0,)
        for chunk in packed_chunks(bounds, n):
            bad_any = _ZERO
            for sigma in sigmas:
                ok = [chunk.top] * n
                for p in premises:
                    ok = [a & b for a, b in zip(ok, chunk.label(p, sigma))]
                concl = chunk.label(conclusion, sigma)
                for s in states:
                    bad_any = bad_any | (ok[s] & (concl[s] ^ chunk.top))
            hit = first_set_bit(chunk.broadcast(bad_any))
            if hit is not None:
                index = chunk.first_word * 64 + hit
                m = model_from_index(bounds, n, index)
                for sigma in sigmas:
                    ok = frozenset(range(n))
                    for p in premises:
                        ok &= frozenset(i for i, v in enumerate(label_trace(m.as_trace(), sigma, p)) if v)
                    concl = label_trace(m.as_trace(), sigma, conclusion)
                    for s in states:
                        if s in ok and not concl[s]:
                            return Counterexample(m, s, sigma, checked + index + 1)
                raise AssertionError("packed sweep and scalar re-check disagree")
        checked += 1 << bounds.bits(n)
    return ValidUpToBounds(checked)


# -- model files -------------------------------------------------------------

_TRUE = {"true": True, "1": True, "false": False, "0": False}


def _parse_ground_atom(text, lineno):
    text = text.strip()
    if "(" not in text:
        return (text, ())
    if not text.endswith(")"):
        raise ModelFormatError(f"line {lineno}: malformed atom {text!r}")
    pred, rest = text.split("(", 1)
    args = tuple(a.strip().strip("'\"") for a in rest[:-1].split(",") if a.strip())
    return (pred.strip(), args)


def parse_model(text):
    """Read the plain-text model format (see README) into a :class:`KripkeModel`."""
    states, domain, sig = [], [], {}
    rt, ro, val = [], [], []
    explicit_states = False

    def state(name, lineno):
        if name not in states:
            if explicit_states:
                raise ModelFormatError(f"line {lineno}: undeclared state {name!r}")
            states.append(name)
        return states.index(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ModelFormatError(f"line {lineno}: expected 'key: value'")
        key, rest = (part.strip() for part in line.split(":", 1))
        fields = rest.split()
        if key == "states":
            if len(set(fields)) != len(fields) or not fields:
                raise ModelFormatError(f"line {lineno}: states must be unique and non-empty")
            states[:] = fields
            explicit_states = True
        elif key == "domain":
            domain.extend(fields)
        elif key == "pred":
            for decl in fields:
                name, _, arity = decl.partition("/")
                if not arity.isdigit():
                    raise ModelFormatError(f"line {lineno}: predicate declaration must look like name/arity")
                sig[name] = int(arity)
        elif key == "trace":
            for a, b in zip(fields, fields[1:]):
                rt.append((a, b, lineno))
            for name in fields:
                state(name, lineno)
        elif key in ("RT", "RO"):
            if len(fields) != 2:
                raise ModelFormatError(f"line {lineno}: an edge line names exactly two states")
            (rt if key == "RT" else ro).append((fields[0], fields[1], lineno))
        elif key == "I":
            name, _, assignment = rest.partition(" ")
            lhs, eq, rhs = assignment.rpartition("=")
            if not eq or rhs.strip().lower() not in _TRUE:
                raise ModelFormatError(f"line {lineno}: valuation must look like 'I: s0 p(a)=true'")
            val.append((name.strip(), _parse_ground_atom(lhs, lineno), _TRUE[rhs.strip().lower()], lineno))
        else:
            raise ModelFormatError(f"line {lineno}: unknown key {key!r}")

    rt_edges = [(state(a, ln), state(b, ln)) for a, b, ln in rt]
    ro_edges = [(state(a, ln), state(b, ln)) for a, b, ln in ro]
    truth = {}
    for name, key, value, ln in val:
        s = state(name, ln)
        truth.setdefault(s, set())
        if value:
            truth[s].add(key)
        sig.setdefault(key[0], len(key[1]))
        if sig[key[0]] != len(key[1]):
            raise ModelFormatError(f"line {ln}: {key[0]} used with arity {len(key[1])}, declared {sig[key[0]]}")
    if not states:
        raise ModelFormatError("model has no states")
    valuation = tuple(frozenset(truth.get(s, ())) for s in range(len(states)))
    return KripkeModel(len(states), rt_edges, ro_edges, valuation, tuple(domain), sig, tuple(states))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def dump_model(m):
    names = m.state_names
    lines = ["states: " + " ".join(names)]
    if m.domain:
        lines.append("domain: " + " ".join(m.domain))
    if m.signature:
        lines.append("pred: " + " ".join(f"{p}/{a}" for p, a in sorted(m.signature.items())))
    lines += [f"RT: {names[a]} {names[b]}" for a, b in sorted(m.rt)]
    lines += [f"RO: {names[a]} {names[b]}" for a, b in sorted(m.ro)]
    for s in range(m.n_states):
        lines += [f"I: {names[s]} {key_text(k)}=true" for k in sorted(m.valuation[s])]
    return "\n".join(lines) + "\n"
