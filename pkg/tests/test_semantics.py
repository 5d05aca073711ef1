import pytest
from hypothesis import given, settings

from strategies import kripke_models, prop_formulas, random_formula, seeded, traces
from tdlaudit.errors import (
    ArityError,
    ModelFormatError,
    ModelOverflowError,
    UnboundVariableError,
    UnknownPredicateError,
)
from tdlaudit.formula import Always, Eventually, Forb, Not, Oblig, Perm, Until, parse_formula
from tdlaudit.semantics import (
    Bounds,
    Counterexample,
    KripkeModel,
    TraceModel,
    ValidUpToBounds,
    check_validity,
    dump_model,
    enumerate_models,
    evaluate,
    evaluate_trace,
    label_trace,
    model_from_index,
    packed_chunks,
    parse_model,
)

F = parse_formula


def chain(*vals, ro=()):
    n = len(vals)
    return KripkeModel(n, {(i, i + 1) for i in range(n - 1)}, set(ro), vals)


def test_always_on_chain():
    m = chain({"p"}, {"p"})
    assert evaluate(m, 0, {}, F("[](p)"))


def test_deontic_dead_end():
    m = KripkeModel(1, set(), set(), [{"p"}])
    assert evaluate(m, 0, {}, F("O(p)"))
    assert not evaluate(m, 0, {}, F("P(p)"))


def test_until_on_three_state_chain():
    m = chain({"p"}, {"p"}, {"q"})
    assert evaluate(m, 0, {}, F("p U q"))
    m2 = KripkeModel(3, m.rt, (), [{"p"}, {"p"}, set()], signature={"q": 0})
    assert not evaluate(m2, 0, {}, F("p U q"))


def test_until_needs_left_operand_on_the_path():
    m = chain({"p"}, set(), {"q"})
    assert not evaluate(m, 0, {}, F("p U q"))
    assert evaluate(m, 2, {}, F("p U q"))


def test_until_on_branching_graph_uses_some_path():
    # s0 -> s1 (dead end without q), s0 -> s2 -> s3 (q)
    m = KripkeModel(4, {(0, 1), (0, 2), (2, 3)}, (), [{"p"}, {"p"}, {"p"}, {"q"}])
    assert evaluate(m, 0, {}, F("p U q"))
    assert not evaluate(m, 1, {}, F("p U q"))


def test_box_is_reflexive_transitive():
    m = chain(set(), {"p"}, {"p"})
    assert not evaluate(m, 0, {}, F("[]p"))
    assert evaluate(m, 1, {}, F("[]p"))
    assert evaluate(m, 0, {}, F("<>[]p"))


def test_cycle_reachability():
    m = KripkeModel(3, {(0, 1), (1, 2), (2, 0)}, (), [set(), set(), {"p"}])
    assert all(evaluate(m, s, {}, F("<>p")) for s in range(3))
    assert not any(evaluate(m, s, {}, F("[]p")) for s in range(3))


def test_quantifiers_over_domain():
    m = KripkeModel(1, (), (), [{("fair", ("a",))}], domain=("a", "b"))
    assert evaluate(m, 0, {}, F("exists x. fair(x)"))
    assert not evaluate(m, 0, {}, F("forall x. fair(x)"))
    assert evaluate(m, 0, {"x": "a"}, F("fair(x)"))


def test_evaluation_errors():
    m = KripkeModel(1, (), (), [{("fair", ("a",))}], domain=("a",))
    with pytest.raises(UnboundVariableError):
        evaluate(m, 0, {}, F("fair(x)"))
    with pytest.raises(UnknownPredicateError):
        evaluate(m, 0, {}, F("bias('a')"))
    with pytest.raises(ArityError):
        evaluate(m, 0, {}, F("fair('a', 'a')"))


def test_state_names():
    m = KripkeModel(2, {(0, 1)}, (), [set(), {"p"}], state_names=("start", "end"))
    assert evaluate(m, "start", {}, F("<>p"))
    with pytest.raises(KeyError):
        evaluate(m, "middle", {}, F("p"))


def test_trace_examples():
    t = TraceModel([{"p"}])
    assert evaluate_trace(t, 0, {}, F("<>(p)"))
    t = TraceModel([set(), set(), {"f"}, {"f"}])
    assert evaluate_trace(t, 0, {}, F("!f U f"))
    assert not evaluate_trace(t, 0, {}, F("[](f)"))


def test_until_at_last_state_reduces_to_right():
    t = TraceModel([{"p"}, {"p"}], signature={"q": 0})
    last = len(t) - 1
    f = F("p U q")
    assert evaluate_trace(t, last, {}, f) == evaluate_trace(t, last, {}, F("q"))


def test_trace_index_out_of_range():
    with pytest.raises(IndexError):
        evaluate_trace(TraceModel([{"p"}]), 1, {}, F("p"))


def test_trace_deontic_successors():
    t = TraceModel([set(), {"p"}, set()], ro={0: [1], 1: [2]})
    assert evaluate_trace(t, 0, {}, F("O(p)"))
    assert not evaluate_trace(t, 1, {}, F("P(p)"))
    assert evaluate_trace(t, 2, {}, F("O(p) & !P(p)"))
    # a deontic operator under a temporal one uses each reached state's own successors
    assert not evaluate_trace(t, 0, {}, F("[]O(p)"))
    assert evaluate_trace(t, 0, {}, F("<>O(!p)"))


@pytest.mark.parametrize(
    "bounds, count",
    [
        (Bounds(1, ("p",), min_states=1), 4),
        (Bounds(2, ("p",), min_states=2), 64),
        (Bounds(2, ("p",), trace_only=False, min_states=2), 1024),
    ],
)
def test_enumeration_counts(bounds, count):
    models = list(enumerate_models(bounds))
    assert len(models) == count == bounds.count()
    keys = {(m.n_states, m.rt, m.ro, m.valuation) for m in models}
    assert len(keys) == count


def test_trace_only_models_are_chains():
    assert all(m.is_chain() for m in enumerate_models(Bounds(3, ("p",))))


def test_overflow_guard():
    with pytest.raises(ModelOverflowError):
        Bounds(10, ("p", "q")).check()
    with pytest.raises(ModelOverflowError):
        next(enumerate_models(Bounds(7, ("p",))))


def test_validity_examples():
    b = Bounds(3, ("p", "q"))
    r = check_validity([], F("O(p) -> !P(!p)"), b)
    assert isinstance(r, ValidUpToBounds) and r.models_checked == b.count()
    r = check_validity([], F("p -> [](p)"), b)
    assert isinstance(r, Counterexample)
    assert not evaluate(r.model, r.state, {}, F("p -> [](p)"))
    assert r.model.n_states == 2
    assert check_validity([F("p -> q")], F("p -> q"), b)


def test_seriality_is_not_assumed():
    r = check_validity([], F("O(p) -> P(p)"), Bounds(2, ("p",)))
    assert isinstance(r, Counterexample)
    assert not r.model.ro_succ[r.state]


def test_validity_with_free_variables_enumerates_assignments():
    b = Bounds(1, (("f", ("a",)), ("f", ("b",))), domain=("a", "b"))
    r = check_validity([], F("f(x)"), b)
    assert isinstance(r, Counterexample) and "x" in r.assignment
    assert check_validity([F("forall y. f(y)")], F("f(x)"), b)


@pytest.mark.parametrize("text", ["O(p) -> P(p)", "[]p -> p", "p U q -> <>q", "P(p U q) -> P(<>q)", "<>[]p -> []<>p"])
def test_engines_agree(text):
    b = Bounds(3, ("p", "q"))
    fast = check_validity([], F(text), b, engine="bitset")
    slow = check_validity([], F(text), b, engine="scalar")
    assert type(fast) is type(slow)
    assert fast.models_checked == slow.models_checked
    if isinstance(fast, Counterexample):
        assert (fast.model, fast.state) == (slow.model, slow.state)


def test_engines_agree_at_initial_state():
    b = Bounds(3, ("p", "q"))
    for text in ("p -> <>q", "[](p -> q) -> (p U q)"):
        fast = check_validity([F("[](q -> p)")], F(text), b, at="initial", engine="bitset")
        slow = check_validity([F("[](q -> p)")], F(text), b, at="initial", engine="scalar")
        assert type(fast) is type(slow) and fast.models_checked == slow.models_checked


def test_packed_labels_match_scalar_sample():
    rng = seeded(5)
    b = Bounds(3, ("p", "q"))
    for _ in range(25):
        f = random_formula(rng, rng.randint(1, 3))
        for n in (1, 2, 3):
            for chunk in packed_chunks(b, n):
                labels = chunk.label(f)
                total = 1 << b.bits(n)
                for index in rng.sample(range(total), min(40, total)):
                    t = model_from_index(b, n, index).as_trace()
                    expect = label_trace(t, {}, f)
                    w, bit = divmod(index, 64)
                    got = [bool((int(chunk.broadcast(x)[w]) >> bit) & 1) for x in labels]
                    assert got == expect


def test_model_file_round_trip():
    text = """
    # two states
    states: s0 s1
    domain: a b
    pred: fair/1 p/0
    RT: s0 s1
    RO: s0 s1
    RO: s1 s1
    I: s0 fair(a)=true
    I: s1 p=true
    I: s1 fair(b)=false
    """
    m = parse_model(text)
    assert m.n_states == 2 and m.domain == ("a", "b")
    assert evaluate(m, "s0", {}, F("fair('a') & <>p & O(p)"))
    assert parse_model(dump_model(m)) == m


@pytest.mark.parametrize(
    "text",
    ["states: s0\nRT: s0 s9", "states: s0\nI: s0 p=maybe", "bogus line", "states: s0\nZZ: s0", "pred: f/x"],
)
def test_model_file_errors(text):
    with pytest.raises(ModelFormatError):
        parse_model(text)


# -- properties ----------------------------------------------------------------

@settings(max_examples=300)
@given(kripke_models(), prop_formulas())
def test_deontic_duality(m, f):
    for s in range(m.n_states):
        assert evaluate(m, s, {}, Perm(f)) == evaluate(m, s, {}, Not(Oblig(Not(f))))
        assert evaluate(m, s, {}, Forb(f)) == evaluate(m, s, {}, Oblig(Not(f)))


@settings(max_examples=300)
@given(traces(), prop_formulas())
def test_temporal_duality(t, f):
    for k in range(len(t)):
        assert evaluate_trace(t, k, {}, Always(f)) == evaluate_trace(t, k, {}, Not(Eventually(Not(f))))


@settings(max_examples=300)
@given(traces(), prop_formulas(max_leaves=6), prop_formulas(max_leaves=6))
def test_until_expansion(t, f, g):
    u = Until(f, g)
    n = len(t)
    for k in range(n):
        here = evaluate_trace(t, k, {}, u)
        if k == n - 1:
            assert here == evaluate_trace(t, k, {}, g)
        else:
            assert here == (evaluate_trace(t, k, {}, g)
                            or (evaluate_trace(t, k, {}, f) and evaluate_trace(t, k + 1, {}, u)))


@settings(max_examples=300)
@given(traces(), prop_formulas())
def test_trace_agrees_with_induced_model(t, f):
    m = t.induced_model()
    for k in range(len(t)):
        assert evaluate_trace(t, k, {}, f) == evaluate(m, k, {}, f)


@given(kripke_models(), prop_formulas())
def test_evaluation_is_pure(m, f):
    assert [evaluate(m, s, {}, f) for s in range(m.n_states)] == [evaluate(m, s, {}, f) for s in range(m.n_states)]
