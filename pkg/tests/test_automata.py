import pytest
from hypothesis import given
from hypothesis import strategies as st

from typeforge.automata import (
    AutomatonSpec,
    Item,
    TapeContents,
    TapeRule,
    enumerate_accepted,
    run,
    run_forest,
    trace_run,
    validate,
    words_upto,
)
from typeforge.dsl import parse_automaton
from typeforge.fixtures import get, is_anbn, is_anbncn
from typeforge.terms import EPS, RewriteRule, Signature, parse_rule, parse_term


def tm_reference(tm: AutomatonSpec, word, fuel=10_000):
    """Direct deterministic simulation from a transition table."""
    table = {}
    for it in tm.epsilon:
        table[(it.source, it.rule.read)] = (it.rule.write, it.rule.move, it.target)
    cells = list(word)
    head, state = 0, tm.initial
    n = len(word)
    for _ in range(fuel):
        if head < 0 or head > n:
            # off the bounded tape there are no moves; the state decides
            return state in tm.accepting
        sym = cells[head] if head < len(cells) else tm.blank
        move = table.get((state, sym))
        if move is None:
            return state in tm.accepting
        write, step_, state = move
        if head == len(cells):
            cells.append(tm.blank)
        cells[head] = write
        head += step_
    raise RuntimeError("reference ran out of fuel")


TM = get("tm-anbn").value


def test_turing_machine_enumeration():
    out = enumerate_accepted(TM, 6)
    assert out.accepted == [(), tuple("ab"), tuple("aabb"), tuple("aaabbb")]
    assert out.exhausted == []


@pytest.mark.parametrize("w, verdict", [("aaaabbbb", "accept"), ("aaaababb", "reject"), ("aaabbbb", "reject")])
def test_turing_machine_verdicts(w, verdict):
    assert run(TM, w).kind == verdict


def test_turing_machine_agrees_with_reference_and_predicate():
    for w in words_upto(("a", "b"), 8):
        got = run(TM, w).accepted
        assert got == tm_reference(TM, w) == is_anbn(w), w


def test_turing_machine_is_deterministic():
    assert validate(TM).deterministic
    path = trace_run(TM, "aabb")
    assert path[-1].state in TM.accepting


def test_fuel_exhaustion_is_reported():
    out = run(TM, "aaaabbbb", fuel=5)
    assert out.exhausted and not out.accepted


def test_linear_bound_hangs_past_the_end_marker():
    tm = AutomatonSpec(
        states=("q", "f"),
        initial="q",
        accepting={"f"},
        alphabet=("a",),
        storage="tape",
        tape_bound="linear",
        preload=True,
        epsilon=(
            Item("q", TapeRule("a", "a", 1), "q"),
            Item("q", TapeRule("♭", "♭", 1), "q"),
        ),
    )
    out = run(tm, "aa")
    assert out.kind == "reject"
    # the unbounded version never stops on its own
    wide = AutomatonSpec(**{**tm.__dict__, "tape_bound": "unbounded", "meta": {}})
    assert run(wide, "aa", fuel=200).exhausted


def test_left_of_tape_has_no_moves():
    tm = AutomatonSpec(
        states=("q", "r"),
        initial="q",
        accepting={"r"},
        alphabet=("a",),
        storage="tape",
        tape_bound="linear",
        preload=True,
        epsilon=(Item("q", TapeRule("a", "a", -1), "r"), Item("r", TapeRule("a", "a", 1), "q")),
    )
    # after moving to -1 the machine is stuck in r; accepted with input consumed
    assert run(tm, "a").accepted


def test_acceptance_needs_no_epsilon_successor():
    spec = AutomatonSpec(
        states=("q", "r"),
        initial="q",
        accepting={"q"},
        alphabet=("a",),
        storage="tree",
        signature=Signature({"g": 1}),
        epsilon=(Item("q", parse_rule("eps -> g eps"), "r"),),
    )
    assert not run(spec, "").accepted


def test_tree_automaton_against_predicate():
    ta = get("anbncn-ta").value
    for w in words_upto(("a", "b", "c"), 7):
        assert run(ta, w).accepted == is_anbncn(w), w


def test_anbncn_ta_is_nondeterministic():
    v = validate(get("anbncn-ta").value)
    assert not v.deterministic
    assert v.conflicts


def test_restricted_ta_point():
    ta = get("restricted-ta").value
    v = validate(ta)
    assert v.ok, v.diagnostics
    assert v.point.states == "stateless"
    assert v.deterministic


@pytest.mark.parametrize("name", ["tm-anbn", "anbncn-ta", "restricted-ta"])
def test_fixture_examples(name):
    f = get(name)
    for w in f.positive:
        assert run(f.value, w).accepted, w
    for w in f.negative:
        assert not run(f.value, w).accepted, w


def test_declared_feature_violation_is_diagnosed():
    text = """\
storage tree
features deterministic
states q0
initial q0
accepting q0
alphabet a
tree-alphabet g/1
delta: on a in q0 rule x -> g x goto q0
delta: on a in q0 rule g x -> x goto q0
"""
    v = validate(parse_automaton(text))
    assert not v.ok
    assert v.conflicts


def test_pushdown_storage_ranks():
    with pytest.raises(ValueError):
        AutomatonSpec(states=("q",), initial="q", accepting={"q"}, alphabet=("a",),
                      storage="pushdown", signature=Signature({"p": 2}))


def test_forest_run():
    text = """\
storage tree
states q
initial q
accepting q
alphabet leaf/0 pair/2
tree-alphabet S/1
delta: on leaf in q children - rule - -> S eps goto q
delta: on pair in q children q,q rule S x1, S x2 -> S S x1 goto q
"""
    spec = parse_automaton(text)
    sig = Signature({"leaf": 0, "pair": 2})
    assert run_forest(spec, parse_term("pair(leaf, pair(leaf, leaf))", sig)).accepted
    assert run_forest(spec, parse_term("leaf", sig)).accepted
    strict = parse_automaton(text.replace("rule S x1, S x2 -> S S x1", "rule S eps, S x2 -> S S x2"))
    assert run_forest(strict, parse_term("pair(leaf, pair(leaf, leaf))", sig)).accepted
    assert not run_forest(strict, parse_term("pair(pair(leaf, leaf), leaf)", sig)).accepted


@given(st.lists(st.sampled_from("ab"), max_size=10))
def test_run_is_deterministic_in_verdict(w):
    assert run(TM, w).kind == run(TM, w).kind
