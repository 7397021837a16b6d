import itertools
import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from typeforge.dsl import parse_expr, parse_program
from typeforge.fixtures import catalog, get, is_anbncn, is_u_s_u
from typeforge.randomgen import random_fluent_program, random_rudimentary_program
from typeforge.terms import EPS, apply_substitution, match_all, parse_term
from typeforge.typesys import (
    Call,
    Checker,
    FunctionDef,
    TypeDecl,
    TypeProgram,
    check_word,
    classify_program,
    erasure_lint,
    expression_to_word,
    is_member,
    program_expression,
    resolve_typeof,
    substitute_pexpr,
    typecheck,
    word_to_expression,
)


class Ambiguous(Exception):
    pass


def reference_types(p: TypeProgram, e, one_type: bool) -> set:
    """Plain recursive set semantics: no memo, no worklist, no budget."""
    if not isinstance(e, Call):
        return {e}
    arg_sets = [reference_types(p, a, one_type) for a in e.args]
    out = set()
    for combo in itertools.product(*arg_sets):
        for d in p.overloads(e.name):
            s = match_all(d.params, combo)
            if s is None:
                continue
            if d.typeof:
                out |= reference_types(p, substitute_pexpr(d.ret, s), one_type)
            else:
                out.add(apply_substitution(d.ret, s))
    if one_type and len(out) > 1:
        raise Ambiguous(e.name)
    return out


def reference_verdict(p: TypeProgram, w) -> bool:
    try:
        types = reference_types(p, program_expression(p, w), p.mode == "one-type")
    except Ambiguous:
        return False
    if p.goal is not None:
        return p.goal in types
    if p.mode == "eventually-one-type":
        return len(types) == 1
    return bool(types)


PROGRAMS = [n for n, f in catalog().items() if f.kind == "program"]


@pytest.mark.parametrize("name", PROGRAMS)
def test_fixture_examples(name):
    f = get(name)
    for w in f.positive:
        assert is_member(check_word(f.value, w)), w
    for w in f.negative:
        assert not is_member(check_word(f.value, w)), w


@pytest.mark.parametrize("name", PROGRAMS)
def test_classification_is_at_most_declared(name):
    f = get(name)
    assert classify_program(f.value) <= f.point


def test_deep_anbncn_listing_chains():
    p = get("anbncn-deep").value
    good, bad = p.exprs
    assert typecheck(p, good).kind == "typed"
    r = typecheck(p, bad)
    assert r.kind == "ill-typed"
    assert r.at is not None


@pytest.mark.parametrize("name", ["anbncn-deep", "anbncn-nonlinear"])
def test_anbncn_programs_against_predicate(name):
    p = get(name).value
    for w in itertools.chain.from_iterable(itertools.product("abc", repeat=n) for n in range(7)):
        assert is_member(check_word(p, w)) == is_anbncn(w), w


def test_ww_against_predicate():
    p = get("ww").value
    for n in range(6):
        for w in itertools.product("abs", repeat=n):
            assert is_member(check_word(p, w)) == is_u_s_u(w), w


def test_example_pp_language_matches_reference():
    p = get("example-pp").value
    for n in range(7):
        for w in itertools.product("abc", repeat=n):
            assert is_member(check_word(p, w)) == reference_verdict(p, w), w


OVERLOADED = """\
type A(x)
type B(x)
type C(x)
fn f : eps -> A eps
fn f : eps -> B eps
fn g : A x -> C eps
fn g : B x -> C eps
fn h : A x -> A eps
fn h : B x -> B eps
"""


def test_overloading_modes():
    p = parse_program(OVERLOADED)
    fg = parse_expr("eps.f.g", p.signature, p.function_names)
    fh = parse_expr("eps.f.h", p.signature, p.function_names)
    assert typecheck(p, fg, "one-type").kind == "error-type"
    assert typecheck(p, fg, "eventually-one-type").kind == "typed"
    assert typecheck(p, fg, "eventually-one-type").type is parse_term("C eps")
    assert typecheck(p, fh, "eventually-one-type").kind == "ambiguous"
    r = typecheck(p, fh, "multiple-types")
    assert r.kind == "typed-set"
    assert r.types == {parse_term("A eps"), parse_term("B eps")}


def test_ambiguity_flag():
    p = parse_program(OVERLOADED)
    r = typecheck(p, parse_expr("eps.f.h", p.signature, p.function_names), "eventually-one-type")
    assert is_member(r) is True
    assert is_member(r, assume_unambiguous=True) is False


def test_unknown_function_is_ill_typed():
    p = parse_program(OVERLOADED)
    assert typecheck(p, Call("zzz", (EPS,))).kind == "ill-typed"


def test_non_terminating_typeof_runs_out_of_fuel():
    p = parse_program("""\
type G(x)
fn a : x -> typeof phi(x)
aux phi : x -> typeof phi(G x)
""")
    r = check_word(p, ("a",), fuel=500)
    assert r.exhausted
    assert is_member(r) is None


def test_self_dependent_call_adds_nothing():
    p = parse_program("""\
type G(x)
fn a : x -> typeof phi(x)
aux phi : x -> typeof phi(x)
""")
    assert check_word(p, ("a",)).kind == "ill-typed"


def test_resolve_typeof_grounds_the_expression():
    p = get("ww").value
    d = [d for d in p.overloads("$") if d.typeof][0]
    # $ has no overload on eps, so the grounded pseudo-expression is empty
    assert resolve_typeof(d.ret, {"T": EPS}, p).kind == "ill-typed"
    e = [d for d in p.overloads("$") if d.typeof and d.params[0].head == "S"][0]
    assert resolve_typeof(e.ret, {"T": parse_term("A B eps")}, p).type is parse_term("B A eps")
    with pytest.raises(ValueError):
        resolve_typeof(d.ret, {}, p)


def test_word_expression_round_trip():
    e = word_to_expression(("a", "b"), ("begin",), ("end",))
    assert expression_to_word(e, ("begin",), ("end",)) == ("a", "b")


def test_s2_blowup_is_fast():
    p = get("s2-blowup").value
    t0 = time.perf_counter()
    r = typecheck(p, p.exprs[0])
    assert time.perf_counter() - t0 < 1.0
    assert r.kind == "typed"


def test_duplicate_types_rejected():
    with pytest.raises(ValueError):
        TypeProgram((TypeDecl("A", 1), TypeDecl("A", 1)), ())


def test_arity_mismatch_rejected():
    with pytest.raises(ValueError):
        TypeProgram((), (FunctionDef("f", (EPS,), EPS), FunctionDef("f", (EPS, EPS), EPS)))


def test_erasure_lint_flags_pattern_overloads():
    p = parse_program(OVERLOADED)
    assert any(m.startswith("f:") for m in erasure_lint(p))


@given(st.integers(0, 10_000))
def test_checker_matches_reference_on_random_fluent(seed):
    p = random_fluent_program(seed)
    for w in itertools.chain.from_iterable(itertools.product("ab", repeat=n) for n in range(6)):
        assert is_member(check_word(p, w)) == reference_verdict(p, w), (seed, w)


@given(st.integers(0, 10_000), st.sampled_from(["one-type", "eventually-one-type", "multiple-types"]))
def test_checker_matches_reference_on_random_rudimentary(seed, mode):
    p = random_rudimentary_program(seed).with_mode(mode)
    for w in itertools.chain.from_iterable(itertools.product("ab", repeat=n) for n in range(5)):
        assert is_member(check_word(p, w)) == reference_verdict(p, w), (seed, mode, w)


@given(st.integers(0, 10_000))
def test_multiple_types_sets_match_reference(seed):
    p = random_rudimentary_program(seed).with_mode("multiple-types")
    for w in itertools.chain.from_iterable(itertools.product("ab", repeat=n) for n in range(4)):
        r = check_word(p, w)
        expected = reference_types(p, program_expression(p, w), False)
        assert set(r.types) == expected if expected else r.kind == "ill-typed"


def test_checker_memo_survives_reuse():
    p = get("dyck-stack").value
    c = Checker(p)
    e = parse_expr("eps.push.pop", p.signature, p.function_names)
    assert c.check(e).kind == "typed"
    again = parse_expr("eps.push.pop.pop", p.signature, p.function_names)
    assert c.check(again).kind == "ill-typed"
    assert c.check(e).kind == "typed"
