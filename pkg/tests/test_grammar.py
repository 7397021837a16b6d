import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from typeforge.dsl import parse_grammar
from typeforge.fixtures import get, is_even_palindrome
from typeforge.grammar import (
    Cfg,
    cyk_membership,
    enumerate_words,
    gnf_to_program,
    is_gnf,
    lmd_type_sets,
    nullable,
    to_gnf,
)
from typeforge.randomgen import random_cfg
from typeforge.terms import EPS
from typeforge.typesys import chain_expr, check_word, is_member, typecheck


def language_upto(g: Cfg, n: int) -> set:
    """Least fixpoint of the grammar equations, truncated to length n."""
    lang = {v: set() for v in g.variables}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.rules:
            words = {()}
            for s in rhs:
                part = lang[s] if s in lang else {(s,)}
                words = {u + v for u in words for v in part if len(u) + len(v) <= n}
                if not words:
                    break
            new = words - lang[lhs]
            if new:
                lang[lhs] |= new
                changed = True
    return lang[g.start]


def all_words(terminals, n):
    return itertools.chain.from_iterable(itertools.product(terminals, repeat=k) for k in range(n + 1))


PAL = get("palindrome").value
PAL_GNF = get("palindrome-gnf").value


def test_palindrome_enumeration():
    got = ["".join(w) for w in enumerate_words(PAL, 4)]
    assert got == ["", "aa", "bb", "aaaa", "abba", "baab", "bbbb"]


def test_cyk_matches_predicate():
    for w in all_words("ab", 8):
        assert cyk_membership(PAL, w) == is_even_palindrome(w)


@given(st.integers(0, 10_000))
def test_cyk_matches_fixpoint_oracle(seed):
    g = random_cfg(seed)
    lang = language_upto(g, 6)
    for w in all_words(g.terminals, 6):
        assert cyk_membership(g, w) == (w in lang), (seed, w)


@given(st.integers(0, 10_000))
def test_gnf_preserves_the_language(seed):
    g = random_cfg(seed)
    h = to_gnf(g)
    assert is_gnf(h)
    assert language_upto(h, 6) == language_upto(g, 6)


def test_gnf_of_palindromes():
    h = to_gnf(PAL)
    assert is_gnf(h)
    assert enumerate_words(h, 6) == enumerate_words(PAL, 6)


def test_gnf_handles_left_recursion_and_units():
    g = parse_grammar("start E; E -> E p T | T ; T -> T m F | F ; F -> l E r | i ;")
    h = to_gnf(g)
    assert is_gnf(h)
    assert language_upto(h, 7) == language_upto(g, 7)


def test_reserved_terminal():
    with pytest.raises(ValueError):
        Cfg(("$",), ("S",), "S", (("S", ("$",)),))


def test_nullable():
    g = parse_grammar("start S; S -> A B ; A -> a | ; B -> A A ;")
    assert nullable(g) == {"S", "A", "B"}


def test_program_from_palindrome_grammar():
    p = gnf_to_program(PAL_GNF)
    r = check_word(p, tuple("aabbaa"))
    assert r.kind == "typed" and r.type is EPS
    assert not is_member(check_word(p, tuple("aab")))


def test_eventually_one_type_matches_cyk_on_even_words():
    p = gnf_to_program(PAL_GNF, "eventually-one-type")
    for w in all_words("ab", 8):
        if len(w) % 2 == 0:
            assert is_member(check_word(p, w)) == cyk_membership(PAL_GNF, w), w


def test_one_type_breaks_on_some_palindrome():
    p = gnf_to_program(PAL_GNF, "one-type")
    kinds = {check_word(p, w).kind for w in enumerate_words(PAL_GNF, 8)}
    assert "error-type" in kinds


def test_lmd_type_sets_are_the_checker_sets():
    p = gnf_to_program(PAL_GNF, "multiple-types")
    for w in all_words("ab", 5):
        expected = lmd_type_sets(PAL_GNF, w)
        r = typecheck(p, chain_expr(w), "multiple-types")
        got = set(r.types) if r.typed else set()
        assert got == expected, w


@given(st.integers(0, 10_000))
def test_multiple_types_matches_cyk_on_random_grammars(seed):
    g = random_cfg(seed, max_alternatives=2)
    p = gnf_to_program(to_gnf(g), "multiple-types")
    for w in all_words(g.terminals, 5):
        got = is_member(check_word(p, w))
        if got is not None:
            assert got == cyk_membership(g, w), (seed, w)


def test_gnf_to_program_rejects_non_gnf():
    with pytest.raises(ValueError):
        gnf_to_program(PAL)
