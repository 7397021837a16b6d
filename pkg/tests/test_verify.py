import pytest

from typeforge.fixtures import get, is_anbncn
from typeforge.grammar import cyk_membership
from typeforge.randomgen import random_cfg
from typeforge.verify import AlphabetMismatch, Verdict, VerifyReport, alphabet_of, membership, verify_bisimulation


def test_program_agrees_with_itself():
    p = get("anbncn-deep").value
    r = verify_bisimulation(p, p, max_len=6)
    assert r.ok and r.conclusive
    assert r.agreed == len(r.rows) == sum(3 ** k for k in range(7))


def test_deep_program_matches_counter_automaton():
    r = verify_bisimulation(get("anbncn-deep").value, get("anbncn-ta").value, max_len=9)
    assert r.ok and r.conclusive
    assert r.as_dict()["accepted"] == 3  # eps, abc, aabbcc


def test_membership_matches_predicate():
    p = get("anbncn-nonlinear").value
    for w in ("", "abc", "aabbcc", "aabcc", "cba"):
        assert membership(p, w) == is_anbncn(w)


def test_grammar_membership_is_cyk():
    g = random_cfg(3)
    for w in ("", "a", "ab", "bba"):
        assert membership(g, w) == cyk_membership(g, w)


def test_alphabet_mismatch_raises():
    with pytest.raises(AlphabetMismatch):
        verify_bisimulation(get("ww").value, get("anbncn-deep").value, max_len=2)


def test_alphabet_of_rejects_other_objects():
    with pytest.raises(TypeError):
        alphabet_of("abc")


def test_exhausted_words_are_not_agreements():
    p = get("anbncn-deep").value
    r = verify_bisimulation(p, p, max_len=4, fuel=3)
    assert r.exhausted
    assert r.agreed + len(r.exhausted) + len(r.mismatches) == len(r.rows)
    assert not r.conclusive
    assert all(" " in w or len(w) <= 1 for w in r.as_dict()["fuel_exhausted"])


def test_report_lists_mismatches():
    r = VerifyReport(("a",), 1, [Verdict((), True, True), Verdict(("a",), True, False)])
    d = r.as_dict()
    assert not r.ok
    assert d["mismatches"] == [{"word": "a", "left": True, "right": False}]
    assert d["agreed"] == 1 and d["accepted"] == 1
