"""End-to-end acceptance suite: twelve numbered criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import pytest

from typeforge.automata import run, trace_run, validate, words_upto
from typeforge.emit import emit, same_source
from typeforge.fixtures import catalog, get, is_anbncn, is_nonempty_even_palindrome, is_u_s_u, word
from typeforge.grammar import cyk_membership, gnf_to_program, to_gnf
from typeforge.randomgen import random_cfg, random_fluent_program, random_restricted_ta, random_rudimentary_program
from typeforge.transforms import (
    decode_rule_stack,
    fluent_to_dpda,
    polyadic_to_dyadic,
    program_to_ta,
    rudimentary_to_ta,
    ta_to_dpda,
    ta_to_typeof_program,
    tm_to_ta,
    turing_check,
)
from typeforge.terms import EPS
from typeforge.typesys import check_word, is_member, typecheck
from typeforge.verify import verify_bisimulation

GOLDEN = Path(__file__).parent / "golden"
FUEL = 100_000
CRITERIA = []


def criterion(number, title):
    def register(fn):
        CRITERIA.append((number, title, fn))
        return fn
    return register


def agree_with(p, predicate, words):
    for w in words:
        got = is_member(check_word(p, w, fuel=FUEL))
        assert got == predicate(w), (w, got)


def assert_bisimilar(left, right, max_len, label):
    rep = verify_bisimulation(left, right, max_len, FUEL)
    assert rep.conclusive, (label, rep.as_dict()["fuel_exhausted"][:5])
    assert rep.ok, (label, rep.as_dict()["mismatches"][:5])
    return rep


def q0_stacks(path):
    out = {}
    for ident in path:
        if ident.state == "q0":
            out[ident.pos] = ident.storage
    return out


@criterion(1, "a^n b^n c^n with deep patterns")
def deep_anbncn():
    p = get("anbncn-deep").value
    assert check_word(p, word("aaabbbccc")).kind == "typed"
    assert check_word(p, word("aaabbccc")).kind == "ill-typed"
    agree_with(p, is_anbncn, words_upto("abc", 9))


@criterion(2, "a^n b^n c^n with non-linear patterns")
def nonlinear_anbncn():
    p = get("anbncn-nonlinear").value
    assert check_word(p, word("aaabbbccc")).kind == "typed"
    assert check_word(p, word("aaabbccc")).kind == "ill-typed"
    agree_with(p, is_anbncn, words_upto("abc", 9))


@criterion(3, "Turing machine through tree automaton and typeof program")
def turing_pipeline():
    tm = get("tm-anbn").value
    words = [word("aaaabbbb"), word("aaaababb"), word("aaabbbb")]
    assert [run(tm, w).accepted for w in words] == [True, False, False]
    p = ta_to_typeof_program(tm_to_ta(tm, words[0]), words=words)
    for w, e in zip(words, p.exprs):
        expected = run(tm, w).accepted
        assert is_member(typecheck(p, e, fuel=FUEL)) == expected, w
        assert is_member(turing_check(p, tm.initial, w, FUEL)) == expected, w
        assert run(tm_to_ta(tm, w), ()).accepted == expected, w
    assert same_source(emit(p, "cpp"), (GOLDEN / "turing_anbn.cpp").read_text(encoding="utf-8"))


@criterion(4, "u s u with full typeof")
def ww_full_typeof():
    p = get("ww").value
    assert check_word(p, word("abaasabaa")).kind == "typed"
    assert check_word(p, word("abaasabba")).kind == "ill-typed"
    assert check_word(p, word("baasabaa")).kind == "ill-typed"
    halves = list(words_upto("ab", 4))
    words = [u + ("s",) + v for u in halves for v in halves]
    agree_with(p, is_u_s_u, words)


@criterion(5, "Fluent programs to deterministic pushdown automata")
def fluent_to_dpda_agreement():
    t0 = time.perf_counter()
    programs = [get("dyck-stack").value] + [
        random_fluent_program(seed, max_types=6, max_functions=10) for seed in range(50)
    ]
    for p in programs:
        d = fluent_to_dpda(p)
        v = validate(d)
        assert v.deterministic and not v.conflicts, p.name
        assert_bisimilar(p, d, 8, p.name)
    assert time.perf_counter() - t0 < 60.0


@criterion(6, "restricted tree automata emulated by pushdown automata")
def ta_to_dpda_emulation():
    automata = [get("restricted-ta").value] + [random_restricted_ta(seed) for seed in range(50)]
    for i, ta in enumerate(automata):
        d = ta_to_dpda(ta)
        assert validate(d).deterministic, i
        assert_bisimilar(ta, d, 8, i)
        for w in words_upto(ta.alphabet, 5):
            ta_at = {ident.pos: ident.storage for ident in trace_run(ta, w)}
            for pos, stack in q0_stacks(trace_run(d, w)).items():
                assert decode_rule_stack(d, stack) is ta_at[pos], (i, w, pos)


@criterion(7, "rudimentary typeof eliminated into tree automata")
def rudimentary_elimination():
    for seed in range(50):
        p = random_rudimentary_program(seed)
        assert_bisimilar(p, rudimentary_to_ta(p), 8, seed)


@criterion(8, "polyadic tree automaton reduced to dyadic")
def dyadic_reduction():
    ta = get("anbncn-ta").value
    dy = polyadic_to_dyadic(ta)
    assert max(dy.signature.symbols.values()) == 2
    assert_bisimilar(ta, dy, 9, "anbncn-ta")
    for w in words_upto("abc", 9):
        assert run(ta, w).accepted == is_anbncn(w), w


@criterion(9, "overloading resolution on the Greibach palindrome grammar")
def ada_overloading():
    g = get("palindrome-gnf").value
    p = gnf_to_program(g, "eventually-one-type")
    r = check_word(p, word("aabbaa"))
    assert r.kind == "typed" and r.type is EPS, r
    for w in words_upto("ab", 8):
        if len(w) % 2 == 0:
            got = is_member(check_word(p, w, fuel=FUEL))
            assert got == cyk_membership(g, w) == is_nonempty_even_palindrome(w), w
    strict = gnf_to_program(g, "one-type")
    palindromes = [w for w in words_upto("ab", 8) if is_nonempty_even_palindrome(w)]
    assert any(check_word(strict, w).kind == "error-type" for w in palindromes)


@criterion(10, "multiple types recognize context-free languages")
def multiple_types_cfl():
    for seed in range(20):
        g = random_cfg(seed, max_variables=4)
        p = gnf_to_program(to_gnf(g), "multiple-types")
        assert_bisimilar(g, p, 8, seed)


@criterion(11, "non-linear doubling program checks fast")
def blowup_defused():
    p = get("s2-blowup").value
    t0 = time.perf_counter()
    r = typecheck(p, p.exprs[0])
    elapsed = time.perf_counter() - t0
    assert r.kind == "typed"
    assert elapsed < 1.0, elapsed


def pp_fixtures():
    return [
        f.value for f in catalog().values()
        if f.kind == "program" and f.point.depth == "shallow" and f.point.multiplicity == "linear"
        and f.point.typeof == "no-typeof" and f.point.overloading == "one-type"
    ]


@criterion(12, "final type equals final tree automaton storage")
def bisimulation_core():
    programs = pp_fixtures()
    assert {p.name for p in programs} >= {"example-pp", "dyck-stack", "unary"}
    for p in programs:
        ta = program_to_ta(p)
        accepted = 0
        for w in words_upto(p.alphabet, 8):
            r = check_word(p, w, fuel=FUEL)
            if not is_member(r):
                continue
            accepted += 1
            path = trace_run(ta, w)
            assert path and path[-1].pos == len(w), (p.name, w)
            assert path[-1].storage is r.type, (p.name, w, path[-1].storage, r.type)
        assert accepted > 0, p.name


def run_criterion(number, title, fn):
    t0 = time.perf_counter()
    try:
        fn()
    except Exception as exc:  # report every failure kind, then re-raise
        return False, f"FAIL  {number:2d}  {title}  ({type(exc).__name__}: {exc})"[:300], exc
    return True, f"PASS  {number:2d}  {title}  ({time.perf_counter() - t0:.1f}s)", None


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, line, exc = run_criterion(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    if not ok:
        raise exc


if __name__ == "__main__":
    failures = 0
    for number, title, fn in CRITERIA:
        ok, line, _ = run_criterion(number, title, fn)
        failures += not ok
        print(line, flush=True)
    sys.exit(1 if failures else 0)
