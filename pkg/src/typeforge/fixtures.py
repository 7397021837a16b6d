"""Named example programs, automata and grammars with their expected verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .dsl import parse_automaton, parse_grammar, parse_program
from .grammar import gnf_to_program
from .typesys import LatticePointT, program_expression


def word(text: str) -> tuple[str, ...]:
    """``"aabb"`` splits into letters, ``"push pop"`` into tokens."""
    text = text.strip()
    if not text or text in ("ε", "eps"):
        return ()
    return tuple(text.split()) if " " in text else tuple(text)


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str  # program | automaton | grammar
    value: object
    point: LatticePointT | None = None
    positive: tuple = ()
    negative: tuple = ()
    language: Callable | None = field(default=None, compare=False)
    summary: str = ""
    source: str = ""


# -- language predicates (brute-force oracles) -----------------------------------------


def is_anbncn(w) -> bool:
    n = len(w) // 3
    return n >= 1 and tuple(w) == ("a",) * n + ("b",) * n + ("c",) * n


def is_anbn(w) -> bool:
    n = len(w) // 2
    return tuple(w) == ("a",) * n + ("b",) * n


def is_u_s_u(w) -> bool:
    w = tuple(w)
    if w.count("s") != 1:
        return False
    i = w.index("s")
    return w[:i] == w[i + 1:]


def is_stack_word(w) -> bool:
    depth = 0
    for x in w:
        if x == "push":
            depth += 1
        elif x == "pop":
            if depth == 0:
                return False
            depth -= 1
        elif x == "empty":
            if depth:
                return False
        else:
            return False
    return True


def is_counter_word(w) -> bool:
    k = 0
    for x in w:
        k += 1 if x == "inc" else -1
        if k < 0:
            return False
    return True


def is_even_palindrome(w) -> bool:
    return len(w) % 2 == 0 and tuple(w) == tuple(reversed(w))


def is_nonempty_even_palindrome(w) -> bool:
    return len(w) > 0 and is_even_palindrome(w)


# -- sources -----------------------------------------------------------------------------

ANBNCN_DEEP = """\
type γ1(x1, x2)
type γ2(x1, x2)
type γ3(x2)
type Zero extern
type Succ(x) extern
mode one-type
prefix begin
suffix end
fn begin : eps -> γ1(Zero, Zero)
fn a : γ1(x1, x2) -> γ1(Succ x1, Succ x2)
fn b : γ1(Succ x1, x2) -> γ2(x1, x2)
fn b : γ2(Succ x1, x2) -> γ2(x1, x2)
fn c : γ2(Zero, Succ x) -> γ3(x)
fn c : γ3(Succ x) -> γ3(x)
fn end : γ3(Zero) -> eps
expr eps.begin.a.a.a.b.b.b.c.c.c.end
expr eps.begin.a.a.a.b.b.c.c.c.end
"""

ANBNCN_NONLINEAR = """\
type γ1(x1, x2, x3)
type γ2(x1, x2, x3)
type γ3(x1, x2, x3)
type Zero extern
type Succ(x) extern
mode one-type
prefix begin
suffix end
fn begin : eps -> γ1(Zero, Zero, Zero)
fn a : γ1(x1, x2, x3) -> γ1(Succ x1, x2, x3)
fn b : γ1(x1, x2, x3) -> γ2(x1, Succ x2, x3)
fn b : γ2(x1, x2, x3) -> γ2(x1, Succ x2, x3)
fn c : γ2(x1, x2, x3) -> γ3(x1, x2, Succ x3)
fn c : γ3(x1, x2, x3) -> γ3(x1, x2, Succ x3)
fn end : γ3(x, x, x) -> eps
expr eps.begin.a.a.a.b.b.b.c.c.c.end
expr eps.begin.a.a.a.b.b.c.c.c.end
"""

WW = """\
type eps
type A(T)
type B(T)
type S(T)
mode one-type
suffix $
goal eps
fn a : eps -> A eps
fn b : eps -> B eps
fn a : T -> A T
fn b : T -> B T
fn s : T -> S T
fn $ : A T -> typeof match_a($(T))
fn $ : B T -> typeof match_b($(T))
fn $ : S T -> typeof reverse(T)
aux reverse : A T -> typeof append2end_a(reverse(T))
aux reverse : B T -> typeof append2end_b(reverse(T))
aux reverse : eps -> eps
aux append2end_a : A T -> typeof append2start_a(append2end_a(T))
aux append2end_a : B T -> typeof append2start_b(append2end_a(T))
aux append2end_a : eps -> A eps
aux append2end_b : A T -> typeof append2start_a(append2end_b(T))
aux append2end_b : B T -> typeof append2start_b(append2end_b(T))
aux append2end_b : eps -> B eps
aux append2start_a : T -> A T
aux append2start_b : T -> B T
aux match_a : A T -> T
aux match_b : B T -> T
expr eps.a.a.b.a.s.a.a.b.a.$
expr eps.a.b.b.a.s.a.a.b.a.$
expr eps.a.a.b.a.s.a.a.b.$
"""

DYCK = """\
type Stack(x)
mode one-type
fn push : eps -> Stack eps
fn empty : eps -> eps
fn push : Stack x -> Stack Stack x
fn pop : Stack x -> x
expr eps.push.push.pop.pop.empty
expr eps.push.pop.pop
"""

UNARY = """\
type Zero
type Succ(x)
mode one-type
prefix zero
fn zero : eps -> Zero
fn inc : x -> Succ x
fn dec : Succ x -> x
expr eps.zero.inc.inc.inc.inc.dec.inc
"""

EXAMPLE_PP = """\
type γ1
type γ2
type γ3(x1, x2)
type γ4(x1, x2)
mode one-type
base γ3(γ1, γ2)
fn a : γ3(x1, x2) -> x1
fn b : γ3(x1, x2) -> x2
fn c : γ3(x1, x2) -> γ4(γ2, γ3(x1, x2))
fn a : γ4(x1, x2) -> γ4(x2, x1)
fn b : γ4(x1, x2) -> γ4(γ3(x1, x2), γ3(x2, x1))
fn c : γ4(x1, x2) -> γ3(x1, x2)
expr γ3(γ1, γ2).c.a.b.b.a
"""


def _doubling(k: int) -> str:
    return "eps" + ".f" * k


S2_BLOWUP = f"""\
type C(x1, x2)
mode one-type
fn f : eps -> C(eps, eps)
fn f : C(x1, x2) -> C(C(x2, x1), C(x1, x2))
fn γ : x, x -> eps
expr γ({_doubling(32)}, {_doubling(32)})
"""

PALINDROME = """\
start S;
S -> a S a | b S b | ;
"""

PALINDROME_GNF = """\
start S;
S -> a γ1 | b γ2 ;
γ1 -> a γ1 γ3 | b γ2 γ3 | a ;
γ2 -> a γ1 γ4 | b γ2 γ4 | b ;
γ3 -> a ;
γ4 -> b ;
"""

TM_ANBN = """\
storage tape linear
preload
blank ♭
states q0 q1 q2 q3 q4
initial q0
accepting q4
alphabet a b
tape-alphabet a b ♭
epsilon: in q0 rule ♭ -> ♭- goto q4
epsilon: in q0 rule a -> ♭+ goto q1
epsilon: in q1 rule ♭ -> ♭- goto q2
epsilon: in q1 rule a -> a+ goto q1
epsilon: in q1 rule b -> b+ goto q1
epsilon: in q2 rule b -> ♭- goto q3
epsilon: in q3 rule ♭ -> ♭+ goto q0
epsilon: in q3 rule a -> a- goto q3
epsilon: in q3 rule b -> b- goto q3
"""

ANBNCN_TA = """\
storage tree
states q0 qf
initial q0
accepting qf
alphabet a b c
tree-alphabet g1/3 g2/3 g3/3 Succ/1 Zero/0
init-storage g1(Zero, Zero, Zero)
delta: on a in q0 rule g1(x1, x2, x3) -> g1(Succ x1, x2, x3) goto q0
delta: on b in q0 rule g1(x1, x2, x3) -> g2(x1, Succ x2, x3) goto q0
delta: on b in q0 rule g2(x1, x2, x3) -> g2(x1, Succ x2, x3) goto q0
delta: on c in q0 rule g2(x1, x2, x3) -> g3(x1, x2, Succ x3) goto q0
delta: on c in q0 rule g3(x1, x2, x3) -> g3(x1, x2, Succ x3) goto q0
epsilon: in q0 rule g3(x, x, x) -> eps goto qf
"""

RESTRICTED_TA = """\
storage tree
features stateless real-time deterministic
states q0
initial q0
accepting q0
alphabet a b c d e
tree-alphabet A/1 P/2
delta: on a in q0 rule x -> A x goto q0
delta: on b in q0 rule A x -> P(x, A x) goto q0
delta: on c in q0 rule P(x1, x2) -> x1 goto q0
delta: on d in q0 rule A x -> x goto q0
delta: on e in q0 rule P(x1, x2) -> x2 goto q0
"""


def _pt(*values: str) -> LatticePointT:
    return LatticePointT(*values)


def _words(*texts) -> tuple:
    return tuple(tuple(t) if isinstance(t, tuple) else word(t) for t in texts)


@lru_cache(maxsize=None)
def catalog() -> dict[str, Fixture]:
    out: dict[str, Fixture] = {}

    def add(f: Fixture) -> None:
        out[f.name] = f

    def program(name: str, text: str):
        p = parse_program(text)
        p.name = name
        return p

    add(Fixture(
        "anbncn-deep", "program", program("anbncn-deep", ANBNCN_DEEP),
        _pt("polyadic", "deep", "linear", "unary", "no-typeof", "one-type"),
        _words("aaabbbccc", "abc"), _words("aaabbccc", "", "aabbc"), is_anbncn,
        "a^n b^n c^n with unary counters matched by deep patterns", ANBNCN_DEEP,
    ))
    add(Fixture(
        "anbncn-nonlinear", "program", program("anbncn-nonlinear", ANBNCN_NONLINEAR),
        _pt("polyadic", "shallow", "non-linear", "unary", "no-typeof", "one-type"),
        _words("aaabbbccc", "abc"), _words("aaabbccc", "", "abcc"), is_anbncn,
        "a^n b^n c^n with three counters compared by a non-linear pattern", ANBNCN_NONLINEAR,
    ))
    add(Fixture(
        "ww", "program", program("ww", WW),
        _pt("monadic", "deep", "linear", "unary", "full", "one-type"),
        _words("aabasaaba", "abaasabaa", "s"), _words("abbasaaba", "aabasaab", "abaasabba", "baasabaa"),
        is_u_s_u, "u s u over {a, b} with chained typeof calls", WW,
    ))
    add(Fixture(
        "dyck-stack", "program", program("dyck-stack", DYCK),
        _pt("monadic", "shallow", "linear", "unary", "no-typeof", "one-type"),
        _words("push push pop pop empty", "push pop empty"), _words("push pop pop", ("pop",), "push empty"),
        is_stack_word, "stack operations that never pop an empty stack", DYCK,
    ))
    add(Fixture(
        "unary", "program", program("unary", UNARY),
        _pt("monadic", "shallow", "linear", "unary", "no-typeof", "one-type"),
        _words("inc inc inc inc dec inc", "inc dec"), _words(("dec",), "inc dec dec"),
        is_counter_word, "unary counter types Zero and Succ", UNARY,
    ))
    add(Fixture(
        "example-pp", "program", program("example-pp", EXAMPLE_PP),
        _pt("polyadic", "shallow", "linear", "unary", "no-typeof", "one-type"),
        _words("cabba", "c", "ca"), _words("aa", "ba", "ccaa"),
        None, "two generic interfaces exchanging their arguments", EXAMPLE_PP,
    ))
    add(Fixture(
        "s2-blowup", "program", program("s2-blowup", S2_BLOWUP),
        _pt("dyadic", "deep", "non-linear", "n-ary", "no-typeof", "one-type"),
        (), (), None, "doubling type compared by a non-linear binary function", S2_BLOWUP,
    ))
    add(Fixture(
        "palindrome", "grammar", parse_grammar(PALINDROME), None,
        _words("", "abba", "aa"), _words("abb", "a", "ab"), is_even_palindrome,
        "even-length palindromes", PALINDROME,
    ))
    gnf = parse_grammar(PALINDROME_GNF)
    add(Fixture(
        "palindrome-gnf", "grammar", gnf, None,
        _words("abba", "aabbaa"), _words("", "abb", "aab"), is_nonempty_even_palindrome,
        "non-empty even palindromes in Greibach normal form", PALINDROME_GNF,
    ))
    pal = gnf_to_program(gnf)
    pal.name = "palindrome-program"
    pal.exprs = (program_expression(pal, word("aabbaa")),)
    add(Fixture(
        "palindrome-program", "program", pal,
        _pt("monadic", "shallow", "linear", "unary", "no-typeof", "eventually-one-type"),
        _words("aabbaa", "abba"), _words("aab", "", "ab"), is_nonempty_even_palindrome,
        "overloaded encoding of the Greibach palindrome grammar", "",
    ))
    add(Fixture(
        "tm-anbn", "automaton", parse_automaton(TM_ANBN), None,
        _words("aaaabbbb", "", "ab"), _words("aaaababb", "aaabbbb", "ba"), is_anbn,
        "linear-bounded Turing machine for a^n b^n", TM_ANBN,
    ))
    add(Fixture(
        "anbncn-ta", "automaton", parse_automaton(ANBNCN_TA), None,
        _words("abc", "aabbcc"), _words("", "aabcc", "abcabc"), is_anbncn,
        "tree automaton with a rank-3 counter triple", ANBNCN_TA,
    ))
    add(Fixture(
        "restricted-ta", "automaton", parse_automaton(RESTRICTED_TA), None,
        _words("ab", "abc", "aabe", "aabed"), _words("c", "b", "abcc"), None,
        "stateless real-time tree automaton with one storage node per left side", RESTRICTED_TA,
    ))
    return out


def names() -> list[str]:
    return list(catalog())


def get(name: str) -> Fixture:
    try:
        return catalog()[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(catalog())}") from None
