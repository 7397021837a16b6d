from pathlib import Path

import pytest

from typeforge.emit import (
    CHAR_MAP,
    EmitTarget,
    UnsupportedFeature,
    emit,
    mangle,
    normalize_source,
    same_source,
)
from typeforge.fixtures import catalog, get, word
from typeforge.transforms import ta_to_typeof_program, tm_to_ta

GOLDEN = Path(__file__).parent / "golden"
TURING_WORDS = [word("aaaabbbb"), word("aaaababb"), word("aaabbbb")]


def turing_program():
    tm = get("tm-anbn").value
    return ta_to_typeof_program(tm_to_ta(tm, TURING_WORDS[0]), words=TURING_WORDS)


def test_golden_deep_anbncn_java():
    out = emit(get("anbncn-deep").value, "java")
    assert same_source(out, (GOLDEN / "anbncn_deep.java").read_text(encoding="utf-8"))


def test_golden_ww_cpp():
    # this listing is written with C++14 auto return types
    out = emit(get("ww").value, EmitTarget("cpp", "auto"))
    assert same_source(out, (GOLDEN / "ww.cpp").read_text(encoding="utf-8"))


def test_golden_turing_cpp():
    out = emit(turing_program(), "cpp")
    assert same_source(out, (GOLDEN / "turing_anbn.cpp").read_text(encoding="utf-8"))


def test_structure_changes_break_the_comparison():
    golden = (GOLDEN / "ww.cpp").read_text(encoding="utf-8")
    lines = golden.splitlines()
    swapped = "\n".join([lines[0]] + lines[2:3] + lines[1:2] + lines[3:])
    assert not same_source(golden, swapped) or lines[1] == lines[2]


@pytest.mark.parametrize("name", [n for n, f in catalog().items() if f.kind == "program"])
def test_emission_is_deterministic(name):
    p = get(name).value
    for target in ("cpp", "pseudo"):
        assert emit(p, target) == emit(p, target)


def test_java_rejects_typeof():
    with pytest.raises(UnsupportedFeature, match="typeof"):
        emit(get("ww").value, "java")


def test_java_rejects_eventually_one_type():
    with pytest.raises(UnsupportedFeature, match="eventually-one-type"):
        emit(get("palindrome-program").value, "java")


def test_pseudo_accepts_everything():
    for name, f in catalog().items():
        if f.kind == "program":
            assert emit(f.value, "pseudo")


def test_mangling_is_injective_and_recorded():
    names = ["γ1", "γ2", "∘", "♭", "eps", "$", "g1", "O", "B"]
    mangled = [mangle(n) for n in names]
    assert len(set(mangled[:6])) == 6
    out = emit(turing_program(), "cpp")
    header = out.splitlines()[0]
    assert header.startswith("// identifier mangling:")
    assert "∘->O" in header and "♭->B" in header


def test_mangling_collision_is_an_error():
    from typeforge.dsl import parse_program

    p = parse_program("type γ1(x)\ntype g1(x)\nfn a : eps -> γ1 g1 eps\n")
    with pytest.raises(UnsupportedFeature):
        emit(p, "cpp")


def test_char_map_values_are_identifiers():
    for k, v in CHAR_MAP.items():
        assert v.replace("_", "a").isalnum(), k


def test_target_validation():
    with pytest.raises(ValueError):
        EmitTarget("scala")
    assert "auto" in emit(get("ww").value, EmitTarget("cpp", "auto"))


def test_normalize_source_ignores_whitespace_and_comments():
    assert normalize_source("int  x; // a\n\n") == normalize_source("int x; // b")
