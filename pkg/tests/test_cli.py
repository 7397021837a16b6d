import json
from importlib import resources

import jsonschema
import pytest

from typeforge.cli import main
from typeforge.dsl import parse_program, print_program, programs_equal
from typeforge.fixtures import get
from typeforge.transforms import ta_to_typeof_program, tm_to_ta

SCHEMA = json.loads(resources.files("typeforge").joinpath("schema/report.schema.json").read_text())


def run_json(argv, capsys):
    code = main(argv + ["--format", "json"])
    out = capsys.readouterr().out
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["exit_code"] == code
    return code, doc


@pytest.mark.parametrize("argv, code", [
    (["typecheck", "fixtures:anbncn-deep", "aaabbbccc"], 0),
    (["simulate", "fixtures:tm-anbn", "aaabbbb"], 1),
    (["verify", "fixtures:dyck-stack", "convert(fixtures:dyck-stack)", "--max-len", "10"], 0),
])
def test_documented_examples(argv, code, capsys):
    assert main(argv) == code


def test_negative_typecheck(capsys):
    code, doc = run_json(["typecheck", "fixtures:anbncn-deep", "aaabbcc"], capsys)
    assert code == 1 and doc["status"] == "negative"


@pytest.mark.parametrize("argv", [
    ["simulate", "fixtures:tm-anbn", "aabb", "--trace"],
    ["typecheck", "fixtures:palindrome-program", "abba", "--mode", "multiple-types"],
    ["typecheck", "fixtures:ww", "--expr", "eps.a.s.a"],
    ["convert", "fixtures:anbncn-ta", "--from", "ta", "--to", "dyadic"],
    ["convert", "fixtures:restricted-ta", "--from", "ta", "--to", "dpda"],
    ["convert", "fixtures:tm-anbn", "--from", "tm", "--to", "typeof-program", "--word", "aabb"],
    ["gnf", "fixtures:palindrome", "--program"],
    ["generate", "fixtures:palindrome", "--target", "cpp"],
    ["generate", "fixtures:tm-anbn", "--target", "cpp", "--word", "ab"],
    ["generate", "fixtures:ww", "--target", "cpp", "--typeof-style", "auto"],
    ["verify", "fixtures:anbncn-deep", "fixtures:anbncn-ta", "--max-len", "6"],
    ["verify", "random:cfg", "convert(random:cfg)", "--max-len", "5", "--seed", "4"],
    ["fixtures"],
    ["fixtures", "ww"],
])
def test_json_reports_follow_the_schema(argv, capsys):
    code, doc = run_json(argv, capsys)
    assert code in (0, 1)
    assert doc["command"] == argv[0]


def test_fixture_listing_names_everything(capsys):
    _, doc = run_json(["fixtures"], capsys)
    text = json.dumps(doc["result"])
    for name in ("anbncn-deep", "tm-anbn", "palindrome", "restricted-ta"):
        assert name in text


def test_generate_cpp_text(capsys):
    assert main(["generate", "fixtures:ww", "--target", "cpp"]) == 0
    assert "template<typename T>" in capsys.readouterr().out


def test_forge_fuel_makes_runs_inconclusive(monkeypatch, capsys):
    monkeypatch.setenv("FORGE_FUEL", "3")
    code, doc = run_json(["typecheck", "fixtures:anbncn-deep", "aaabbbccc"], capsys)
    assert code == 3 and doc["status"] == "inconclusive"


def test_explicit_fuel_beats_environment(monkeypatch, capsys):
    monkeypatch.setenv("FORGE_FUEL", "3")
    assert main(["typecheck", "fixtures:anbncn-deep", "abc", "--fuel", "100000"]) == 0


def test_bad_forge_fuel_is_usage_error(monkeypatch, capsys):
    monkeypatch.setenv("FORGE_FUEL", "lots")
    assert main(["fixtures"]) == 2
    assert "FORGE_FUEL" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["typecheck", "fixtures:nope", "abc"],
    ["simulate", "fixtures:anbncn-deep", "abc"],
    ["verify", "fixtures:ww", "fixtures:anbncn-deep"],
    ["convert", "fixtures:anbncn-ta", "--from", "tm", "--to", "ta"],
    ["typecheck", "missing.typ", "a"],
    ["verify", "random:zebra", "random:cfg"],
    ["simulate"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_usage_error_json_envelope(capsys):
    code, doc = run_json(["typecheck", "fixtures:nope", "abc"], capsys)
    assert code == 2 and doc["status"] == "error" and doc["error"]


def test_reads_program_files(tmp_path, capsys):
    path = tmp_path / "deep.typ"
    path.write_text(print_program(get("anbncn-deep").value), encoding="utf-8")
    assert main(["typecheck", str(path), "aabbcc"]) == 0
    assert main(["typecheck", str(path), "aabbc"]) == 1


def test_convert_output_parses_back(capsys):
    assert main(["convert", "fixtures:tm-anbn", "--from", "tm", "--to", "typeof-program",
                 "--word", "ab"]) == 0
    back = parse_program(capsys.readouterr().out)
    expected = ta_to_typeof_program(tm_to_ta(get("tm-anbn").value, ("a", "b")), words=[("a", "b")])
    assert programs_equal(back, expected)
