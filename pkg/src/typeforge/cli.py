"""Command-line front end.

Exit codes: 0 success, 1 negative result (reject, ill-typed, mismatch),
2 usage or input error, 3 fuel exhausted before a verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from . import fixtures as fx
from . import randomgen
from .automata import AutomatonSpec, run, trace_run, validate
from .dsl import (
    DSLError,
    automaton_from_json,
    grammar_from_json,
    grammar_to_json,
    parse_automaton,
    parse_expr,
    parse_grammar,
    parse_program,
    print_automaton,
    print_grammar,
    print_program,
)
from .emit import EmitTarget, UnsupportedFeature, emit
from .grammar import Cfg, gnf_to_program, to_gnf
from .terms import Term, render
from .transforms import (
    ConversionError,
    fluent_to_dpda,
    polyadic_to_dyadic,
    program_to_ta,
    report,
    rudimentary_to_ta,
    ta_to_dpda,
    ta_to_typeof_program,
    tm_to_ta,
)
from .typesys import TypeProgram, check_word, classify_program, is_member, typecheck
from .verify import AlphabetMismatch, verify_bisimulation

OK, NEGATIVE, USAGE, FUEL = 0, 1, 2, 3
STATUS = {OK: "ok", NEGATIVE: "negative", USAGE: "error", FUEL: "inconclusive"}
DEFAULT_FUEL = 100_000
RANDOM_KINDS = ("fluent", "rudimentary", "ta", "cfg")


class UsageError(Exception):
    pass


# -- loading ---------------------------------------------------------------------------


def default_fuel() -> int:
    env = os.environ.get("FORGE_FUEL")
    if env is None:
        return DEFAULT_FUEL
    try:
        value = int(env)
    except ValueError:
        raise UsageError(f"FORGE_FUEL must be an integer, got {env!r}") from None
    if value <= 0:
        raise UsageError("FORGE_FUEL must be positive")
    return value


def _from_json(data: dict):
    if "rules" in data and "start" in data:
        return grammar_from_json(data)
    return automaton_from_json(data)


def load(ref: str, seed: int = 0):
    """Resolve a path, ``fixtures:NAME``, ``random:KIND`` or ``convert(REF)``."""
    ref = ref.strip()
    m = re.fullmatch(r"convert\((.*)\)", ref)
    if m:
        return auto_convert(load(m.group(1), seed))
    if ref.startswith("fixtures:"):
        try:
            return fx.get(ref[len("fixtures:"):]).value
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if ref.startswith("random:"):
        kind = ref[len("random:"):]
        gens = {
            "fluent": randomgen.random_fluent_program,
            "rudimentary": randomgen.random_rudimentary_program,
            "ta": randomgen.random_restricted_ta,
            "cfg": randomgen.random_cfg,
        }
        if kind not in gens:
            raise UsageError(f"unknown random kind {kind!r}; expected one of {', '.join(RANDOM_KINDS)}")
        return gens[kind](seed)
    path = Path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {ref}: {exc.strerror}") from None
    try:
        if path.suffix == ".typ":
            return parse_program(text)
        if path.suffix == ".aut":
            return parse_automaton(text)
        if path.suffix == ".cfg":
            return parse_grammar(text)
        if path.suffix == ".json":
            return _from_json(json.loads(text))
    except DSLError as exc:
        raise UsageError(f"{ref}: {exc}") from None
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{ref}: {exc}") from None
    raise UsageError(f"{ref}: unknown extension (expected .typ, .aut, .cfg or .json)")


def auto_convert(obj):
    """The natural conversion for each input: programs to automata, restricted
    tree automata to DPDAs, wide tree automata to dyadic ones, grammars to programs."""
    try:
        if isinstance(obj, TypeProgram):
            for conv in (fluent_to_dpda, rudimentary_to_ta, program_to_ta):
                try:
                    return conv(obj)
                except ConversionError:
                    continue
            raise ConversionError("no conversion accepts this program")
        if isinstance(obj, AutomatonSpec):
            if obj.storage == "tape":
                raise ConversionError("a Turing machine converts per input word; use convert --word")
            try:
                return ta_to_dpda(obj)
            except ConversionError:
                return polyadic_to_dyadic(obj)
        if isinstance(obj, Cfg):
            return gnf_to_program(to_gnf(obj))
    except ConversionError as exc:
        raise UsageError(f"convert: {exc}") from None
    raise UsageError(f"cannot convert {type(obj).__name__}")


def parse_word(text: str, alphabet) -> tuple[str, ...]:
    text = text.strip()
    if text in ("", "ε", "eps"):
        return ()
    if re.search(r"[\s,]", text):
        return tuple(t for t in re.split(r"[\s,]+", text) if t)
    if text in alphabet and len(text) > 1:
        return (text,)
    return tuple(text)


def _kind(obj) -> str:
    if isinstance(obj, TypeProgram):
        return "program"
    if isinstance(obj, AutomatonSpec):
        return "automaton"
    return "grammar"


def _source_text(obj) -> str:
    if isinstance(obj, TypeProgram):
        return print_program(obj)
    if isinstance(obj, AutomatonSpec):
        return print_automaton(obj)
    return print_grammar(obj)


def _show(x) -> str:
    return render(x) if isinstance(x, Term) else str(x)


# -- subcommands ----------------------------------------------------------------------------


def cmd_simulate(args) -> tuple[int, dict, str]:
    a = load(args.automaton, args.seed)
    if not isinstance(a, AutomatonSpec):
        raise UsageError("simulate expects an automaton")
    if a.forest:
        raise UsageError("simulate reads words; this automaton recognizes forests")
    w = parse_word(args.word, a.alphabet)
    out = run(a, w, args.fuel)
    result = {"word": " ".join(w), "verdict": out.kind, "reason": out.reason, "steps": out.steps}
    lines = [str(out)]
    if args.trace and validate(a).deterministic:
        path = trace_run(a, w, args.fuel)
        result["trace"] = [
            {"pos": i.pos, "state": i.state, "storage": _show(i.storage)} for i in path
        ]
        lines = [f"{i.pos:>3} {i.state:<12} {_show(i.storage)}" for i in path] + lines
    code = OK if out.accepted else FUEL if out.exhausted else NEGATIVE
    return code, result, "\n".join(lines)


def _check_code(results, assume_unambiguous: bool) -> int:
    verdicts = [is_member(r, assume_unambiguous) for r in results]
    if any(v is False for v in verdicts):
        return NEGATIVE
    if any(v is None for v in verdicts):
        return FUEL
    return OK


def cmd_typecheck(args) -> tuple[int, dict, str]:
    p = load(args.program, args.seed)
    if not isinstance(p, TypeProgram):
        raise UsageError("typecheck expects a type program")
    if args.word is not None and args.expr is not None:
        raise UsageError("give either a word or --expr, not both")
    if args.expr is not None:
        try:
            e = parse_expr(args.expr, p.signature, p.function_names)
        except (DSLError, ValueError) as exc:
            raise UsageError(f"--expr: {exc}") from None
        checks = [(args.expr, typecheck(p, e, args.mode, args.fuel))]
    elif args.word is not None:
        w = parse_word(args.word, p.alphabet)
        checks = [(" ".join(w) or "ε", check_word(p, w, args.mode, args.fuel))]
    else:
        if not p.exprs:
            raise UsageError("the program has no expressions; give a word or --expr")
        from .dsl import render_expr

        checks = [(render_expr(e), typecheck(p, e, args.mode, args.fuel)) for e in p.exprs]
    code = _check_code([r for _, r in checks], args.assume_unambiguous)
    result = {
        "mode": args.mode or p.mode,
        "checks": [
            {
                "input": label,
                "result": r.kind,
                "types": sorted(render(t) for t in r.types),
                "at": r.at,
                "detail": r.detail,
            }
            for label, r in checks
        ],
    }
    text = "\n".join(f"{label}: {r}" for label, r in checks)
    return code, result, text


CONVERSIONS = {
    ("tm", "ta"), ("tm", "typeof-program"), ("ta", "typeof-program"), ("ta", "dpda"),
    ("ta", "dyadic"), ("fluent", "dpda"), ("rudimentary", "ta"), ("program", "ta"),
    ("grammar", "typeof-program"),
}


def cmd_convert(args) -> tuple[int, dict, str]:
    if (args.source_kind, args.to) not in CONVERSIONS:
        pairs = ", ".join(f"{a}->{b}" for a, b in sorted(CONVERSIONS))
        raise UsageError(f"no conversion {args.source_kind}->{args.to}; supported: {pairs}")
    src = load(args.source, args.seed)
    words = [parse_word(w, getattr(src, "alphabet", ())) for w in args.word or []]
    try:
        if args.source_kind == "tm":
            if not isinstance(src, AutomatonSpec) or src.storage != "tape":
                raise UsageError("--from tm expects a tape automaton")
            if not words:
                raise UsageError("--from tm needs at least one --word")
            if args.to == "ta":
                out = tm_to_ta(src, words[0])
            else:
                out = ta_to_typeof_program(tm_to_ta(src, words[0]), words=words)
        elif args.source_kind == "ta":
            if not isinstance(src, AutomatonSpec):
                raise UsageError("--from ta expects an automaton")
            out = {"typeof-program": ta_to_typeof_program, "dpda": ta_to_dpda,
                   "dyadic": polyadic_to_dyadic}[args.to](src)
        elif args.source_kind == "grammar":
            if not isinstance(src, Cfg):
                raise UsageError("--from grammar expects a grammar")
            out = gnf_to_program(to_gnf(src))
        else:
            if not isinstance(src, TypeProgram):
                raise UsageError(f"--from {args.source_kind} expects a type program")
            out = {"fluent": fluent_to_dpda, "rudimentary": rudimentary_to_ta,
                   "program": program_to_ta}[args.source_kind](src)
    except ConversionError as exc:
        raise UsageError(f"convert: {exc}") from None
    text = _source_text(out)
    result = {"kind": _kind(out), "output": text}
    if not isinstance(src, Cfg):
        result["report"] = report(src, out).as_dict()
    return OK, result, text.rstrip("\n")


def cmd_gnf(args) -> tuple[int, dict, str]:
    g = load(args.grammar, args.seed)
    if not isinstance(g, Cfg):
        raise UsageError("gnf expects a grammar")
    out = to_gnf(g)
    result = {"grammar": grammar_to_json(out), "rules": len(out.rules)}
    text = print_grammar(out)
    if args.program:
        prog = print_program(gnf_to_program(out, args.mode or "eventually-one-type"))
        result["program"] = prog
        text += "\n" + prog
    return OK, result, text.rstrip("\n")


def cmd_generate(args) -> tuple[int, dict, str]:
    src = load(args.source, args.seed)
    if isinstance(src, Cfg):
        prog = gnf_to_program(to_gnf(src))
        target = args.target or "pseudo"
    elif isinstance(src, AutomatonSpec):
        if src.storage != "tape":
            raise UsageError("generate takes a program, a grammar or a Turing machine")
        if not args.word:
            raise UsageError("generating from a Turing machine needs at least one --word")
        words = [parse_word(w, src.alphabet) for w in args.word]
        try:
            prog = ta_to_typeof_program(tm_to_ta(src, words[0]), words=words)
        except ConversionError as exc:
            raise UsageError(f"generate: {exc}") from None
        target = args.target or "cpp"
    else:
        prog = src
        target = args.target or "cpp"
    try:
        text = emit(prog, EmitTarget(target, args.typeof_style))
    except UnsupportedFeature as exc:
        raise UsageError(f"generate: {exc}") from None
    return OK, {"target": target, "source": text}, text.rstrip("\n")


def cmd_verify(args) -> tuple[int, dict, str]:
    left, right = load(args.left, args.seed), load(args.right, args.seed)
    try:
        rep = verify_bisimulation(left, right, args.max_len, args.fuel, args.assume_unambiguous)
    except AlphabetMismatch as exc:
        raise UsageError(f"verify: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"verify: {exc}") from None
    d = rep.as_dict()
    lines = [
        f"words: {d['words']}  agreed: {d['agreed']}  accepted: {d['accepted']}  "
        f"mismatches: {len(d['mismatches'])}  fuel-exhausted: {len(d['fuel_exhausted'])}"
    ]
    for m in d["mismatches"][:20]:
        lines.append(f"mismatch {m['word'] or 'ε'}: left={m['left']} right={m['right']}")
    for w in d["fuel_exhausted"][:20]:
        lines.append(f"fuel-exhausted {w or 'ε'}")
    code = NEGATIVE if not rep.ok else FUEL if not rep.conclusive else OK
    return code, d, "\n".join(lines)


def cmd_fixtures(args) -> tuple[int, dict, str]:
    if args.name is None:
        rows = [
            {"name": f.name, "kind": f.kind, "summary": f.summary}
            for f in fx.catalog().values()
        ]
        text = "\n".join(f"{r['name']:<20} {r['kind']:<10} {r['summary']}" for r in rows)
        return OK, {"fixtures": rows}, text
    try:
        f = fx.get(args.name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    source = f.source or _source_text(f.value)
    result = {
        "name": f.name,
        "kind": f.kind,
        "summary": f.summary,
        "source": source,
        "positive": [" ".join(w) for w in f.positive],
        "negative": [" ".join(w) for w in f.negative],
    }
    if isinstance(f.value, TypeProgram):
        result["point"] = classify_program(f.value).as_dict()
    elif isinstance(f.value, AutomatonSpec):
        result["point"] = validate(f.value).point.as_dict()
    return OK, result, source.strip("\n")


# -- argument parsing -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=None, help="step budget (default 100000, or FORGE_FUEL)")
    common.add_argument("--max-len", type=int, default=8, help="longest word to enumerate (default 8)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for random:KIND sources")
    common.add_argument("--assume-unambiguous", action="store_true",
                        help="treat an ambiguous result as a type error")

    parser = argparse.ArgumentParser(
        prog="typeforge",
        description="Type-check programs, simulate automata and convert between them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run an automaton on a word")
    p.add_argument("automaton")
    p.add_argument("word")
    p.add_argument("--trace", action="store_true", help="print the run of a deterministic automaton")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("typecheck", parents=[common], help="type-check a word or an expression")
    p.add_argument("program")
    p.add_argument("word", nargs="?")
    p.add_argument("--expr", help="expression such as eps.a.b or f(eps, eps)")
    p.add_argument("--mode", choices=("one-type", "eventually-one-type", "multiple-types"))
    p.set_defaults(func=cmd_typecheck)

    p = sub.add_parser("convert", parents=[common], help="apply one conversion")
    p.add_argument("source")
    p.add_argument("--from", dest="source_kind", required=True,
                   choices=("tm", "ta", "fluent", "rudimentary", "program", "grammar"))
    p.add_argument("--to", required=True, choices=("ta", "dpda", "typeof-program", "dyadic"))
    p.add_argument("--word", action="append", help="input word for Turing machine conversions")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("gnf", parents=[common], help="Greibach normal form of a grammar")
    p.add_argument("grammar")
    p.add_argument("--program", action="store_true", help="also print the overloaded type program")
    p.add_argument("--mode", choices=("one-type", "eventually-one-type", "multiple-types"))
    p.set_defaults(func=cmd_gnf)

    p = sub.add_parser("generate", parents=[common], help="emit type definitions as source text")
    p.add_argument("source")
    p.add_argument("--target", choices=("java", "cpp", "pseudo"))
    p.add_argument("--typeof-style", choices=("decltype", "auto"), default="decltype")
    p.add_argument("--word", action="append", help="input word (Turing machine sources)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", parents=[common], help="compare two recognizers word by word")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fixtures", parents=[common], help="list fixtures or print one")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    try:
        if args.fuel is None:
            args.fuel = default_fuel()
        if args.fuel <= 0 or args.max_len < 0:
            raise UsageError("--fuel must be positive and --max-len non-negative")
        code, result, text = args.func(args)
    except UsageError as exc:
        print(f"typeforge {args.command}: {exc}", file=sys.stderr)
        if args.format == "json":
            print(json.dumps({"command": args.command, "status": "error", "exit_code": USAGE,
                              "error": str(exc)}))
        return USAGE
    if args.format == "json":
        print(json.dumps({"command": args.command, "status": STATUS[code], "exit_code": code,
                          "result": result}, ensure_ascii=False, sort_keys=True))
    elif text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
