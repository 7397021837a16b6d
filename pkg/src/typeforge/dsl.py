"""Text formats for programs (``.typ``), automata (``.aut``) and grammars (``.cfg``).

Every parser reports errors with a line and column; every printer emits a
canonical form that parses back to an equal object.
"""

from __future__ import annotations

import json
import re

from .automata import AutomatonSpec, Item, TapeRule
from .terms import (
    BOTTOM,
    EPS,
    MalformedRank,
    MultiRule,
    RewriteRule,
    Signature,
    Term,
    TermParser,
    TermSyntaxError,
    parse_rule,
    parse_term,
    parse_terms,
    render,
)
from .typesys import Call, FunctionDef, TypeDecl, TypeProgram


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0] if not raw.lstrip().startswith("#!") else ""
        if line.strip():
            yield n, raw, line.rstrip()


def _col(raw: str, token: str) -> int:
    i = raw.find(token)
    return i + 1 if i >= 0 else 1


# -- expressions ------------------------------------------------------------------

_ETOKEN = re.compile(r"\s*(->|[(),.]|[^\s(),.]+)")


def _etokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _ETOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"bad character in expression: {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _ExprParser:
    """``eps.a.b``, ``f(e1, e2)``, ``(e1, e2).g`` and term receivers such as
    ``O(eps, a, a b).q0``.  ``NAME(`` is a call when NAME is a function."""

    def __init__(self, text: str, signature: Signature | None, functions: set):
        self.toks = _etokens(text)
        self.pos = 0
        self.sig = signature
        self.funcs = functions

    def peek(self, k: int = 0):
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def take(self, expected=None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise TermSyntaxError(f"expected {expected or 'more input'}, found {tok!r}")
        self.pos += 1
        return tok

    def parse(self):
        e = self.expr()
        if self.peek() is not None:
            raise TermSyntaxError(f"trailing input: {' '.join(self.toks[self.pos:])}")
        return e

    def expr(self):
        if self.peek() == "(":
            self.take("(")
            args = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.expr())
            self.take(")")
            if len(args) == 1 and self.peek() != ".":
                e = args[0]
            else:
                self.take(".")
                e = Call(self.take(), tuple(args))
        else:
            e = self.primary()
        while self.peek() == ".":
            self.take(".")
            e = Call(self.take(), (e,))
        return e

    def primary(self):
        tok = self.peek()
        if tok in self.funcs and self.peek(1) == "(":
            self.take()
            self.take("(")
            args = []
            if self.peek() != ")":
                args.append(self.expr())
                while self.peek() == ",":
                    self.take(",")
                    args.append(self.expr())
            self.take(")")
            return Call(tok, tuple(args) if args else (EPS,))
        tp = TermParser(self.toks, self.sig, stop=frozenset({"."}))
        tp.pos = self.pos
        t = tp.chain()
        self.pos = tp.pos
        return t


def parse_expr(text: str, signature: Signature | None = None, functions=()) -> Term | Call:
    return _ExprParser(text, signature, set(functions)).parse()


def render_expr(e) -> str:
    if isinstance(e, Term):
        return render(e)
    if len(e.args) == 1:
        inner = render_expr(e.args[0])
        return f"{inner}.{e.name}"
    return "(" + ", ".join(render_expr(a) for a in e.args) + f").{e.name}"


# -- programs ---------------------------------------------------------------------

_TYPE = re.compile(r"^type\s+(\S+?)\s*(?:/\s*(\d+)|\(([^)]*)\))?\s*(extern)?\s*$")
_DEF = re.compile(r"^(fn|aux)\s+(\S+)\s*:\s*(.*)$")


def parse_program(text: str) -> TypeProgram:
    entries = list(_lines(text))
    if not entries:
        raise DSLError("empty program")
    types: list[TypeDecl] = []
    unit_index = None
    funcs: set[str] = set()
    for n, raw, line in entries:
        s = line.strip()
        if s.startswith("type "):
            m = _TYPE.match(s)
            if not m:
                raise DSLError(f"bad type declaration {s!r}", n, 1)
            name, rank, params, extern = m.groups()
            if name == "eps":
                if unit_index is not None:
                    raise DSLError("eps declared twice", n, 1)
                unit_index = len(types)
                continue
            if params is not None:
                names = tuple(p.strip() for p in params.split(",") if p.strip())
                types.append(TypeDecl(name, len(names), names, bool(extern)))
            else:
                types.append(TypeDecl(name, int(rank or 0), (), bool(extern)))
        else:
            m = _DEF.match(s)
            if m:
                funcs.add(m.group(2))
    try:
        sig = Signature({t.name: t.rank for t in types})
    except ValueError as exc:
        raise DSLError(str(exc)) from None
    defs: list[FunctionDef] = []
    mode, prefix, suffix, exprs, base, goal = "one-type", [], [], [], EPS, None
    letters: list[str] = []
    name = ""
    for n, raw, line in entries:
        s = line.strip()
        word, _, rest = s.partition(" ")
        rest = rest.strip()
        try:
            if word == "type":
                continue
            if word in ("fn", "aux"):
                defs.append(_parse_def(s, sig, funcs))
            elif word == "mode":
                mode = rest
            elif word == "prefix":
                prefix.extend(rest.split())
            elif word == "suffix":
                suffix.extend(rest.split())
            elif word == "name":
                name = rest
            elif word == "letters":
                letters.extend(rest.split())
            elif word == "base":
                base = parse_term(rest, sig)
            elif word == "goal":
                goal = parse_term(rest, sig)
            elif word == "expr":
                exprs.append(parse_expr(rest, sig, funcs))
            else:
                raise DSLError(f"unknown directive {word!r}", n, 1)
        except DSLError:
            raise
        except (TermSyntaxError, MalformedRank, ValueError, KeyError) as exc:
            raise DSLError(str(exc), n, _col(raw, rest.split()[0] if rest.split() else word)) from None
    try:
        return TypeProgram(tuple(types), tuple(defs), mode, tuple(prefix), tuple(suffix),
                           tuple(exprs), unit_index, base=base, goal=goal, letters=tuple(letters), name=name)
    except ValueError as exc:
        raise DSLError(str(exc)) from None


def _parse_def(s: str, sig: Signature, funcs: set) -> FunctionDef:
    m = _DEF.match(s)
    if not m:
        raise DSLError(f"bad definition {s!r}")
    kind, name, body = m.groups()
    if " -> " not in f" {body} ".replace("->", " -> "):
        raise TermSyntaxError("a definition needs '->'")
    lhs, _, rhs = body.partition("->")
    params = tuple(parse_terms(lhs.strip(), sig))
    rhs = rhs.strip()
    if rhs.startswith("typeof "):
        ret = parse_expr(rhs[len("typeof "):], sig, funcs)
    else:
        ret = parse_term(rhs, sig)
    return FunctionDef(name, params, ret, aux=(kind == "aux"))


def print_program(p: TypeProgram) -> str:
    lines = []
    if p.name:
        lines.append(f"name {p.name}")
    decls = list(p.types)
    if p.unit_index is not None:
        decls.insert(p.unit_index, None)
    for d in decls:
        if d is None:
            lines.append("type eps")
            continue
        ext = " extern" if d.extern else ""
        if d.rank:
            lines.append(f"type {d.name}({', '.join(d.params)}){ext}")
        else:
            lines.append(f"type {d.name}{ext}")
    lines.append(f"mode {p.mode}")
    if p.prefix:
        lines.append("prefix " + " ".join(p.prefix))
    if p.suffix:
        lines.append("suffix " + " ".join(p.suffix))
    if p.letters:
        lines.append("letters " + " ".join(p.letters))
    if p.base is not EPS:
        lines.append(f"base {render(p.base)}")
    if p.goal is not None:
        lines.append(f"goal {render(p.goal)}")
    for d in p.defs:
        kind = "aux" if d.aux else "fn"
        params = ", ".join(render(t) for t in d.params)
        ret = f"typeof {render_expr(d.ret)}" if d.typeof else render(d.ret)
        lines.append(f"{kind} {d.name} : {params} -> {ret}")
    for e in p.exprs:
        lines.append(f"expr {render_expr(e)}")
    return "\n".join(lines) + "\n"


def programs_equal(a: TypeProgram, b: TypeProgram) -> bool:
    return (
        a.types == b.types
        and a.defs == b.defs
        and a.mode == b.mode
        and a.prefix == b.prefix
        and a.suffix == b.suffix
        and a.exprs == b.exprs
        and a.unit_index == b.unit_index
        and a.base is b.base
        and a.goal is b.goal
        and a.letters == b.letters
    )


# -- automata ----------------------------------------------------------------------

_DELTA = re.compile(
    r"^delta:\s*on\s+(\S+)\s+in\s+(\S+)(?:\s+children\s+(\S+))?(?:\s+rule\s+(.*?))?\s+goto\s+(\S+)\s*$"
)
_EPSILON = re.compile(r"^epsilon:\s*in\s+(\S+)(?:\s+rule\s+(.*?))?\s+goto\s+(\S+)\s*$")
_TAPE_RULE = re.compile(r"^(\S+)\s*->\s*(\S+?)([+-])?$")


def parse_tape_rule(text: str) -> TapeRule:
    m = _TAPE_RULE.match(text.strip())
    if not m:
        raise TermSyntaxError(f"bad tape rule {text!r}")
    read, write, move = m.groups()
    if read in ("_", "⊥"):
        if move:
            raise TermSyntaxError("a ⊥ rule does not move the head")
        return TapeRule(None, write, 0)
    if not move:
        raise TermSyntaxError("a tape rewrite must end in + or -")
    return TapeRule(read, write, 1 if move == "+" else -1)


def _print_tape_rule(r: TapeRule) -> str:
    return str(r)


def parse_automaton(text: str) -> AutomatonSpec:
    entries = list(_lines(text))
    if not entries:
        raise DSLError("empty automaton")
    header: dict = {"storage": "none", "features": [], "preload": False}
    ranks = None
    sig: dict[str, int] = {}
    body = []
    for n, raw, line in entries:
        s = line.strip()
        word, _, rest = s.partition(" ")
        rest = rest.strip()
        if word in ("delta:", "epsilon:") or s.startswith("delta:") or s.startswith("epsilon:"):
            body.append((n, raw, s))
            continue
        if word == "storage":
            parts = rest.split()
            header["storage"] = parts[0] if parts else ""
            if parts and parts[0] == "tape":
                header["tape_bound"] = parts[1] if len(parts) > 1 else None
        elif word == "preload":
            header["preload"] = True
        elif word == "blank":
            header["blank"] = rest
        elif word == "features":
            header["features"] = rest.split()
        elif word == "states":
            header["states"] = rest.split()
        elif word == "initial":
            header["initial"] = rest
        elif word == "accepting":
            header["accepting"] = rest.split()
        elif word == "alphabet":
            letters = rest.split()
            if any("/" in a for a in letters):
                ranks = {}
                for a in letters:
                    nm, _, r = a.partition("/")
                    ranks[nm] = int(r or 0)
                header["alphabet"] = list(ranks)
            else:
                header["alphabet"] = letters
        elif word in ("tree-alphabet", "stack-alphabet", "tape-alphabet"):
            for a in rest.split():
                nm, _, r = a.partition("/")
                sig[nm] = int(r) if r else 1
        elif word == "init-storage":
            header["init"] = (n, raw, rest)
        else:
            raise DSLError(f"unknown section {word!r}", n, 1)
    for key in ("states", "initial"):
        if key not in header:
            raise DSLError(f"missing {key} section")
    storage = header["storage"]
    signature = Signature(sig)
    delta, eps = [], []
    for n, raw, s in body:
        try:
            if s.startswith("delta:"):
                m = _DELTA.match(s)
                if not m:
                    raise DSLError(f"bad delta item {s!r}", n, 1)
                sym, src, kids, rule, dst = m.groups()
                r = _parse_item_rule(storage, rule, signature, kids is not None)
                source = tuple(kids.split(",")) if kids is not None else src
                if kids is not None and kids == "-":
                    source = ()
                delta.append(Item(source, r, dst, symbol=sym))
            else:
                m = _EPSILON.match(s)
                if not m:
                    raise DSLError(f"bad epsilon item {s!r}", n, 1)
                src, rule, dst = m.groups()
                eps.append(Item(src, _parse_item_rule(storage, rule, signature, False), dst))
        except DSLError:
            raise
        except (TermSyntaxError, MalformedRank, ValueError) as exc:
            raise DSLError(str(exc), n, _col(raw, "rule")) from None
    init = None
    if "init" in header:
        n, raw, rest = header["init"]
        try:
            init = parse_term(rest, signature if signature.symbols else None)
        except (TermSyntaxError, MalformedRank) as exc:
            raise DSLError(str(exc), n, _col(raw, rest)) from None
    try:
        return AutomatonSpec(
            states=tuple(header["states"]),
            initial=header["initial"],
            accepting=frozenset(header.get("accepting", ())),
            alphabet=tuple(header.get("alphabet", ())),
            storage=storage,
            signature=signature,
            delta=tuple(delta),
            epsilon=tuple(eps),
            initial_storage=init,
            tape_bound=header.get("tape_bound"),
            blank=header.get("blank", "♭"),
            preload=header["preload"],
            ranks=ranks,
            features=frozenset(header["features"]),
        )
    except ValueError as exc:
        raise DSLError(str(exc)) from None


def _parse_item_rule(storage: str, text: str | None, sig: Signature, forest: bool):
    if storage == "none":
        if text:
            raise TermSyntaxError("no-store automata take no rules")
        return None
    if text is None:
        raise TermSyntaxError("missing rule")
    if storage == "tape":
        return parse_tape_rule(text)
    use = sig if sig.symbols else None
    if forest:
        lhs, _, rhs = text.partition("->")
        if lhs.strip() in ("", "-"):
            pats: list[Term] = []
        else:
            pats = parse_terms(lhs.strip(), use)
        return MultiRule(tuple(pats), parse_term(rhs.strip(), use))
    return parse_rule(text, use)


def _rule_text(r) -> str:
    if r is None:
        return ""
    if isinstance(r, MultiRule):
        lhs = ", ".join(render(p) for p in r.lhs) if r.lhs else "-"
        return f"{lhs} -> {render(r.rhs)}"
    if isinstance(r, TapeRule):
        return str(r)
    lhs = "⊥" if r.lhs is BOTTOM else render(r.lhs)
    return f"{lhs} -> {render(r.rhs)}"


def print_automaton(a: AutomatonSpec) -> str:
    lines = []
    storage = a.storage
    if storage == "tape":
        storage += f" {a.tape_bound}"
    lines.append(f"storage {storage}")
    if a.preload:
        lines.append("preload")
    if a.storage == "tape" or a.blank != "♭":
        lines.append(f"blank {a.blank}")
    if a.features:
        lines.append("features " + " ".join(sorted(a.features)))
    lines.append("states " + " ".join(a.states))
    lines.append(f"initial {a.initial}")
    lines.append("accepting " + " ".join(q for q in a.states if q in a.accepting))
    if a.forest:
        lines.append("alphabet " + " ".join(f"{s}/{r}" for s, r in a.ranks.items()))
    else:
        lines.append("alphabet " + " ".join(a.alphabet))
    section = {"tree": "tree-alphabet", "pushdown": "stack-alphabet", "tape": "tape-alphabet"}.get(a.storage)
    if section and a.signature.symbols:
        if a.storage == "tree":
            lines.append(section + " " + " ".join(f"{s}/{r}" for s, r in a.signature.symbols.items()))
        else:
            lines.append(section + " " + " ".join(a.signature.symbols))
    if a.storage in ("tree", "pushdown") and a.initial_storage is not EPS:
        lines.append(f"init-storage {render(a.initial_storage)}")
    for it in a.delta:
        kids = ""
        src = it.source
        if a.forest:
            kids = " children " + (",".join(it.source) if it.source else "-")
            src = a.initial
        rule = f" rule {_rule_text(it.rule)}" if it.rule is not None else ""
        lines.append(f"delta: on {it.symbol} in {src}{kids}{rule} goto {it.target}")
    for it in a.epsilon:
        rule = f" rule {_rule_text(it.rule)}" if it.rule is not None else ""
        lines.append(f"epsilon: in {it.source}{rule} goto {it.target}")
    return "\n".join(lines) + "\n"


def automata_equal(a: AutomatonSpec, b: AutomatonSpec) -> bool:
    return a == b


def automaton_to_json(a: AutomatonSpec) -> dict:
    out = {
        "storage": a.storage,
        "states": list(a.states),
        "initial": a.initial,
        "accepting": [q for q in a.states if q in a.accepting],
        "alphabet": [f"{s}/{r}" for s, r in a.ranks.items()] if a.forest else list(a.alphabet),
        "features": sorted(a.features),
        "delta": [],
        "epsilon": [],
    }
    if a.storage == "tape":
        out["tape_bound"] = a.tape_bound
        out["blank"] = a.blank
        out["preload"] = a.preload
        out["tape-alphabet"] = list(a.signature.symbols)
    elif a.storage == "tree":
        out["tree-alphabet"] = [f"{s}/{r}" for s, r in a.signature.symbols.items()]
    elif a.storage == "pushdown":
        out["stack-alphabet"] = list(a.signature.symbols)
    if a.storage in ("tree", "pushdown"):
        out["init-storage"] = render(a.initial_storage)
    for it in a.delta:
        d = {"on": it.symbol, "in": a.initial if a.forest else it.source, "goto": it.target}
        if a.forest:
            d["children"] = list(it.source)
        if it.rule is not None:
            d["rule"] = _rule_text(it.rule)
        out["delta"].append(d)
    for it in a.epsilon:
        d = {"in": it.source, "goto": it.target}
        if it.rule is not None:
            d["rule"] = _rule_text(it.rule)
        out["epsilon"].append(d)
    return out


def automaton_from_json(data: dict | str) -> AutomatonSpec:
    if isinstance(data, str):
        data = json.loads(data)
    lines = []
    st = data["storage"]
    if st == "tape":
        st += f" {data.get('tape_bound', 'linear')}"
    lines.append(f"storage {st}")
    if data.get("preload"):
        lines.append("preload")
    if "blank" in data:
        lines.append(f"blank {data['blank']}")
    if data.get("features"):
        lines.append("features " + " ".join(data["features"]))
    lines.append("states " + " ".join(data["states"]))
    lines.append(f"initial {data['initial']}")
    lines.append("accepting " + " ".join(data.get("accepting", [])))
    lines.append("alphabet " + " ".join(data.get("alphabet", [])))
    for key in ("tree-alphabet", "stack-alphabet", "tape-alphabet"):
        if data.get(key):
            lines.append(f"{key} " + " ".join(data[key]))
    if "init-storage" in data:
        lines.append(f"init-storage {data['init-storage']}")
    for d in data.get("delta", []):
        kids = f" children {','.join(d['children']) if d['children'] else '-'}" if "children" in d else ""
        rule = f" rule {d['rule']}" if d.get("rule") else ""
        lines.append(f"delta: on {d['on']} in {d['in']}{kids}{rule} goto {d['goto']}")
    for d in data.get("epsilon", []):
        rule = f" rule {d['rule']}" if d.get("rule") else ""
        lines.append(f"epsilon: in {d['in']}{rule} goto {d['goto']}")
    return parse_automaton("\n".join(lines))


# -- grammars ------------------------------------------------------------------------


def parse_grammar(text: str):
    from .grammar import Cfg

    clean = "\n".join(line for _, _, line in _lines(text))
    if not clean.strip():
        raise DSLError("empty grammar")
    start = None
    rules: list[tuple[str, tuple[str, ...]]] = []
    terminals_decl = None
    variables_decl = None
    for stmt in clean.split(";"):
        s = stmt.strip()
        if not s:
            continue
        if s.startswith("start "):
            start = s[len("start "):].strip()
            continue
        if s.startswith("terminals "):
            terminals_decl = s[len("terminals "):].split()
            continue
        if s.startswith("variables "):
            variables_decl = s[len("variables "):].split()
            continue
        if "->" not in s:
            line = _line_of(text, s)
            raise DSLError(f"expected a rule, found {s!r}", line, 1)
        lhs, _, rhs = s.partition("->")
        lhs = lhs.strip()
        if not lhs or len(lhs.split()) != 1:
            raise DSLError(f"bad left-hand side {lhs!r}", _line_of(text, s), 1)
        for alt in rhs.split("|"):
            rules.append((lhs, tuple(alt.split())))
    if start is None:
        if not rules:
            raise DSLError("grammar has no rules and no start symbol")
        start = rules[0][0]
    variables = list(dict.fromkeys([start] + (variables_decl or []) + [l for l, _ in rules]))
    if terminals_decl is None:
        terminals = list(dict.fromkeys(s for _, r in rules for s in r if s not in variables))
    else:
        terminals = terminals_decl
    try:
        return Cfg(tuple(terminals), tuple(variables), start, tuple(rules))
    except ValueError as exc:
        raise DSLError(str(exc)) from None


def _line_of(text: str, fragment: str) -> int:
    first = fragment.split()[0] if fragment.split() else ""
    for n, raw in enumerate(text.splitlines(), 1):
        if first and first in raw:
            return n
    return 0


def print_grammar(g) -> str:
    lines = [f"start {g.start};"]
    implied = list(dict.fromkeys([g.start] + [l for l, _ in g.rules]))
    if implied != list(g.variables):
        lines.append("variables " + " ".join(g.variables) + ";")
    declared = list(dict.fromkeys(s for _, r in g.rules for s in r if s in g.terminals))
    if declared != list(g.terminals):
        lines.append("terminals " + " ".join(g.terminals) + ";")
    for v in g.variables:
        alts = [" ".join(r) for l, r in g.rules if l == v]
        if alts:
            lines.append(f"{v} -> " + " | ".join(alts) + " ;")
    return "\n".join(lines) + "\n"


def grammar_to_json(g) -> dict:
    return {
        "start": g.start,
        "terminals": list(g.terminals),
        "variables": list(g.variables),
        "rules": [{"lhs": l, "rhs": list(r)} for l, r in g.rules],
    }


def grammar_from_json(data: dict | str):
    from .grammar import Cfg

    if isinstance(data, str):
        data = json.loads(data)
    return Cfg(
        tuple(data["terminals"]),
        tuple(data["variables"]),
        data["start"],
        tuple((r["lhs"], tuple(r["rhs"])) for r in data["rules"]),
    )
