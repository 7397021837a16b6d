"""Conversions between automata and type programs."""

from __future__ import annotations

from dataclasses import dataclass

from .automata import AutomatonSpec, Item, TapeContents, TapeRule, validate
from .emit import mangle
from .terms import (
    BOTTOM,
    EPS,
    MultiRule,
    RewriteRule,
    Signature,
    Term,
    apply_rewrite,
    chain,
    follows,
    is_linear,
    mk,
    node,
    unchain,
    var,
)
from .typesys import (
    FLUENT,
    Call,
    FunctionDef,
    TypeDecl,
    TypeProgram,
    chain_expr,
    classify_program,
    typecheck,
)

JOIN = "∘"
BLANK = "♭"


class ConversionError(ValueError):
    pass


@dataclass(frozen=True)
class ConversionReport:
    source: dict
    target: dict
    states: int = 0
    transitions: int = 0
    definitions: int = 0
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "states": self.states,
            "transitions": self.transitions,
            "definitions": self.definitions,
            "notes": list(self.notes),
        }


def report(source, target) -> ConversionReport:
    def point(x) -> dict:
        if isinstance(x, AutomatonSpec):
            return {"kind": "automaton", **validate(x).point.as_dict()}
        return {"kind": "program", **classify_program(x).as_dict()}

    if isinstance(target, AutomatonSpec):
        return ConversionReport(point(source), point(target), len(target.states), len(target.items))
    return ConversionReport(point(source), point(target), definitions=len(target.defs))


# -- unary numbers --------------------------------------------------------------


def unary(k: int, zero: str = "Zero", succ: str = "Succ") -> Term:
    """Succ applied k times to Zero."""
    if k < 0:
        raise ValueError("unary numbers are non-negative")
    return chain([succ] * k, node(zero))


def from_unary(t: Term, zero: str = "Zero", succ: str = "Succ") -> int:
    syms, tail = unchain(t)
    if any(s != succ for s in syms) or tail is not node(zero):
        raise ValueError(f"{t} is not a unary number")
    return len(syms)


# -- Turing machines to tree automata -----------------------------------------


def tape_symbols(tm: AutomatonSpec) -> list[str]:
    syms = set(tm.signature.symbols) | {tm.blank}
    for it in tm.items:
        r = it.rule
        if isinstance(r, TapeRule):
            syms.add(r.write)
            if r.read is not None:
                syms.add(r.read)
    return sorted(syms, key=mangle)


def tape_tree(left: list[str], center: str, right: list[str]) -> Term:
    """``left`` lists the cells left of the head, nearest first."""
    return node(JOIN, chain(left), node(center, EPS), chain(right))


def tree_tape(t: Term) -> tuple[list[str], str, list[str]]:
    if not (t.is_node and t.head == JOIN and len(t.args) == 3):
        raise ValueError(f"{t} is not a tape tree")
    left, ltail = unchain(t.args[0])
    right, rtail = unchain(t.args[2])
    center, ctail = unchain(t.args[1])
    if ltail is not EPS or rtail is not EPS or ctail is not EPS or len(center) != 1:
        raise ValueError(f"{t} is not a tape tree")
    return left, center[0], right


def tape_view(tape: TapeContents, blank: str = BLANK) -> tuple[list[str], str, list[str]]:
    cells = list(tape.cells)
    h = tape.head
    cur = cells[h] if 0 <= h < len(cells) else blank
    left = [cells[i] for i in range(min(h, len(cells)) - 1, -1, -1)] if h > 0 else []
    if h > len(cells):
        left = [blank] * (h - len(cells)) + left
    right = cells[h + 1:] if h + 1 < len(cells) else []
    return left, cur, right


def _strip(cells: list[str], blank: str) -> list[str]:
    out = list(cells)
    while out and out[-1] == blank:
        out.pop()
    return out


def same_tape(tree: Term, tape: TapeContents, blank: str = BLANK) -> bool:
    """Whether a tape tree and a tape agree around the head (trailing blanks ignored)."""
    l1, c1, r1 = tree_tape(tree)
    l2, c2, r2 = tape_view(tape, blank)
    return c1 == c2 and _strip(l1, blank) == _strip(l2, blank) and _strip(r1, blank) == _strip(r2, blank)


def tm_to_ta(tm: AutomatonSpec, word) -> AutomatonSpec:
    """Tree automaton over a three-branch tape tree that runs ``tm`` on ``word``.

    Every moving transition becomes one ε item per possible neighbour cell
    (each tape symbol plus ``eps`` for the unexplored blank region).
    """
    if tm.storage != "tape":
        raise ConversionError("tm_to_ta needs a tape automaton")
    if tm.delta:
        raise ConversionError("tm_to_ta expects a preloaded machine without consuming items")
    word = list(word)
    syms = tape_symbols(tm)
    neighbours = sorted(syms + ["eps"], key=mangle)
    xL, xR = var("xL"), var("xR")
    items = []
    for it in tm.epsilon:
        r: TapeRule = it.rule
        if r.read is None:
            raise ConversionError("⊥ rules have no tape-tree counterpart")
        here = node(r.read, EPS)
        for nb in neighbours:
            if r.move > 0:
                if nb == "eps":
                    lhs = node(JOIN, xL, here, EPS)
                    rhs = node(JOIN, node(r.write, xL), node(tm.blank, EPS), EPS)
                else:
                    lhs = node(JOIN, xL, here, node(nb, xR))
                    rhs = node(JOIN, node(r.write, xL), node(nb, EPS), xR)
            else:
                if nb == "eps":
                    lhs = node(JOIN, EPS, here, xR)
                    rhs = node(JOIN, EPS, node(tm.blank, EPS), node(r.write, xR))
                else:
                    lhs = node(JOIN, node(nb, xL), here, xR)
                    rhs = node(JOIN, xL, node(nb, EPS), node(r.write, xR))
            items.append(Item(it.source, RewriteRule(lhs, rhs), it.target))
    if word:
        start = tape_tree([], word[0], word[1:])
    else:
        start = tape_tree([], tm.blank, [])
    sig = Signature({**{s: 1 for s in syms}, JOIN: 3})
    return AutomatonSpec(
        states=tm.states,
        initial=tm.initial,
        accepting=tm.accepting,
        alphabet=(),
        storage="tree",
        signature=sig,
        epsilon=tuple(items),
        initial_storage=start,
        meta={"word": tuple(word), "blank": tm.blank},
    )


def ta_to_typeof_program(ta: AutomatonSpec, words=None) -> TypeProgram:
    """One auxiliary function per state; each ε item becomes an overload whose
    return forwards to the target state's function."""
    if ta.storage != "tree" or ta.delta:
        raise ConversionError("expected an ε-only tree automaton over tape trees")
    if JOIN not in ta.signature or ta.signature.rank(JOIN) != 3:
        raise ConversionError(f"expected a rank-3 {JOIN} joiner")
    unary_syms = sorted((s for s, r in ta.signature.symbols.items() if s != JOIN), key=mangle)
    blank = ta.meta.get("blank", BLANK) if isinstance(ta.meta, dict) else BLANK
    xL, xR = var("xL"), var("xR")
    defs = []
    for q in ta.states:
        if q not in ta.accepting:
            continue
        centers = set()
        for it in ta.epsilon:
            if it.source == q and it.rule.lhs.is_node and it.rule.lhs.head == JOIN:
                centers.add(it.rule.lhs.args[1])
        for s in unary_syms:
            c = node(s, EPS)
            if c in centers:
                continue
            defs.append(FunctionDef(q, (node(JOIN, xL, c, xR),), EPS, aux=True))
    for it in ta.epsilon:
        defs.append(FunctionDef(it.source, (it.rule.lhs,), Call(it.target, (it.rule.rhs,)), aux=True))
    ordered = sorted(unary_syms + ["eps"], key=mangle)
    types = []
    for s in ordered:
        if s != "eps":
            types.append(TypeDecl(s, 1, ("x",)))
    types.append(TypeDecl(JOIN, 3, ("xL", "x", "xR")))
    unit_index = ordered.index("eps")
    if words is None:
        words = [ta.meta.get("word", ())] if isinstance(ta.meta, dict) else []
    exprs = []
    for w in words:
        w = list(w)
        start = tape_tree([], w[0], w[1:]) if w else tape_tree([], blank, [])
        exprs.append(Call(ta.initial, (start,)))
    return TypeProgram(tuple(types), tuple(defs), "one-type", (), (), tuple(exprs), unit_index,
                       name="turing", goal=EPS)


def turing_check(program: TypeProgram, initial: str, word, fuel: int, blank: str = BLANK):
    w = list(word)
    start = tape_tree([], w[0], w[1:]) if w else tape_tree([], blank, [])
    return typecheck(program, Call(initial, (start,)), fuel=fuel)


# -- typeof elimination and Fluent programs ---------------------------------------


def _state(phi: str) -> str:
    return f"q_{phi}"


def _encode_items(p: TypeProgram, rule_of) -> tuple[list[Item], list[Item], list[str]]:
    delta, eps = [], []
    states = ["q0"]
    for name in p.function_names:
        ds = p.overloads(name)
        if ds[0].aux:
            states.append(_state(name))
    for d in p.defs:
        if d.arity != 1:
            raise ConversionError(f"{d.name} is not a unary function")
        tau = d.params[0]
        if isinstance(d.ret, Call):
            if len(d.ret.args) != 1 or not isinstance(d.ret.args[0], Term):
                raise ConversionError(f"{d.name}: typeof clause with more than one call")
            callee = d.ret.name
            if not p.overloads(callee) or not p.overloads(callee)[0].aux:
                raise ConversionError(f"{d.name}: typeof forwards to non-auxiliary {callee}")
            tau2, target = d.ret.args[0], _state(callee)
        else:
            tau2, target = d.ret, "q0"
        rule = rule_of(tau, tau2)
        if d.aux:
            eps.append(Item(_state(d.name), rule, target))
        else:
            delta.append(Item(d.name, rule, target, symbol=d.name))
    # consuming items start in q0
    delta = [Item("q0", it.rule, it.target, it.symbol) for it in delta]
    return delta, eps, states


def rudimentary_to_ta(p: TypeProgram) -> AutomatonSpec:
    """Primary functions become consuming items, auxiliary ones ε items."""
    pt = classify_program(p)
    if pt.typeof == "full":
        raise ConversionError("full typeof has no tree-automaton counterpart here")
    if p.prefix or p.suffix:
        raise ConversionError("framing calls are handled by program_to_ta")
    delta, eps, states = _encode_items(p, RewriteRule)
    return AutomatonSpec(
        states=tuple(states),
        initial="q0",
        accepting={"q0"},
        alphabet=tuple(p.alphabet),
        storage="tree",
        signature=p.signature,
        delta=tuple(delta),
        epsilon=tuple(eps),
        initial_storage=p.base,
    )


def program_to_ta(p: TypeProgram) -> AutomatonSpec:
    """Tree automaton whose runs mirror the checker on ``prefix · w · suffix``.

    Prefix calls are folded into the initial tree; suffix calls become an ε
    chain into a fresh accepting state.
    """
    if p.mode != "one-type":
        raise ConversionError("only one-type programs correspond to tree automata")
    base = p.base
    if p.prefix:
        res = typecheck(p, chain_expr(p.prefix, p.base))
        if res.kind != "typed":
            raise ConversionError(f"prefix calls do not type: {res}")
        base = res.type
    framing = set(p.prefix) | set(p.suffix)
    core = TypeProgram(p.types, [d for d in p.defs if d.name not in framing], p.mode)
    delta, eps, states = _encode_items(core, RewriteRule)
    accepting = {"q0"}
    prev = "q0"
    if p.suffix:
        for i, name in enumerate(p.suffix):
            nxt = "accept" if i == len(p.suffix) - 1 else f"end{i + 1}"
            for d in p.overloads(name):
                if d.typeof or d.arity != 1:
                    raise ConversionError(f"suffix call {name} must be a direct unary definition")
                eps.append(Item(prev, RewriteRule(d.params[0], d.ret), nxt))
            states.append(nxt)
            prev = nxt
        accepting = {"accept"}
    if p.goal is not None:
        eps.append(Item(prev if p.suffix else "q0", RewriteRule(p.goal, p.goal), "goal"))
        states.append("goal")
        accepting = {"goal"}
    return AutomatonSpec(
        states=tuple(states),
        initial="q0",
        accepting=accepting,
        alphabet=tuple(p.alphabet),
        storage="tree",
        signature=p.signature,
        delta=tuple(delta),
        epsilon=tuple(eps),
        initial_storage=base,
    )


MARK = "⊥"
_GARBAGE = var("_rest")


def _fluent_stack(t: Term, constants: set) -> tuple[list[str], Term | None]:
    syms, tail = unchain(t)
    if tail is EPS:
        return syms + [MARK], None
    if tail.is_node and not tail.args:
        return syms + [tail.head], None
    if tail.is_var:
        return syms, tail
    raise ConversionError(f"{t} is not monadic")


def fluent_rule(tau: Term, tau2: Term, constants: set = frozenset()) -> RewriteRule:
    """Stack rewrite for a monadic definition ``tau -> tau2``.

    A ground type ends in a marker (``⊥`` for eps, or its constant) so that
    stale cells below it are never read.
    """
    s1, v1 = _fluent_stack(tau, constants)
    s2, v2 = _fluent_stack(tau2, constants)
    if v1 is not None and v2 is not None:
        return RewriteRule(chain(s1, v1), chain(s2, v2))
    if v1 is None and v2 is None:
        return RewriteRule(chain(s1, _GARBAGE), chain(s2, _GARBAGE))
    if v1 is not None:
        return RewriteRule(chain(s1, v1), chain(s2, v1))
    raise ConversionError(f"invalid definition {tau} -> {tau2}")


def decode_fluent_stack(stack: Term) -> Term:
    syms, _ = unchain(stack)
    out: list[str] = []
    for s in syms:
        if s == MARK:
            return chain(out)
        out.append(s)
    raise ValueError("stack has no marker")


def fluent_to_dpda(p: TypeProgram) -> AutomatonSpec:
    """Deterministic pushdown automaton for a program at the Fluent point."""
    pt = classify_program(p)
    if not pt <= FLUENT:
        raise ConversionError(f"program is above the Fluent point: {pt.as_dict()}")
    if p.prefix or p.suffix or p.base is not EPS:
        raise ConversionError("framing calls and start types are not part of the Fluent encoding")
    constants = {t.name for t in p.types if t.rank == 0}
    delta, eps, states = _encode_items(p, lambda a, b: fluent_rule(a, b, constants))
    symbols = {t.name: 1 for t in p.types}
    symbols[MARK] = 1
    spec = AutomatonSpec(
        states=tuple(states),
        initial="q0",
        accepting={"q0"},
        alphabet=tuple(p.alphabet),
        storage="pushdown",
        signature=Signature(symbols),
        delta=tuple(delta),
        epsilon=tuple(eps),
        initial_storage=node(MARK, EPS),
        features=frozenset({"deterministic"}),
    )
    return spec


# -- stateless tree automata to pushdown automata ------------------------------------


def _restricted_lhs(t: Term) -> bool:
    if t.is_var or t.is_eps:
        return True
    if t.is_node:
        return all(a.is_var for a in t.args) and is_linear(t)
    return False


def _pending(q: str, sym: str) -> str:
    return f"{q}~{sym}"


def _inter(q: str, i: int) -> str:
    return f"<{q},{i}>"


def ta_to_dpda(ta: AutomatonSpec) -> AutomatonSpec:
    """Pushdown automaton whose stack holds the rewrites that built the tree.

    Stack symbols are rules; the bottom one is ``⊥ -> t0``.  Accumulating
    rewrites are pushed, extracting ones pop down to the child they select.
    ``meta["stack_rules"]`` maps stack symbol names to rules.
    """
    if ta.storage not in ("tree", "pushdown") or ta.forest:
        raise ConversionError("ta_to_dpda needs a word-input tree automaton")
    for it in ta.items:
        if not _restricted_lhs(it.rule.lhs):
            raise ConversionError(f"rule {it.rule} has more than one storage node on its left")
    reduce_items: list[tuple[str, RewriteRule, str]] = []
    delta: list[Item] = []
    states = list(ta.states)
    keep = RewriteRule(var("x"), var("x"))
    for it in ta.delta:
        p = _pending(it.source, it.symbol)
        if p not in states:
            states.append(p)
            delta.append(Item(it.source, None, p, it.symbol))
        reduce_items.append((p, it.rule, it.target))
    for it in ta.epsilon:
        reduce_items.append((it.source, it.rule, it.target))

    names: dict[RewriteRule, str] = {}
    order: list[RewriteRule] = []

    def sym(r: RewriteRule) -> str:
        if r not in names:
            names[r] = f"r{len(order)}"
            order.append(r)
        return names[r]

    sym(RewriteRule(BOTTOM, ta.initial_storage))
    x = var("x")
    trans: list[tuple[str, str, Term, str]] = []  # (state, top, new-top-chain-over-x, target)
    inter_needed: set[tuple[str, int]] = set()
    done_inter: set[tuple[str, int, str]] = set()

    def extract(top: RewriteRule, k: int, dest: str) -> tuple[Term, str] | None:
        t = top.rhs
        if not t.is_node or len(t.args) < k:
            return None
        child = t.args[k - 1]
        if not child.is_var:
            return node(sym(RewriteRule(top.lhs, child)), x), dest
        if top.lhs.is_var:
            return x, dest
        i = top.lhs.args.index(child) + 1
        inter_needed.add((dest, i))
        return x, _inter(dest, i)

    done_reduce: set[tuple[int, str]] = set()
    progress = True
    while progress:
        progress = False
        for top in list(order):
            name = names[top]
            for n, (src, r, dst) in enumerate(reduce_items):
                if (n, name) in done_reduce:
                    continue
                done_reduce.add((n, name))
                progress = True
                if r.accumulating:
                    if r.lhs.is_var and r.rhs is r.lhs:
                        trans.append((src, name, node(name, x), dst))
                    elif follows(top, r):
                        trans.append((src, name, node(sym(r), node(name, x)), dst))
                    continue
                lhs = r.lhs
                if top.rhs.is_node and top.rhs.head == lhs.head and len(top.rhs.args) == len(lhs.args):
                    res = extract(top, lhs.args.index(r.rhs) + 1, dst)
                    if res is not None:
                        trans.append((src, name, res[0], res[1]))
            for dest, k in sorted(inter_needed):
                if (dest, k, name) in done_inter:
                    continue
                done_inter.add((dest, k, name))
                progress = True
                res = extract(top, k, dest)
                if res is not None:
                    trans.append((_inter(dest, k), name, res[0], res[1]))

    for d, k in sorted(inter_needed):
        if _inter(d, k) not in states:
            states.append(_inter(d, k))
    eps = []
    seen = set()
    for src, top, new, dst in trans:
        it = Item(src, RewriteRule(node(top, x), new), dst)
        if it not in seen:
            seen.add(it)
            eps.append(it)
    sig = Signature({names[r]: 1 for r in order})
    spec = AutomatonSpec(
        states=tuple(states),
        initial=ta.initial,
        accepting=ta.accepting,
        alphabet=ta.alphabet,
        storage="pushdown",
        signature=sig,
        delta=tuple(Item(it.source, keep, it.target, it.symbol) for it in delta),
        epsilon=tuple(eps),
        initial_storage=node("r0", EPS),
        meta={"stack_rules": {names[r]: r for r in order}},
    )
    return spec


def decode_rule_stack(dpda: AutomatonSpec, stack: Term) -> Term:
    """Fold the stacked rewrites from the bottom to recover the encoded tree."""
    table = dpda.meta["stack_rules"]
    syms, tail = unchain(stack)
    if tail is not EPS:
        raise ValueError("malformed stack")
    t: Term | None = None
    for name in reversed(syms):
        r = table[name]
        if r.lhs is BOTTOM:
            t = r.rhs
        else:
            t = apply_rewrite(r, t)
            if t is None:
                raise ValueError(f"stack rule {name} does not apply to the tree below it")
    if t is None:
        raise ValueError("empty stack")
    return t


# -- polyadic to dyadic --------------------------------------------------------------


def _split_name(name: str, i: int) -> str:
    return f"{name}_{i}"


def dyadic_term(t: Term, wide: dict[str, int]) -> Term:
    if not t.is_node or not t.args:
        return t
    args = [dyadic_term(a, wide) for a in t.args]
    k = wide.get(t.head)
    if k is None:
        return mk(t.head, args)
    out = node(_split_name(t.head, k), args[-1])
    for i in range(k - 1, 0, -1):
        out = node(_split_name(t.head, i), args[i - 1], out)
    return out


def polyadic_to_dyadic(ta: AutomatonSpec) -> AutomatonSpec:
    """Replace every symbol of rank k > 2 by a right spine of k-1 binary symbols
    closed by a unary one."""
    wide = {s: r for s, r in ta.signature.symbols.items() if r > 2}
    if not wide:
        return ta
    symbols = {s: r for s, r in ta.signature.symbols.items() if r <= 2}
    for s, k in wide.items():
        for i in range(1, k):
            symbols[_split_name(s, i)] = 2
        symbols[_split_name(s, k)] = 1
    if len(symbols) != len(ta.signature.symbols) - len(wide) + sum(wide.values()):
        raise ConversionError("fresh symbol names collide with existing ones")

    def conv(r):
        if isinstance(r, MultiRule):
            return MultiRule(tuple(dyadic_term(p, wide) for p in r.lhs), dyadic_term(r.rhs, wide))
        if isinstance(r, RewriteRule):
            lhs = r.lhs if r.lhs.is_bottom else dyadic_term(r.lhs, wide)
            return RewriteRule(lhs, dyadic_term(r.rhs, wide))
        return r

    init = ta.initial_storage
    if isinstance(init, Term):
        init = dyadic_term(init, wide)
    return AutomatonSpec(
        states=ta.states,
        initial=ta.initial,
        accepting=ta.accepting,
        alphabet=ta.alphabet,
        storage=ta.storage,
        signature=Signature(symbols),
        delta=tuple(Item(it.source, conv(it.rule), it.target, it.symbol) for it in ta.delta),
        epsilon=tuple(Item(it.source, conv(it.rule), it.target) for it in ta.epsilon),
        initial_storage=init,
        tape_bound=ta.tape_bound,
        blank=ta.blank,
        preload=ta.preload,
        ranks=ta.ranks,
        features=ta.features,
        meta={k: v for k, v in ta.meta.items() if not k.startswith("_")} if isinstance(ta.meta, dict) else {},
    )
