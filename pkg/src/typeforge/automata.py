"""Finite-control automata with an optional auxiliary store.

One data type covers the whole family: no store, pushdown (a rank-1 tree with
``eps`` at the bottom), tree store, and tape.  Runs are explored breadth
first over instantaneous descriptions, so deterministic and
non-deterministic machines share one engine.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .terms import (
    EPS,
    MultiRule,
    RewriteRule,
    Signature,
    Term,
    apply_multi_rewrite,
    apply_rewrite,
    is_linear,
    overlap,
    root_key,
)

DEFAULT_FUEL = 100_000
DEFAULT_CONFIG_CAP = 10_000

STORAGE_KINDS = ("none", "pushdown", "tree", "tape")


@dataclass(frozen=True)
class TapeRule:
    """``read -> write`` followed by a head move of +1, -1 or 0.

    ``read`` is ``None`` for the ``⊥ -> γ`` form that only fires on an
    undefined cell.
    """

    read: str | None
    write: str
    move: int = 0

    def __post_init__(self) -> None:
        if self.move not in (-1, 0, 1):
            raise ValueError("tape moves are -1, 0 or +1")
        if self.read is None and self.move != 0:
            raise ValueError("a ⊥ rule writes without moving")
        if self.read is not None and self.move == 0:
            raise ValueError("a tape rewrite must move the head")

    def __str__(self) -> str:
        if self.read is None:
            return f"_ -> {self.write}"
        return f"{self.read} -> {self.write}{'+' if self.move > 0 else '-'}"


@dataclass(frozen=True)
class TapeContents:
    head: int
    cells: tuple[str, ...]

    def read(self) -> str | None:
        if 0 <= self.head < len(self.cells):
            return self.cells[self.head]
        return None

    def __str__(self) -> str:
        cells = list(self.cells)
        return f"{self.head}:{' '.join(cells) if cells else '∅'}"


@dataclass(frozen=True)
class Item:
    """A consuming item (``symbol`` set) or an ε item (``symbol`` is None).

    In forest mode ``source`` is a tuple of child states and ``rule`` is a
    :class:`MultiRule`.
    """

    source: str | tuple[str, ...]
    rule: RewriteRule | TapeRule | MultiRule | None
    target: str
    symbol: str | None = None

    @property
    def consuming(self) -> bool:
        return self.symbol is not None


@dataclass(frozen=True)
class AutomatonSpec:
    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    alphabet: tuple[str, ...]
    storage: str = "none"
    signature: Signature = field(default_factory=Signature)
    delta: tuple[Item, ...] = ()
    epsilon: tuple[Item, ...] = ()
    initial_storage: Term | TapeContents | None = None
    tape_bound: str | None = None
    blank: str = "♭"
    preload: bool = False
    ranks: Mapping[str, int] | None = None  # forest mode: ranked input alphabet
    features: frozenset[str] = frozenset()
    meta: Mapping = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "delta", tuple(self.delta))
        object.__setattr__(self, "epsilon", tuple(self.epsilon))
        object.__setattr__(self, "features", frozenset(self.features))
        if self.ranks is not None:
            object.__setattr__(self, "ranks", dict(self.ranks))
        if self.storage not in STORAGE_KINDS:
            raise ValueError(f"unknown storage {self.storage!r}")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial} is not declared")
        if not self.accepting <= set(self.states):
            raise ValueError("accepting states must be declared states")
        if self.storage == "tape" and self.tape_bound not in ("linear", "unbounded"):
            raise ValueError("tape storage needs a bound: linear or unbounded")
        if self.initial_storage is None:
            object.__setattr__(self, "initial_storage", _default_storage(self.storage))
        if self.storage == "pushdown":
            bad = [s for s, r in self.signature.symbols.items() if r != 1]
            if bad:
                raise ValueError(f"pushdown symbols must have rank 1: {bad}")
        for it in self.delta:
            if it.symbol is None:
                raise ValueError("consuming items need a symbol")
            if self.forest:
                if len(it.source) != self.ranks.get(it.symbol, -1):
                    raise ValueError(f"item on {it.symbol} has wrong number of child states")
            elif it.symbol not in self.alphabet:
                raise ValueError(f"symbol {it.symbol} not in the alphabet")
            self._check_rule(it)
        for it in self.epsilon:
            if it.symbol is not None:
                raise ValueError("ε items carry no symbol")
            self._check_rule(it)

    def _check_rule(self, it: Item) -> None:
        for q in ([it.source] if isinstance(it.source, str) else list(it.source)) + [it.target]:
            if q not in self.states:
                raise ValueError(f"undeclared state {q}")
        r = it.rule
        if self.storage == "none":
            if r is not None:
                raise ValueError("no-store automata carry no rules")
        elif self.storage == "tape":
            if not isinstance(r, TapeRule):
                raise ValueError("tape automata need tape rules")
        elif self.forest and it.consuming:
            if not isinstance(r, MultiRule):
                raise ValueError("forest items need multi-input rules")
        elif not isinstance(r, RewriteRule):
            raise ValueError("tree and pushdown automata need rewrite rules")

    @property
    def forest(self) -> bool:
        return self.ranks is not None

    @property
    def items(self) -> tuple[Item, ...]:
        return self.delta + self.epsilon

    @property
    def rules(self) -> list:
        return [it.rule for it in self.items if it.rule is not None]


def _default_storage(kind: str):
    if kind in ("pushdown", "tree"):
        return EPS
    if kind == "tape":
        return TapeContents(0, ())
    return None


@dataclass(frozen=True)
class ID:
    """Instantaneous description: input position, state and storage."""

    pos: int
    state: str
    storage: object


@dataclass(frozen=True)
class RunOutcome:
    kind: str  # accept | reject | fuel-exhausted
    reason: str | None = None
    final: ID | None = None
    steps: int = 0
    path: tuple[ID, ...] | None = None

    @property
    def accepted(self) -> bool:
        return self.kind == "accept"

    @property
    def exhausted(self) -> bool:
        return self.kind == "fuel-exhausted"

    def __str__(self) -> str:
        if self.kind == "reject":
            return f"reject ({self.reason})"
        return self.kind


ACCEPT = "accept"
REJECT = "reject"
EXHAUSTED = "fuel-exhausted"


# -- lattice point ------------------------------------------------------------


@dataclass(frozen=True)
class LatticePointA:
    states: str
    storage: str
    recognizer: str
    epsilon: str
    determinism: str
    multiplicity: str
    depth: str

    ORDER = {
        "states": ("stateless", "stateful"),
        "storage": (
            "no-store",
            "pushdown-store",
            "tree-store",
            "linearly-bounded-tape-store",
            "unbounded-tape-store",
        ),
        "recognizer": ("language-recognizer", "forest-recognizer"),
        "epsilon": ("real-time", "ε-transitions"),
        "determinism": ("deterministic", "deterministic-at-end", "non-deterministic"),
        "multiplicity": ("linear-rewrite", "non-linear-rewrite"),
        "depth": ("shallow-rewrite", "deep-rewrite"),
    }

    def __le__(self, other: "LatticePointA") -> bool:
        for name, order in self.ORDER.items():
            if order.index(getattr(self, name)) > order.index(getattr(other, name)):
                return False
        return True

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.ORDER}


@dataclass(frozen=True)
class Validation:
    point: LatticePointA
    diagnostics: tuple[str, ...]
    conflicts: tuple[tuple[Item, Item], ...] = ()

    @property
    def deterministic(self) -> bool:
        return self.point.determinism == "deterministic"

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def _lhs_of(rule) -> tuple:
    if isinstance(rule, MultiRule):
        return rule.lhs
    if isinstance(rule, RewriteRule):
        return (rule.lhs,)
    return ()


def _rules_overlap(spec: AutomatonSpec, a: Item, b: Item) -> bool:
    if spec.storage == "none":
        return True
    if spec.storage == "tape":
        ra, rb = a.rule, b.rule
        # an undefined cell reads as blank, so ⊥ and blank rules collide
        def reads(r: TapeRule) -> set:
            return {None, spec.blank} if r.read is None or r.read == spec.blank else {r.read}

        return bool(reads(ra) & reads(rb))
    la, lb = _lhs_of(a.rule), _lhs_of(b.rule)
    if len(la) != len(lb):
        return True
    return all(_lhs_overlap(x, y) for x, y in zip(la, lb))


def _lhs_overlap(x: Term, y: Term) -> bool:
    if x.is_bottom or y.is_bottom:
        return True
    return overlap(x, y)


def nondeterministic_pairs(spec: AutomatonSpec) -> list[tuple[Item, Item]]:
    """Pairs of distinct items that can fire on one instantaneous description."""
    by_state: dict = {}
    for it in spec.items:
        by_state.setdefault(it.source, []).append(it)
    out = []
    for items in by_state.values():
        uniq = list(dict.fromkeys(items))
        for a, b in itertools.combinations(uniq, 2):
            if a.consuming and b.consuming and a.symbol != b.symbol:
                continue
            if _rules_overlap(spec, a, b):
                out.append((a, b))
    return out


def validate(spec: AutomatonSpec) -> Validation:
    """Compute the least lattice point of ``spec`` and report violated declared features."""
    stateless = len(spec.states) == 1 and spec.accepting == {spec.initial}
    storage = {
        "none": "no-store",
        "pushdown": "pushdown-store",
        "tree": "tree-store",
        "tape": "linearly-bounded-tape-store" if spec.tape_bound == "linear" else "unbounded-tape-store",
    }[spec.storage]
    conflicts = nondeterministic_pairs(spec)
    linear = shallow = True
    for r in spec.rules:
        for lhs in _lhs_of(r):
            if not lhs.is_bottom:
                linear &= is_linear(lhs)
                shallow &= lhs.depth <= 1
    point = LatticePointA(
        states="stateless" if stateless else "stateful",
        storage=storage,
        recognizer="forest-recognizer" if spec.forest else "language-recognizer",
        epsilon="ε-transitions" if spec.epsilon else "real-time",
        determinism="non-deterministic" if conflicts else "deterministic",
        multiplicity="linear-rewrite" if linear else "non-linear-rewrite",
        depth="shallow-rewrite" if shallow else "deep-rewrite",
    )
    diags = []
    declared = spec.features
    checks = {
        "stateless": point.states == "stateless",
        "real-time": point.epsilon == "real-time",
        "deterministic": point.determinism == "deterministic",
        "linear-rewrite": point.multiplicity == "linear-rewrite",
        "shallow-rewrite": point.depth == "shallow-rewrite",
    }
    for feat, holds in checks.items():
        if feat in declared and not holds:
            diags.append(f"declared {feat} but the automaton is not")
    if "deterministic" in declared and conflicts:
        for a, b in conflicts[:5]:
            diags.append(f"items {_item_text(a)} and {_item_text(b)} can fire together")
    return Validation(point, tuple(diags), tuple(conflicts))


def _item_text(it: Item) -> str:
    on = f"on {it.symbol} " if it.symbol is not None else "ε "
    return f"<{on}in {it.source} rule {it.rule} goto {it.target}>"


# -- run semantics ----------------------------------------------------------------


class _Index:
    """Items bucketed by (state, symbol) and by the root label their rule needs."""

    def __init__(self, spec: AutomatonSpec):
        self.spec = spec
        self.by_key: dict = {}
        for it in spec.items:
            bucket = self.by_key.setdefault((it.source, it.symbol), ({}, []))
            key = self._rule_key(it.rule)
            if key is None:
                bucket[1].append(it)
            else:
                bucket[0].setdefault(key, []).append(it)

    def _rule_key(self, rule) -> str | None:
        if isinstance(rule, RewriteRule) and not rule.lhs.is_bottom:
            return root_key(rule.lhs)
        if isinstance(rule, TapeRule):
            return None
        return None

    def candidates(self, state, symbol, storage) -> list[Item]:
        bucket = self.by_key.get((state, symbol))
        if bucket is None:
            return []
        keyed, wild = bucket
        if not keyed:
            return wild
        if isinstance(storage, Term):
            hit = keyed.get(root_key(storage), [])
            return hit + wild if wild else hit
        return [it for lst in keyed.values() for it in lst] + wild


def _index(spec: AutomatonSpec) -> _Index:
    idx = spec.meta.get("_index") if isinstance(spec.meta, dict) else None
    if idx is None or idx.spec is not spec:
        idx = _Index(spec)
        if isinstance(spec.meta, dict):
            spec.meta["_index"] = idx
    return idx


def apply_storage(spec: AutomatonSpec, rule, storage, n: int):
    """Apply one item's rule to the storage; ``None`` when it does not apply or the
    machine would hang."""
    if spec.storage == "none":
        return storage
    if spec.storage == "tape":
        return _apply_tape(spec, rule, storage, n)
    return apply_rewrite(rule, storage)


def _apply_tape(spec: AutomatonSpec, rule: TapeRule, tape: TapeContents, n: int):
    h = tape.head
    if h < 0 or (spec.tape_bound == "linear" and h > n):
        return None
    cur = tape.read()
    if rule.read is None:
        if cur is not None:
            return None
    elif (cur if cur is not None else spec.blank) != rule.read:
        return None
    cells = list(tape.cells)
    if h >= len(cells):
        cells.extend([spec.blank] * (h + 1 - len(cells)))
    cells[h] = rule.write
    return TapeContents(h + rule.move, tuple(cells))


def initial_id(spec: AutomatonSpec, word: Sequence[str]) -> ID:
    if spec.storage == "tape" and spec.preload:
        return ID(len(word), spec.initial, TapeContents(0, tuple(word)))
    return ID(0, spec.initial, spec.initial_storage)


def step(spec: AutomatonSpec, ident: ID, word: Sequence[str]) -> list[ID]:
    """All successors of ``ident``: consuming moves on the next letter plus ε moves."""
    idx = _index(spec)
    out: list[ID] = []
    n = len(word)
    if ident.pos < n:
        sym = word[ident.pos]
        for it in idx.candidates(ident.state, sym, ident.storage):
            new = apply_storage(spec, it.rule, ident.storage, n)
            if new is not None:
                out.append(ID(ident.pos + 1, it.target, new))
    for it in idx.candidates(ident.state, None, ident.storage):
        new = apply_storage(spec, it.rule, ident.storage, n)
        if new is not None:
            out.append(ID(ident.pos, it.target, new))
    return list(dict.fromkeys(out))


def epsilon_defined(spec: AutomatonSpec, ident: ID, word: Sequence[str]) -> bool:
    idx = _index(spec)
    for it in idx.candidates(ident.state, None, ident.storage):
        if apply_storage(spec, it.rule, ident.storage, len(word)) is not None:
            return True
    return False


def _word(word) -> tuple[str, ...]:
    if isinstance(word, str):
        return tuple(word)
    return tuple(word)


def run(
    spec: AutomatonSpec,
    word: Sequence[str] | str,
    fuel: int = DEFAULT_FUEL,
    config_cap: int = DEFAULT_CONFIG_CAP,
    trace: bool = False,
) -> RunOutcome:
    """Decide ``word``.  Accept needs the input consumed, an accepting state and no
    ε move at the final description."""
    if spec.forest:
        raise ValueError("use run_forest for forest recognizers")
    word = _word(word)
    n = len(word)
    start = initial_id(spec, word)
    parent: dict[ID, ID | None] = {start: None}
    frontier = deque([start])
    spent = 0
    reached_end = False
    while frontier:
        cur = frontier.popleft()
        if cur.pos == n:
            reached_end = True
        succ = step(spec, cur, word)
        if cur.pos == n and cur.state in spec.accepting:
            if not any(s.pos == cur.pos for s in succ):
                path = _path(parent, cur) if trace else None
                return RunOutcome(ACCEPT, None, cur, spent, path)
        for s in succ:
            spent += 1
            if spent > fuel:
                return RunOutcome(EXHAUSTED, "fuel", cur, spent)
            if s in parent:
                continue
            parent[s] = cur
            if len(parent) > config_cap:
                return RunOutcome(EXHAUSTED, "configuration-cap", cur, spent)
            frontier.append(s)
    return RunOutcome(REJECT, "non-accepting-state" if reached_end else "hang", None, spent)


def _path(parent: dict, last: ID) -> tuple[ID, ...]:
    out = []
    cur: ID | None = last
    while cur is not None:
        out.append(cur)
        cur = parent[cur]
    return tuple(reversed(out))


def trace_run(spec: AutomatonSpec, word, fuel: int = DEFAULT_FUEL) -> list[ID]:
    """The unique run of a deterministic automaton on ``word`` (until it stops)."""
    word = _word(word)
    cur = initial_id(spec, word)
    out = [cur]
    for _ in range(fuel):
        succ = step(spec, cur, word)
        if not succ:
            return out
        if len(succ) > 1:
            raise ValueError(f"run branches at {cur}")
        cur = succ[0]
        out.append(cur)
    raise RuntimeError("fuel exhausted while tracing")


def accepts(spec: AutomatonSpec, word, fuel: int = DEFAULT_FUEL) -> bool:
    return run(spec, word, fuel).accepted


def words_upto(alphabet: Sequence[str], max_len: int) -> Iterable[tuple[str, ...]]:
    """All words of length <= max_len in length-lexicographic order."""
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


@dataclass(frozen=True)
class Enumeration:
    accepted: list
    exhausted: list


def enumerate_accepted(spec: AutomatonSpec, max_len: int, fuel: int = DEFAULT_FUEL) -> Enumeration:
    acc, ex = [], []
    for w in words_upto(spec.alphabet, max_len):
        out = run(spec, w, fuel)
        if out.accepted:
            acc.append(w)
        elif out.exhausted:
            ex.append(w)
    return Enumeration(acc, ex)


# -- forest recognizers -------------------------------------------------------


def run_forest(spec: AutomatonSpec, tree: Term, fuel: int = DEFAULT_FUEL,
               config_cap: int = DEFAULT_CONFIG_CAP) -> RunOutcome:
    """Bottom-up run over an input tree; children are visited left to right.

    Each node's value is the set of reachable (state, storage) pairs; ε items
    close every set.  Input leaves are ``eps`` or rank-0 symbols.
    """
    if not spec.forest:
        raise ValueError("not a forest recognizer")
    budget = [fuel]

    def spend() -> None:
        budget[0] -= 1
        if budget[0] < 0:
            raise _OutOfFuel

    def close(pairs: set) -> set:
        todo = list(pairs)
        while todo:
            q, st = todo.pop()
            for it in spec.epsilon:
                if it.source != q:
                    continue
                new = apply_rewrite(it.rule, st)
                if new is not None:
                    spend()
                    pair = (it.target, new)
                    if pair not in pairs:
                        pairs.add(pair)
                        if len(pairs) > config_cap:
                            raise _OutOfFuel
                        todo.append(pair)
        return pairs

    def visit(t: Term) -> set:
        label = "eps" if t.is_eps else t.head
        kids = [visit(c) for c in t.args]
        out: set = set()
        for it in spec.delta:
            if it.symbol != label or len(it.source) != len(kids):
                continue
            options = [[p for p in kid if p[0] == q] for q, kid in zip(it.source, kids)]
            for combo in itertools.product(*options):
                new = apply_multi_rewrite(it.rule, [p[1] for p in combo])
                if new is not None:
                    spend()
                    out.add((it.target, new))
        return close(out)

    try:
        pairs = visit(tree)
    except _OutOfFuel:
        return RunOutcome(EXHAUSTED, "fuel", None, fuel)
    used = fuel - budget[0]
    for q, st in sorted(pairs, key=lambda p: (p[0], str(p[1]))):
        if q in spec.accepting:
            return RunOutcome(ACCEPT, None, ID(0, q, st), used)
    return RunOutcome(REJECT, "hang" if not pairs else "non-accepting-state", None, used)


class _OutOfFuel(Exception):
    pass
