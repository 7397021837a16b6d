"""Ranked trees, patterns with variables, matching and root rewriting.

Terms are hash-consed: every structurally distinct term exists exactly once
in the process-wide store, so ``a is b`` (and ``a == b``) is a constant-time
structural equality test.  Ground subterms are shared, which keeps the
doubling types of non-linear programs linear in size.
"""

from __future__ import annotations

import re
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

EPS_KIND = 0
VAR_KIND = 1
NODE_KIND = 2
BOT_KIND = 3


class MalformedRank(ValueError):
    pass


class Term:
    """An interned term.  Build instances through :func:`node`, :func:`var` or the
    module constants, never directly."""

    __slots__ = ("kind", "head", "args", "depth", "ground", "__weakref__")

    kind: int
    head: str
    args: tuple["Term", ...]
    depth: int
    ground: bool

    def __init__(self, kind: int, head: str, args: tuple["Term", ...]):
        self.kind = kind
        self.head = head
        self.args = args
        if kind == NODE_KIND and args:
            self.depth = 1 + max(a.depth for a in args)
            self.ground = all(a.ground for a in args)
        else:
            self.depth = 0
            self.ground = kind != VAR_KIND

    @property
    def is_var(self) -> bool:
        return self.kind == VAR_KIND

    @property
    def is_eps(self) -> bool:
        return self.kind == EPS_KIND

    @property
    def is_node(self) -> bool:
        return self.kind == NODE_KIND

    @property
    def is_bottom(self) -> bool:
        return self.kind == BOT_KIND

    @property
    def rank(self) -> int:
        return len(self.args)

    def __repr__(self) -> str:
        return f"Term({render(self)!r})"

    def __str__(self) -> str:
        return render(self)

    def __reduce__(self):
        # re-intern on unpickle so identity equality survives process hops
        if self.kind == NODE_KIND:
            return (node, (self.head, *self.args))
        if self.kind == VAR_KIND:
            return (var, (self.head,))
        if self.kind == EPS_KIND:
            return (_eps, ())
        return (_bottom, ())


class TermStore:
    """Content-addressed store.  Children are already interned, so the key
    ``(kind, head, args)`` hashes and compares in time linear in the arity."""

    def __init__(self) -> None:
        self._table: dict[tuple, Term] = {}
        self._lock = threading.Lock()

    def make(self, kind: int, head: str, args: tuple[Term, ...]) -> Term:
        key = (kind, head, args)
        found = self._table.get(key)
        if found is not None:
            return found
        with self._lock:
            found = self._table.get(key)
            if found is None:
                found = Term(kind, head, args)
                self._table[key] = found
            return found

    def __len__(self) -> int:
        return len(self._table)


STORE = TermStore()

EPS = STORE.make(EPS_KIND, "eps", ())
BOTTOM = STORE.make(BOT_KIND, "⊥", ())


def _eps() -> Term:
    return EPS


def _bottom() -> Term:
    return BOTTOM


def var(name: str) -> Term:
    return STORE.make(VAR_KIND, name, ())


def node(head: str, *args: Term) -> Term:
    return STORE.make(NODE_KIND, head, tuple(args))


def mk(head: str, args: Iterable[Term]) -> Term:
    return STORE.make(NODE_KIND, head, tuple(args))


def chain(symbols: Iterable[str], tail: Term = EPS) -> Term:
    """Monadic abbreviation: ``chain("abc")`` is ``a(b(c(eps)))``."""
    result = tail
    for s in reversed(list(symbols)):
        result = node(s, result)
    return result


def unchain(t: Term) -> tuple[list[str], Term]:
    """Split a monadic term into its symbol prefix and its non-unary tail."""
    syms: list[str] = []
    while t.kind == NODE_KIND and len(t.args) == 1:
        syms.append(t.head)
        t = t.args[0]
    return syms, t


def intern(value) -> Term:
    """Return the interned handle for a term or a nested-tuple description.

    Nested tuples use ``("g", child, ...)`` for nodes, ``"eps"`` for the leaf
    and ``("?x",)`` for variables.
    """
    if isinstance(value, Term):
        return value
    if value == "eps":
        return EPS
    if isinstance(value, tuple):
        head, *rest = value
        if head.startswith("?") and not rest:
            return var(head[1:])
        return mk(head, (intern(r) for r in rest))
    if isinstance(value, str):
        return node(value)
    raise TypeError(f"cannot intern {value!r}")


def subterms(t: Term) -> Iterator[Term]:
    """Distinct subterms, each yielded once (shared nodes are not revisited)."""
    seen: set[int] = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        if id(cur) in seen:
            continue
        seen.add(id(cur))
        yield cur
        stack.extend(cur.args)


def distinct_nodes(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def variables(t: Term) -> Counter:
    """Occurrence multiset of variables (counts every occurrence)."""
    out: Counter = Counter()
    if t.ground:
        return out
    stack = [t]
    while stack:
        cur = stack.pop()
        if cur.kind == VAR_KIND:
            out[cur.head] += 1
        elif not cur.ground:
            stack.extend(cur.args)
    return out


def var_order(terms: Iterable[Term]) -> list[str]:
    """Variable names in first-occurrence (left to right, pre-order) order."""
    out: list[str] = []
    seen: set[str] = set()

    def walk(t: Term) -> None:
        if t.ground:
            return
        if t.kind == VAR_KIND:
            if t.head not in seen:
                seen.add(t.head)
                out.append(t.head)
            return
        for a in t.args:
            walk(a)

    for t in terms:
        walk(t)
    return out


def is_linear(t: Term) -> bool:
    return all(c == 1 for c in variables(t).values())


def root_key(t: Term) -> str | None:
    """Root label used for dispatch; ``None`` for a variable (matches anything)."""
    if t.kind == VAR_KIND:
        return None
    if t.kind == EPS_KIND:
        return "eps"
    if t.kind == BOT_KIND:
        return "⊥"
    return t.head


@dataclass(frozen=True)
class Signature:
    """Ranked alphabet.  Ranks are usually >= 1; rank-0 constants (e.g. ``Zero``)
    are accepted as extra leaves besides ``eps``."""

    symbols: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", dict(self.symbols))
        for name, rank in self.symbols.items():
            if name == "eps":
                raise ValueError("eps is implicit and cannot be declared")
            if rank < 0:
                raise ValueError(f"negative rank for {name}")

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.symbols.items())))

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def rank(self, name: str) -> int:
        return self.symbols[name]

    @property
    def max_rank(self) -> int:
        return max(self.symbols.values(), default=0)

    def check(self, t: Term) -> None:
        for sub in subterms(t):
            if sub.kind != NODE_KIND:
                continue
            if sub.head not in self.symbols:
                raise MalformedRank(f"undeclared symbol {sub.head}")
            if self.symbols[sub.head] != len(sub.args):
                raise MalformedRank(
                    f"{sub.head} has rank {self.symbols[sub.head]} but {len(sub.args)} children"
                )

    def merged(self, other: "Signature") -> "Signature":
        out = dict(self.symbols)
        for k, v in other.symbols.items():
            if out.get(k, v) != v:
                raise MalformedRank(f"conflicting ranks for {k}")
            out[k] = v
        return Signature(out)


def signature_of(terms: Iterable[Term]) -> Signature:
    out: dict[str, int] = {}
    for t in terms:
        for sub in subterms(t):
            if sub.kind == NODE_KIND:
                if out.get(sub.head, len(sub.args)) != len(sub.args):
                    raise MalformedRank(f"{sub.head} used with two ranks")
                out[sub.head] = len(sub.args)
    return Signature(out)


@dataclass(frozen=True)
class TermInfo:
    depth: int
    linear: bool
    grounded: bool
    vars: Counter


def analyze_term(t: Term, signature: Signature | None = None) -> TermInfo:
    if signature is not None:
        signature.check(t)
    vs = variables(t)
    return TermInfo(t.depth, all(c == 1 for c in vs.values()), t.ground, vs)


# -- matching and substitution ------------------------------------------------

Substitution = Mapping[str, Term]


def match(pattern: Term, subject: Term, bindings: dict | None = None) -> dict | None:
    """One-sided matching.  Returns the substitution or ``None``.

    Repeated variables must bind identical (interned) subtrees.  Variables in
    ``subject`` are treated as opaque constants.
    """
    s: dict = {} if bindings is None else bindings
    if _match(pattern, subject, s):
        return s
    return None


def _match(p: Term, t: Term, s: dict) -> bool:
    if p.ground:
        return p is t
    if p.kind == VAR_KIND:
        bound = s.get(p.head)
        if bound is None:
            s[p.head] = t
            return True
        return bound is t
    if t.kind != NODE_KIND or p.head != t.head or len(p.args) != len(t.args):
        return False
    for pa, ta in zip(p.args, t.args):
        if not _match(pa, ta, s):
            return False
    return True


def match_all(patterns: Iterable[Term], subjects: Iterable[Term]) -> dict | None:
    """Match several patterns under one shared substitution."""
    s: dict = {}
    patterns = tuple(patterns)
    subjects = tuple(subjects)
    if len(patterns) != len(subjects):
        return None
    for p, t in zip(patterns, subjects):
        if not _match(p, t, s):
            return None
    return s


def apply_substitution(t: Term, s: Substitution) -> Term:
    if t.ground or not s:
        return t
    if t.kind == VAR_KIND:
        return s.get(t.head, t)
    return STORE.make(NODE_KIND, t.head, tuple(apply_substitution(a, s) for a in t.args))


def is_grounded(s: Substitution) -> bool:
    return all(v.ground for v in s.values())


# -- rewrite rules --------------------------------------------------------------


@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        if self.lhs.kind == BOT_KIND:
            if not self.rhs.ground:
                raise ValueError("a bottom rule must produce a ground tree")
            return
        missing = set(variables(self.rhs)) - set(variables(self.lhs))
        if missing:
            raise ValueError(
                f"invalid rule {render(self.lhs)} -> {render(self.rhs)}: "
                f"variables {sorted(missing)} do not occur on the left"
            )

    @property
    def depth(self) -> int:
        return self.lhs.depth

    @property
    def shallow(self) -> bool:
        return self.lhs.depth <= 1

    @property
    def linear(self) -> bool:
        return is_linear(self.lhs)

    @property
    def extracting(self) -> bool:
        return self.rhs.kind == VAR_KIND and self.lhs.kind != VAR_KIND

    @property
    def accumulating(self) -> bool:
        return not self.extracting

    def apply(self, subject: Term) -> Term | None:
        return apply_rewrite(self, subject)

    def __str__(self) -> str:
        return f"{render(self.lhs)} -> {render(self.rhs)}"


@dataclass(frozen=True)
class MultiRule:
    """Rule with several inputs sharing one substitution (forest recognizers)."""

    lhs: tuple[Term, ...]
    rhs: Term

    def __post_init__(self) -> None:
        object.__setattr__(self, "lhs", tuple(self.lhs))
        have: set[str] = set()
        for p in self.lhs:
            have |= set(variables(p))
        missing = set(variables(self.rhs)) - have
        if missing:
            raise ValueError(f"variables {sorted(missing)} do not occur on the left")

    def __str__(self) -> str:
        return ", ".join(render(p) for p in self.lhs) + " -> " + render(self.rhs)


def apply_rewrite(rule: RewriteRule, subject: Term) -> Term | None:
    if rule.lhs.kind == BOT_KIND:
        return rule.rhs
    s = match(rule.lhs, subject)
    if s is None:
        return None
    return apply_substitution(rule.rhs, s)


def apply_multi_rewrite(rule: MultiRule, subjects: Iterable[Term]) -> Term | None:
    subjects = tuple(subjects)
    if len(subjects) != len(rule.lhs):
        raise ValueError("arity mismatch between rule and subjects")
    s = match_all(rule.lhs, subjects)
    if s is None:
        return None
    return apply_substitution(rule.rhs, s)


def rename(t: Term, mapping: Mapping[str, str]) -> Term:
    return apply_substitution(t, {k: var(v) for k, v in mapping.items()})


def canonicalize(rule: RewriteRule) -> RewriteRule:
    """Rename variables to x1, x2, ... in first-occurrence order over the lhs."""
    order = var_order([rule.lhs])
    mapping = {old: f"x{i}" for i, old in enumerate(order, 1)}
    return RewriteRule(rename(rule.lhs, mapping), rename(rule.rhs, mapping))


def follows(earlier: RewriteRule, later: RewriteRule) -> bool:
    """Whether ``later`` is applicable to every tree produced by ``earlier``.

    Both rules must be accumulating with lhs holding at most one storage node;
    applicability is then decided by the root of earlier's rhs alone.
    """
    for r in (earlier, later):
        if r.extracting:
            raise ValueError(f"{r} is extracting")
        if r.lhs.depth > 1 or not _single_node_lhs(r.lhs):
            raise ValueError(f"{r} has more than one storage node on its left")
    if later.lhs.kind == VAR_KIND:
        return True
    if earlier.rhs.kind == VAR_KIND:
        # degenerate x -> x: nothing is known about the tree
        return False
    return root_key(earlier.rhs) == root_key(later.lhs)


def _single_node_lhs(t: Term) -> bool:
    if t.kind in (VAR_KIND, EPS_KIND, BOT_KIND):
        return True
    return all(a.kind == VAR_KIND for a in t.args) and is_linear(t)


def overlap(p: Term, q: Term) -> bool:
    """Whether two patterns (read with disjoint variables) can match one tree.

    Exact for linear patterns; non-linear constraints are ignored, which can
    only over-report overlap.
    """
    if p.kind == VAR_KIND or q.kind == VAR_KIND:
        return True
    if p.kind != q.kind:
        return False
    if p.kind != NODE_KIND:
        return True
    if p.head != q.head or len(p.args) != len(q.args):
        return False
    return all(overlap(a, b) for a, b in zip(p.args, q.args))


# -- text syntax --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(->|[(),]|[^\s(),]+)")
_VARLIKE = re.compile(r"^x\w*$")


class TermSyntaxError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    out: list[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"bad character at {pos}: {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class TermParser:
    """Recursive-descent parser over a token list.

    With a signature, undeclared identifiers are variables and bare symbols
    take their declared rank (rank 1 at the end of a chain means ``(eps)``).
    Without one, identifiers shaped like ``x``/``x1``/``xL`` are variables and
    every other bare symbol is unary over ``eps``.
    """

    def __init__(self, tokens: list[str], signature: Signature | None = None, stop: frozenset = frozenset()):
        self.toks = tokens
        self.pos = 0
        self.sig = signature
        self.stop = stop

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise TermSyntaxError("unexpected end of term")
        if expected is not None and tok != expected:
            raise TermSyntaxError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def at_atom(self) -> bool:
        tok = self.peek()
        return tok is not None and tok not in ("(", ")", ",", "->") and tok not in self.stop

    def is_var_name(self, name: str) -> bool:
        if name in ("eps", "𝛜"):
            return False
        if self.sig is not None:
            return name not in self.sig
        return bool(_VARLIKE.match(name))

    def chain(self) -> Term:
        prefix: list[str] = []
        while True:
            if not self.at_atom():
                raise TermSyntaxError(f"expected a term, found {self.peek()!r}")
            name = self.take()
            if self.peek() == "(":
                return chain(prefix, self.compound(name))
            if name in ("eps", "𝛜"):
                return chain(prefix, EPS)
            if self.is_var_name(name):
                return chain(prefix, var(name))
            rank = self.sig.rank(name) if self.sig is not None else 1
            if rank == 0:
                return chain(prefix, node(name))
            if rank != 1:
                raise MalformedRank(f"{name} has rank {rank} and needs arguments")
            prefix.append(name)
            if not self.at_atom():
                return chain(prefix, EPS)

    def compound(self, name: str) -> Term:
        if self.is_var_name(name) and self.sig is not None:
            raise MalformedRank(f"undeclared symbol {name}")
        self.take("(")
        args = [self.chain()]
        while self.peek() == ",":
            self.take(",")
            args.append(self.chain())
        self.take(")")
        if self.sig is not None and self.sig.rank(name) != len(args):
            raise MalformedRank(f"{name} has rank {self.sig.rank(name)} but {len(args)} children")
        return mk(name, args)


def parse_term(text: str, signature: Signature | None = None) -> Term:
    p = TermParser(tokenize(text), signature)
    t = p.chain()
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input: {' '.join(p.toks[p.pos:])}")
    return t


def parse_rule(text: str, signature: Signature | None = None) -> RewriteRule:
    toks = tokenize(text)
    if toks.count("->") != 1:
        raise TermSyntaxError(f"a rule needs exactly one '->': {text!r}")
    i = toks.index("->")
    lhs_toks, rhs_toks = toks[:i], toks[i + 1:]
    if lhs_toks == ["⊥"] or lhs_toks == ["_"]:
        lhs = BOTTOM
    else:
        lp = TermParser(lhs_toks, signature)
        lhs = lp.chain()
        if lp.peek() is not None:
            raise TermSyntaxError(f"trailing input in lhs of {text!r}")
    rp = TermParser(rhs_toks, signature)
    rhs = rp.chain()
    if rp.peek() is not None:
        raise TermSyntaxError(f"trailing input in rhs of {text!r}")
    return RewriteRule(lhs, rhs)


def parse_terms(text: str, signature: Signature | None = None) -> list[Term]:
    """Comma-separated list of terms."""
    p = TermParser(tokenize(text), signature)
    out = [p.chain()]
    while p.peek() == ",":
        p.take(",")
        out.append(p.chain())
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input: {' '.join(p.toks[p.pos:])}")
    return out


def render(t: Term) -> str:
    if t.kind == EPS_KIND:
        return "eps"
    if t.kind in (VAR_KIND, BOT_KIND):
        return t.head
    if not t.args:
        return t.head
    if len(t.args) == 1:
        syms, tail = unchain(t)
        return " ".join(syms) + " " + render(tail)
    return f"{t.head}(" + ", ".join(render(a) for a in t.args) + ")"
