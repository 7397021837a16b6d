"""Context-free grammars: Greibach normal form, the overloaded-type encoding,
and a chart-based membership oracle."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .terms import EPS, Term, chain, node, var
from .typesys import FunctionDef, TypeDecl, TypeProgram

RESERVED = ("$",)


@dataclass(frozen=True)
class Cfg:
    terminals: tuple[str, ...]
    variables: tuple[str, ...]
    start: str
    rules: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rules", tuple((l, tuple(r)) for l, r in self.rules))
        if set(self.terminals) & set(self.variables):
            raise ValueError(f"symbols used as terminal and variable: {sorted(set(self.terminals) & set(self.variables))}")
        for r in RESERVED:
            if r in self.terminals:
                raise ValueError(f"{r!r} is reserved and cannot be a terminal")
        if self.start not in self.variables:
            raise ValueError(f"start symbol {self.start!r} is not a variable")
        known = set(self.terminals) | set(self.variables)
        for lhs, rhs in self.rules:
            if lhs not in self.variables:
                raise ValueError(f"rule for undeclared variable {lhs!r}")
            for s in rhs:
                if s not in known:
                    raise ValueError(f"undeclared symbol {s!r} in a rule for {lhs}")

    def alternatives(self, v: str) -> list[tuple[str, ...]]:
        return [r for l, r in self.rules if l == v]


def _fresh(base: str, taken: set) -> str:
    if base not in taken:
        taken.add(base)
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    taken.add(f"{base}{i}")
    return f"{base}{i}"


def is_gnf(g: Cfg) -> bool:
    """Every rule is ``A -> a B1..Bk``; only the start may derive the empty
    word and the start never occurs on a right-hand side."""
    for lhs, rhs in g.rules:
        if g.start in rhs:
            return False
        if not rhs:
            if lhs != g.start:
                return False
            continue
        if rhs[0] not in g.terminals or any(s not in g.variables for s in rhs[1:]):
            return False
    return True


# -- membership oracle -------------------------------------------------------------


def nullable(g: Cfg) -> set[str]:
    out: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.rules:
            if lhs not in out and all(s in out for s in rhs):
                out.add(lhs)
                changed = True
    return out


def cyk_membership(g: Cfg, w: Sequence[str]) -> bool:
    """Chart parsing over spans, closed under empty and unit derivations.

    ``table[i][j]`` holds the variables deriving ``w[i:j]``; each span is
    completed to a fixpoint so no normal-form conversion is needed.
    """
    w = tuple(w)
    n = len(w)
    null = nullable(g)
    table = [[set() for _ in range(n + 1)] for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][i] = set(null)

    def ends(rhs: tuple[str, ...], i: int, j: int) -> bool:
        reach = {i}
        for s in rhs:
            nxt = set()
            for p in reach:
                if s in g.variables:
                    for q in range(p, j + 1):
                        if s in table[p][q]:
                            nxt.add(q)
                elif p < j and w[p] == s:
                    nxt.add(p + 1)
            reach = nxt
            if not reach:
                return False
        return j in reach

    for length in range(1, n + 1):
        for i in range(n - length + 1):
            j = i + length
            cell = table[i][j]
            changed = True
            while changed:
                changed = False
                for lhs, rhs in g.rules:
                    if lhs not in cell and ends(rhs, i, j):
                        cell.add(lhs)
                        changed = True
    return g.start in table[0][n]


def words_upto(alphabet: Sequence[str], max_len: int):
    for n in range(max_len + 1):
        yield from product(alphabet, repeat=n)


def enumerate_words(g: Cfg, max_len: int) -> list[tuple[str, ...]]:
    return [w for w in words_upto(g.terminals, max_len) if cyk_membership(g, w)]


# -- normal form ---------------------------------------------------------------------


def _dedupe(rules) -> list[tuple[str, tuple[str, ...]]]:
    return list(dict.fromkeys((l, tuple(r)) for l, r in rules))


def _trim(terminals, variables, start, rules):
    """Drop variables that derive nothing or cannot be reached from the start."""
    gen: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs not in gen and all(s in gen or s in terminals for s in rhs):
                gen.add(lhs)
                changed = True
    rules = [(l, r) for l, r in rules if l in gen and all(s in gen or s in terminals for s in r)]
    reach = {start}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs in reach:
                for s in rhs:
                    if s in variables and s not in reach:
                        reach.add(s)
                        changed = True
    rules = [(l, r) for l, r in rules if l in reach]
    kept = [v for v in variables if v in reach and (v in gen or v == start)]
    return kept, rules


def _merge_equal(variables, start, rules):
    """Identify non-start variables with identical alternatives, to a fixpoint."""
    while True:
        alts: dict[str, frozenset] = {v: frozenset() for v in variables}
        for lhs, rhs in rules:
            alts[lhs] = alts[lhs] | {rhs}
        seen: dict[frozenset, str] = {}
        ren: dict[str, str] = {}
        for v in variables:
            if v == start:
                continue
            if alts[v] in seen:
                ren[v] = seen[alts[v]]
            else:
                seen[alts[v]] = v
        if not ren:
            return variables, rules
        variables = [v for v in variables if v not in ren]
        rules = _dedupe(
            (l, tuple(ren.get(s, s) for s in r)) for l, r in rules if l not in ren
        )


def to_gnf(g: Cfg) -> Cfg:
    """Standard pipeline: fresh start, empty-rule and unit-rule elimination,
    left-recursion removal, then terminal-first substitution."""
    terms = set(g.terminals)
    taken = set(g.terminals) | set(g.variables) | set(RESERVED) | {"eps"}
    variables = list(g.variables)
    rules = _dedupe(g.rules)
    start = g.start
    if any(start in r for _, r in rules):
        new = _fresh(start + "0", taken)
        rules.append((new, (start,)))
        variables.insert(0, new)
        start = new
    variables, rules = _trim(terms, variables, start, rules)
    if start not in variables:
        return Cfg(g.terminals, (start,), start, ())

    # empty rules
    null = nullable(Cfg(g.terminals, tuple(variables), start, tuple(rules)))
    out = []
    for lhs, rhs in rules:
        opts = [((s,), ()) if s in null else ((s,),) for s in rhs]
        for pick in product(*opts):
            r = tuple(x for part in pick for x in part)
            if r or lhs == start:
                out.append((lhs, r))
    rules = _dedupe(r for r in out if r[1] or r[0] == start)
    keep_empty = start in null

    # unit rules
    unit = {v: {v} for v in variables}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if len(rhs) == 1 and rhs[0] in unit:
                for v in variables:
                    if lhs in unit[v] and rhs[0] not in unit[v]:
                        unit[v].add(rhs[0])
                        changed = True
    rules = _dedupe(
        (v, rhs)
        for v in variables
        for lhs, rhs in rules
        if lhs in unit[v] and not (len(rhs) == 1 and rhs[0] in unit) and (rhs or v == start)
    )
    if keep_empty and (start, ()) not in rules:
        rules.append((start, ()))
    variables, rules = _trim(terms, variables, start, rules)
    variables, rules = _merge_equal(variables, start, rules)

    # left recursion, with the start ordered first
    order = list(variables)
    by: dict[str, list[tuple[str, ...]]] = {v: [r for l, r in rules if l == v] for v in order}
    fresh_vars: list[str] = []
    for i, ai in enumerate(order):
        for aj in order[:i]:
            alts = []
            for r in by[ai]:
                if r and r[0] == aj:
                    alts.extend(s + r[1:] for s in by[aj])
                else:
                    alts.append(r)
            by[ai] = list(dict.fromkeys(alts))
        rec = [r[1:] for r in by[ai] if r and r[0] == ai]
        if rec:
            base = [r for r in by[ai] if not (r and r[0] == ai)]
            z = _fresh(f"{ai}_tail", taken)
            fresh_vars.append(z)
            by[ai] = list(dict.fromkeys(base + [b + (z,) for b in base if b]))
            by[z] = list(dict.fromkeys(rec + [a + (z,) for a in rec]))

    # every alternative of an ordered variable now starts with a terminal or a later variable
    for ai in reversed(order):
        alts = []
        for r in by[ai]:
            if r and r[0] in by and r[0] in order:
                alts.extend(s + r[1:] for s in by[r[0]])
            else:
                alts.append(r)
        by[ai] = list(dict.fromkeys(alts))
    for z in fresh_vars:
        alts = []
        for r in by[z]:
            if r and r[0] in order:
                alts.extend(s + r[1:] for s in by[r[0]])
            else:
                alts.append(r)
        by[z] = list(dict.fromkeys(alts))

    # terminals after the first position
    lift: dict[str, str] = {}
    final = []
    for v in order + fresh_vars:
        for r in by[v]:
            if not r:
                final.append((v, r))
                continue
            body = []
            for s in r[1:]:
                if s in terms:
                    if s not in lift:
                        lift[s] = _fresh(f"T_{s}", taken)
                    body.append(lift[s])
                else:
                    body.append(s)
            final.append((v, (r[0],) + tuple(body)))
    for t, v in lift.items():
        final.append((v, (t,)))
    allv = order + fresh_vars + list(lift.values())
    allv, final = _trim(terms, allv, start, _dedupe(final))
    allv, final = _merge_equal(allv, start, final)
    out_g = Cfg(g.terminals, tuple(allv), start, tuple(final))
    assert is_gnf(out_g), "normal form construction left a non-conforming rule"
    return out_g


# -- encoding as an overloaded type program -------------------------------------------


DOLLAR = "$"


def _stack(vs: Sequence[str], tail: Term) -> Term:
    return chain(vs, tail)


def gnf_to_program(g: Cfg, mode: str = "eventually-one-type") -> TypeProgram:
    """One monadic generic type per variable; the start variable is the unit
    type and ``$`` closes a word.

    ``S -> ε``       gives ``$ : eps -> eps``
    ``S -> a B..``   gives ``a : eps -> B..($(eps))`` and ``$ : $(eps) -> eps``
    ``A -> a B..``   gives ``a : A(x) -> B..x``
    """
    if not is_gnf(g):
        raise ValueError("grammar is not in Greibach normal form")
    for v in g.variables:
        if v in ("eps",) + RESERVED:
            raise ValueError(f"variable name {v!r} is reserved")
    xv = var("x")
    closed = node(DOLLAR, EPS)
    types = [TypeDecl(v, 1) for v in g.variables if v != g.start]
    types.append(TypeDecl(DOLLAR, 1))
    defs: list[FunctionDef] = []
    closing = False
    for lhs, rhs in g.rules:
        if lhs == g.start:
            if not rhs:
                defs.append(FunctionDef(DOLLAR, (EPS,), EPS))
            else:
                defs.append(FunctionDef(rhs[0], (EPS,), _stack(rhs[1:], closed)))
                closing = True
        else:
            defs.append(FunctionDef(rhs[0], (node(lhs, xv),), _stack(rhs[1:], xv)))
    if closing:
        defs.append(FunctionDef(DOLLAR, (closed,), EPS))
    return TypeProgram(tuple(types), tuple(defs), mode, suffix=(DOLLAR,), unit_index=0,
                       letters=g.terminals)


def lmd_type_sets(g: Cfg, prefix: Sequence[str]) -> set[Term]:
    """Types ``B..$`` over all leftmost derivations ``S =>* prefix B..``.

    The empty prefix gives the unit type.
    """
    if not prefix:
        return {EPS}
    first, rest = prefix[0], prefix[1:]
    forms: set[tuple[str, ...]] = set()
    for lhs, rhs in g.rules:
        if lhs == g.start and rhs and rhs[0] == first:
            forms.add(rhs[1:] + (DOLLAR,))
    for s in rest:
        nxt = set()
        for f in forms:
            if not f or f[0] == DOLLAR:
                continue
            for lhs, rhs in g.rules:
                if lhs == f[0] and rhs[0] == s:
                    nxt.add(rhs[1:] + f[1:])
        forms = nxt
    return {_stack(f[:-1], node(DOLLAR, EPS)) for f in forms}
