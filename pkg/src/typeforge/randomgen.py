"""Seeded generators of small programs, automata and grammars for property checks."""

from __future__ import annotations

import random

from .automata import AutomatonSpec, Item
from .grammar import Cfg
from .terms import EPS, RewriteRule, Signature, Term, chain, mk, node, overlap, var, variables
from .typesys import Call, FunctionDef, TypeDecl, TypeProgram


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _disjoint(pattern: Term, taken: list[Term]) -> bool:
    return not any(overlap(pattern, t) for t in taken)


# -- Fluent programs -----------------------------------------------------------------


def _monadic_pattern(rng: random.Random, names: list[str]) -> Term:
    syms = [rng.choice(names) for _ in range(rng.choice((0, 0, 1, 1, 2)))]
    tail = var("x") if rng.random() < 0.6 else EPS
    return chain(syms, tail)


def _monadic_result(rng: random.Random, names: list[str], has_var: bool) -> Term:
    syms = [rng.choice(names) for _ in range(rng.choice((0, 1, 1, 2, 3)))]
    tail = var("x") if has_var and rng.random() < 0.8 else EPS
    return chain(syms, tail)


def random_fluent_program(seed, max_types: int = 6, max_functions: int = 10,
                          letters: tuple[str, ...] = ("a", "b")) -> TypeProgram:
    """Monadic, deep, linear definitions with rudimentary typeof forwarding.

    Overloads of one name never overlap and auxiliary calls only go to
    later auxiliary functions, so every program terminates and is
    deterministic.
    """
    rng = _rng(seed)
    names = [f"g{i}" for i in range(1, rng.randint(1, max_types) + 1)]
    n_aux = rng.randint(0, 2)
    aux_names = [f"phi{i}" for i in range(1, n_aux + 1)]
    callers = list(letters) + aux_names
    budget = rng.randint(len(callers), max(len(callers), max_functions))
    defs: list[FunctionDef] = []
    taken: dict[str, list[Term]] = {}
    attempts = 0
    while len(defs) < budget and attempts < 200:
        attempts += 1
        owner = callers[len(defs)] if len(defs) < len(callers) else rng.choice(callers)
        pat = _monadic_pattern(rng, names)
        if not _disjoint(pat, taken.get(owner, [])):
            continue
        taken.setdefault(owner, []).append(pat)
        res = _monadic_result(rng, names, bool(variables(pat)))
        later = aux_names[aux_names.index(owner) + 1:] if owner in aux_names else aux_names
        if later and rng.random() < 0.35:
            ret = Call(rng.choice(later), (res,))
        else:
            ret = res
        defs.append(FunctionDef(owner, (pat,), ret, aux=owner in aux_names))
    types = tuple(TypeDecl(n, 1) for n in names)
    return TypeProgram(types, tuple(defs), "one-type", name=f"fluent-{rng.random():.6f}")


# -- rudimentary polyadic programs -----------------------------------------------------


def _shallow_pattern(rng: random.Random, sig: dict[str, int]) -> Term:
    r = rng.random()
    if r < 0.2:
        return var("x1")
    if r < 0.4:
        return EPS
    g = rng.choice(list(sig))
    return mk(g, [var(f"x{i}") for i in range(1, sig[g] + 1)])


def _term_over(rng: random.Random, sig: dict[str, int], vs: list[Term], depth: int) -> Term:
    if depth == 0 or rng.random() < 0.3:
        leaves = vs + [EPS]
        return rng.choice(leaves)
    g = rng.choice(list(sig))
    return mk(g, [_term_over(rng, sig, vs, depth - 1) for _ in range(sig[g])])


def random_rudimentary_program(seed, max_functions: int = 8,
                               letters: tuple[str, ...] = ("a", "b")) -> TypeProgram:
    """Shallow linear patterns over rank-1 and rank-2 types, typeof clauses with
    at most one call, non-overlapping overloads and acyclic auxiliary calls."""
    rng = _rng(seed)
    sig = {"g1": 1, "p": 2}
    if rng.random() < 0.5:
        sig["g2"] = rng.choice((1, 2))
    aux_names = [f"phi{i}" for i in range(1, rng.randint(0, 2) + 1)]
    callers = list(letters) + aux_names
    budget = rng.randint(len(callers), max(len(callers), max_functions))
    defs: list[FunctionDef] = []
    taken: dict[str, list[Term]] = {}
    attempts = 0
    while len(defs) < budget and attempts < 200:
        attempts += 1
        owner = callers[len(defs)] if len(defs) < len(callers) else rng.choice(callers)
        pat = _shallow_pattern(rng, sig)
        if not _disjoint(pat, taken.get(owner, [])):
            continue
        taken.setdefault(owner, []).append(pat)
        vs = [var(v) for v in variables(pat)]
        res = _term_over(rng, sig, vs, 2)
        later = aux_names[aux_names.index(owner) + 1:] if owner in aux_names else aux_names
        if later and rng.random() < 0.4:
            ret = Call(rng.choice(later), (res,))
        else:
            ret = res
        defs.append(FunctionDef(owner, (pat,), ret, aux=owner in aux_names))
    types = tuple(TypeDecl(g, r) for g, r in sig.items())
    return TypeProgram(types, tuple(defs), "one-type", name=f"rudimentary-{rng.random():.6f}")


# -- restricted tree automata ---------------------------------------------------------------


def random_restricted_ta(seed, letters: tuple[str, ...] = ("a", "b"),
                         max_items_per_letter: int = 3) -> AutomatonSpec:
    """Stateless, real-time and deterministic, with at most one storage node on
    every left-hand side."""
    rng = _rng(seed)
    sig = {"g": 1, "p": 2}
    if rng.random() < 0.5:
        sig["h"] = rng.choice((1, 2))
    delta = []
    for a in letters:
        taken: list[Term] = []
        for _ in range(rng.randint(1, max_items_per_letter)):
            pat = _shallow_pattern(rng, sig)
            if not _disjoint(pat, taken):
                continue
            taken.append(pat)
            vs = [var(v) for v in variables(pat)]
            if vs and pat.is_node and rng.random() < 0.4:
                rhs = rng.choice(vs)
            else:
                rhs = _term_over(rng, sig, vs, 2)
                if rhs.is_var and not pat.is_var:
                    rhs = node("g", rhs)
            delta.append(Item("q0", RewriteRule(pat, rhs), "q0", a))
    init = EPS if rng.random() < 0.6 else _term_over(rng, sig, [], 2)
    return AutomatonSpec(
        states=("q0",),
        initial="q0",
        accepting={"q0"},
        alphabet=letters,
        storage="tree",
        signature=Signature(sig),
        delta=tuple(delta),
        initial_storage=init,
        features=frozenset({"stateless", "real-time", "deterministic"}),
    )


# -- grammars ------------------------------------------------------------------------------


def random_cfg(seed, max_variables: int = 4, terminals: tuple[str, ...] = ("a", "b"),
               max_alternatives: int = 3, max_rhs: int = 3) -> Cfg:
    rng = _rng(seed)
    variables_ = ["S", "A", "B", "C"][: rng.randint(1, max_variables)]
    symbols = list(terminals) + variables_
    rules = []
    for v in variables_:
        for _ in range(rng.randint(1, max_alternatives)):
            n = rng.randint(0, max_rhs)
            rules.append((v, tuple(rng.choice(symbols) for _ in range(n))))
    rules = list(dict.fromkeys(rules))
    return Cfg(terminals, tuple(variables_), "S", tuple(rules))
