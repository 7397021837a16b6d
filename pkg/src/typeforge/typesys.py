"""Generic type programs and their checker.

A program is a list of type declarations plus overloaded function
definitions.  Each definition has one parameter pattern per argument and
returns either a type term or a ``typeof`` pseudo-expression.  The checker
works on sets of types, which gives all three overloading modes from one
evaluator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence, Union

from .terms import (
    EPS,
    Signature,
    Term,
    apply_substitution,
    is_linear,
    match_all,
    root_key,
    variables,
)

MODES = ("one-type", "eventually-one-type", "multiple-types")
MODE_ALIASES = {
    "one-type": "one-type",
    "one": "one-type",
    "eventually-one-type": "eventually-one-type",
    "eventually-one": "eventually-one-type",
    "multiple-types": "multiple-types",
    "multi": "multiple-types",
    "multiple": "multiple-types",
}

DEFAULT_FUEL = 100_000
DEFAULT_SET_CAP = 1 << 16


def normalize_mode(mode: str) -> str:
    try:
        return MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown overloading mode {mode!r}") from None


@dataclass(frozen=True)
class Call:
    """A call node.  ``args`` are terms (types at leaves) or nested calls."""

    name: str
    args: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self) -> str:
        from .dsl import render_expr

        return render_expr(self)


PExpr = Union[Term, Call]


def pexpr_vars(e: PExpr) -> set[str]:
    if isinstance(e, Term):
        return set(variables(e))
    out: set[str] = set()
    for a in e.args:
        out |= pexpr_vars(a)
    return out


def pexpr_calls(e: PExpr) -> int:
    if isinstance(e, Term):
        return 0
    return 1 + sum(pexpr_calls(a) for a in e.args)


def substitute_pexpr(e: PExpr, s: Mapping[str, Term]) -> PExpr:
    if isinstance(e, Term):
        return apply_substitution(e, s)
    return Call(e.name, tuple(substitute_pexpr(a, s) for a in e.args))


@dataclass(frozen=True)
class TypeDecl:
    name: str
    rank: int
    params: tuple[str, ...] = ()
    extern: bool = False  # provided by the host language, not emitted

    def __post_init__(self) -> None:
        params = tuple(self.params)
        if not params and self.rank:
            params = ("x",) if self.rank == 1 else tuple(f"x{i}" for i in range(1, self.rank + 1))
        if len(params) != self.rank:
            raise ValueError(f"type {self.name} has rank {self.rank} but {len(params)} parameter names")
        object.__setattr__(self, "params", params)


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple[Term, ...]
    ret: PExpr
    aux: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(self.params))
        have: set[str] = set()
        for p in self.params:
            have |= set(variables(p))
        missing = pexpr_vars(self.ret) - have
        if missing:
            raise ValueError(
                f"definition of {self.name}: return mentions {sorted(missing)} "
                "which no parameter binds"
            )

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def typeof(self) -> bool:
        return isinstance(self.ret, Call)

    @property
    def linear(self) -> bool:
        """No variable repeats across all parameter patterns."""
        seen: dict = {}
        for p in self.params:
            for v, c in variables(p).items():
                seen[v] = seen.get(v, 0) + c
        return all(c == 1 for c in seen.values())

    @property
    def depth(self) -> int:
        return max((p.depth for p in self.params), default=0)


@dataclass
class TypeProgram:
    types: tuple[TypeDecl, ...] = ()
    defs: tuple[FunctionDef, ...] = ()
    mode: str = "one-type"
    prefix: tuple[str, ...] = ()
    suffix: tuple[str, ...] = ()
    exprs: tuple[PExpr, ...] = ()
    unit_index: int | None = None  # where the unit type sits among declarations
    name: str = ""
    base: Term = EPS  # receiver type of the first call in a word expression
    goal: Term | None = None  # required result type, like assigning to a variable of that type
    letters: tuple[str, ...] = ()  # declared word alphabet; derived from the functions when empty

    def __post_init__(self) -> None:
        self.types = tuple(self.types)
        self.defs = tuple(self.defs)
        self.prefix = tuple(self.prefix)
        self.suffix = tuple(self.suffix)
        self.exprs = tuple(self.exprs)
        self.letters = tuple(self.letters)
        self.mode = normalize_mode(self.mode)
        names = [t.name for t in self.types]
        if len(set(names)) != len(names):
            raise ValueError("duplicate type declaration")
        primary = {d.name for d in self.defs if not d.aux}
        aux = {d.name for d in self.defs if d.aux}
        clash = primary & aux
        if clash:
            raise ValueError(f"names used as both primary and auxiliary: {sorted(clash)}")
        self._by_name: dict[str, list[FunctionDef]] = {}
        self._roots: dict[tuple, list[FunctionDef]] = {}
        for d in self.defs:
            self._by_name.setdefault(d.name, []).append(d)
        for name, ds in self._by_name.items():
            if len({d.arity for d in ds}) > 1:
                raise ValueError(f"overloads of {name} disagree on arity")

    @property
    def signature(self) -> Signature:
        return Signature({t.name: t.rank for t in self.types})

    def overloads(self, name: str) -> list[FunctionDef]:
        return self._by_name.get(name, [])

    def candidates(self, name: str, args: tuple) -> list[FunctionDef]:
        """Overloads whose first pattern can match ``args[0]`` by its root."""
        ds = self._by_name.get(name, [])
        if not args or len(ds) < 8:
            return ds
        key = (name, root_key(args[0]))
        hit = self._roots.get(key)
        if hit is None:
            hit = [d for d in ds if root_key(d.params[0]) in (None, key[1])]
            self._roots[key] = hit
        return hit

    @property
    def function_names(self) -> list[str]:
        return list(self._by_name)

    @property
    def primary_names(self) -> list[str]:
        return [n for n, ds in self._by_name.items() if not ds[0].aux]

    @property
    def alphabet(self) -> list[str]:
        """Word letters: primary functions that are not framing calls."""
        if self.letters:
            return list(self.letters)
        framing = set(self.prefix) | set(self.suffix)
        return [n for n in self.primary_names if n not in framing]

    def check_signature(self) -> None:
        sig = self.signature
        for d in self.defs:
            for p in d.params:
                sig.check(p)
            _check_pexpr(sig, d.ret)
        for e in self.exprs:
            _check_pexpr(sig, e)
        sig.check(self.base)
        if self.goal is not None:
            sig.check(self.goal)

    def with_exprs(self, exprs: Iterable[PExpr]) -> "TypeProgram":
        return replace(self, exprs=tuple(exprs))

    def with_mode(self, mode: str) -> "TypeProgram":
        return replace(self, mode=mode)


def _check_pexpr(sig: Signature, e: PExpr) -> None:
    if isinstance(e, Term):
        sig.check(e)
    else:
        for a in e.args:
            _check_pexpr(sig, a)


# -- expressions and words ----------------------------------------------------


def chain_expr(names: Iterable[str], base: PExpr = EPS) -> PExpr:
    e = base
    for n in names:
        e = Call(n, (e,))
    return e


def word_to_expression(w: Sequence[str], prefix: Sequence[str] = (), suffix: Sequence[str] = ()) -> PExpr:
    return chain_expr(list(prefix) + list(w) + list(suffix))


def expression_to_word(e: PExpr, prefix: Sequence[str] = (), suffix: Sequence[str] = (),
                       base: Term = EPS) -> tuple[str, ...]:
    names: list[str] = []
    while isinstance(e, Call):
        if len(e.args) != 1:
            raise ValueError("only unary call chains spell words")
        names.append(e.name)
        e = e.args[0]
    if e is not base:
        raise ValueError(f"a word expression starts from {base}")
    names.reverse()
    p, s = list(prefix), list(suffix)
    if names[: len(p)] != p or (s and names[len(names) - len(s):] != s) or len(names) < len(p) + len(s):
        raise ValueError("expression does not carry the program's framing calls")
    return tuple(names[len(p): len(names) - len(s)])


def program_expression(p: TypeProgram, w: Sequence[str]) -> PExpr:
    return chain_expr(list(p.prefix) + list(w) + list(p.suffix), p.base)


# -- classification -------------------------------------------------------------

C1 = ("nyladic", "monadic", "dyadic", "polyadic")
C2 = ("shallow", "almost-shallow", "deep")
C3 = ("linear", "non-linear")
C4 = ("unary", "n-ary")
C5 = ("no-typeof", "rudimentary", "full")
C6 = MODES


@dataclass(frozen=True)
class LatticePointT:
    arity: str = "nyladic"
    depth: str = "shallow"
    multiplicity: str = "linear"
    functions: str = "unary"
    typeof: str = "no-typeof"
    overloading: str = "one-type"

    ORDERS = {
        "arity": C1,
        "depth": C2,
        "multiplicity": C3,
        "functions": C4,
        "typeof": C5,
        "overloading": C6,
    }

    def __post_init__(self) -> None:
        for name, order in self.ORDERS.items():
            if getattr(self, name) not in order:
                raise ValueError(f"{getattr(self, name)!r} is not a value of {name}")

    def __le__(self, other: "LatticePointT") -> bool:
        return all(
            order.index(getattr(self, n)) <= order.index(getattr(other, n))
            for n, order in self.ORDERS.items()
        )

    def join(self, other: "LatticePointT") -> "LatticePointT":
        vals = {}
        for n, order in self.ORDERS.items():
            vals[n] = order[max(order.index(getattr(self, n)), order.index(getattr(other, n)))]
        return LatticePointT(**vals)

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in self.ORDERS}


FLUENT = LatticePointT("monadic", "deep", "linear", "unary", "rudimentary", "one-type")
PP = LatticePointT("polyadic", "shallow", "linear", "unary", "no-typeof", "one-type")


def classify_program(p: TypeProgram) -> LatticePointT:
    """Least lattice point admitting every declaration and definition."""
    p.check_signature()
    rank = max((t.rank for t in p.types), default=0)
    arity = C1[min(rank, 3)]
    depth = max((d.depth for d in p.defs), default=0)
    typeof = "no-typeof"
    for d in p.defs:
        if d.typeof:
            if _full_typeof(d.ret):
                typeof = "full"
                break
            typeof = "rudimentary"
    return LatticePointT(
        arity=arity,
        depth="shallow" if depth <= 1 else "deep",
        multiplicity="linear" if all(d.linear for d in p.defs) else "non-linear",
        functions="n-ary" if any(d.arity > 1 for d in p.defs) else "unary",
        typeof=typeof,
        overloading=p.mode,
    )


def _full_typeof(e: PExpr) -> bool:
    return pexpr_calls(e) > 1


# -- checking -----------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    kind: str  # typed | typed-set | error-type | ambiguous | ill-typed | fuel-exhausted
    types: frozenset = frozenset()
    at: int | None = None
    detail: str = ""
    fuel_used: int = 0

    @property
    def type(self) -> Term | None:
        if len(self.types) == 1:
            return next(iter(self.types))
        return None

    @property
    def typed(self) -> bool:
        return self.kind in ("typed", "typed-set")

    @property
    def exhausted(self) -> bool:
        return self.kind == "fuel-exhausted"

    def __str__(self) -> str:
        if self.kind == "typed":
            return f"typed {self.type}"
        if self.kind in ("typed-set", "ambiguous"):
            return f"{self.kind} {{{', '.join(sorted(str(t) for t in self.types))}}}"
        if self.kind in ("ill-typed", "error-type"):
            return f"{self.kind} at call {self.at}" + (f": {self.detail}" if self.detail else "")
        return self.kind


class _Stop(Exception):
    def __init__(self, result: CheckResult):
        self.result = result


class Checker:
    """Set-valued evaluator for one program, mode and budget."""

    def __init__(self, program: TypeProgram, mode: str | None = None,
                 fuel: int = DEFAULT_FUEL, set_cap: int = DEFAULT_SET_CAP):
        self.p = program
        self.mode = normalize_mode(mode or program.mode)
        self.fuel = fuel
        self.cap = set_cap
        self.spent = 0
        self._pos = 0
        self._memo: dict = {}
        self._active: set = set()

    def _spend(self) -> None:
        self.spent += 1
        if self.spent > self.fuel:
            raise _Stop(CheckResult("fuel-exhausted", at=self._pos, detail="fuel", fuel_used=self.spent))

    def _capped(self, out: set) -> None:
        if len(out) > self.cap:
            raise _Stop(CheckResult("fuel-exhausted", at=self._pos, detail="type-set cap",
                                    fuel_used=self.spent))

    def _one(self, out: set, name: str) -> None:
        if self.mode == "one-type" and len(out) > 1:
            raise _Stop(CheckResult("error-type", frozenset(out), at=self._pos,
                                    detail=f"{name} has {len(out)} types", fuel_used=self.spent))

    # expression level: every call is numbered in post order
    def check(self, e: PExpr) -> CheckResult:
        try:
            types = self._expr(e)
        except _Stop as stop:
            return stop.result
        goal = self.p.goal
        if goal is not None and goal not in types:
            return CheckResult("ill-typed", frozenset(types), at=self._pos - 1,
                               detail=f"result is not {goal}", fuel_used=self.spent)
        if goal is not None:
            types = {goal}
        if self.mode == "one-type" or len(types) == 1:
            return CheckResult("typed", frozenset(types), fuel_used=self.spent)
        if self.mode == "eventually-one-type":
            return CheckResult("ambiguous", frozenset(types), fuel_used=self.spent)
        return CheckResult("typed-set", frozenset(types), fuel_used=self.spent)

    def _expr(self, e: PExpr) -> set:
        if isinstance(e, Term):
            return {e}
        arg_sets = [self._expr(a) for a in e.args]
        pos = self._pos
        out = self.call_sets(e.name, arg_sets)
        self._pos += 1
        if not out:
            raise _Stop(CheckResult("ill-typed", at=pos,
                                    detail=f"no overload of {e.name} applies", fuel_used=self.spent))
        return out

    def call_sets(self, name: str, arg_sets: list[set]) -> set:
        if not self.p.overloads(name):
            raise _Stop(CheckResult("ill-typed", at=self._pos, detail=f"unknown function {name}",
                                    fuel_used=self.spent))
        out: set = set()
        for combo in itertools.product(*[sorted(s, key=id) for s in arg_sets]):
            out |= self.apply(name, combo)
            self._capped(out)
        self._one(out, name)
        return out

    def apply(self, name: str, args: tuple) -> set:
        """Types of ``name(args)`` for ground argument types.

        Tail calls ``typeof t.f`` are followed in a loop rather than by
        recursion, so long machine runs do not grow the Python stack.
        """
        key = (name, args)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if key in self._active:
            # a call that needs its own type never terminates; it adds nothing
            return set()
        self._active.add(key)
        try:
            out = self._apply(key)
        finally:
            self._active.discard(key)
        self._one(out, name)
        self._memo[key] = out
        return out

    def _apply(self, key: tuple) -> set:
        out: set = set()
        work = [key]
        seen = {key}
        while work:
            n, a = work.pop()
            self._spend()
            hits = []
            for d in self.p.candidates(n, a):
                s = match_all(d.params, a)
                if s is not None:
                    hits.append((d, s))
            if self.mode == "one-type" and len(hits) > 1:
                results: set = set()
                for d, s in hits:
                    results |= self._resolve(d, s)
                self._one(results, n)
                out |= results
                continue
            for d, s in hits:
                if not d.typeof:
                    out.add(apply_substitution(d.ret, s))
                    continue
                pe = substitute_pexpr(d.ret, s)
                if isinstance(pe, Call) and all(isinstance(x, Term) for x in pe.args):
                    nxt = (pe.name, pe.args)
                    if not self.p.overloads(pe.name):
                        continue
                    if nxt not in seen:
                        seen.add(nxt)
                        work.append(nxt)
                    continue
                out |= self._pexpr(pe)
            self._capped(out)
        return out

    def _resolve(self, d: FunctionDef, s: dict) -> set:
        if not d.typeof:
            return {apply_substitution(d.ret, s)}
        return self._pexpr(substitute_pexpr(d.ret, s))

    def _pexpr(self, e: PExpr) -> set:
        """Inside typeof an empty branch contributes nothing (no error)."""
        if isinstance(e, Term):
            return {e}
        arg_sets = [self._pexpr(a) for a in e.args]
        if any(not s for s in arg_sets) or not self.p.overloads(e.name):
            return set()
        out: set = set()
        for combo in itertools.product(*[sorted(s, key=id) for s in arg_sets]):
            out |= self.apply(e.name, combo)
            self._capped(out)
        self._one(out, e.name)
        return out


def typecheck(p: TypeProgram, e: PExpr, mode: str | None = None, fuel: int = DEFAULT_FUEL,
              set_cap: int = DEFAULT_SET_CAP) -> CheckResult:
    return Checker(p, mode, fuel, set_cap).check(e)


def apply_function(d: FunctionDef, args: Sequence[Term]):
    """One definition on ground argument types.

    Returns the result type, a ``(pending pseudo-expression, substitution)``
    pair for typeof returns, or ``None`` when the patterns do not match.
    """
    if len(args) != d.arity:
        raise ValueError(f"{d.name} takes {d.arity} arguments")
    s = match_all(d.params, args)
    if s is None:
        return None
    if d.typeof:
        return substitute_pexpr(d.ret, s), s
    return apply_substitution(d.ret, s)


def resolve_typeof(e: PExpr, s: Mapping[str, Term], p: TypeProgram, fuel: int = DEFAULT_FUEL,
                   mode: str | None = None) -> CheckResult:
    """Type a pseudo-expression after grounding it with ``s``."""
    grounded = substitute_pexpr(e, s)
    if pexpr_vars(grounded):
        raise ValueError("substitution leaves variables in the pseudo-expression")
    return Checker(p, mode, fuel).check(grounded)


def check_word(p: TypeProgram, w: Sequence[str], mode: str | None = None, fuel: int = DEFAULT_FUEL,
               set_cap: int = DEFAULT_SET_CAP) -> CheckResult:
    return typecheck(p, program_expression(p, w), mode, fuel, set_cap)


def is_member(result: CheckResult, assume_unambiguous: bool = False) -> bool | None:
    """Word membership implied by a check result; ``None`` when inconclusive."""
    if result.exhausted:
        return None
    if result.kind == "ambiguous":
        return not assume_unambiguous
    return result.typed


def erasure_lint(p: TypeProgram) -> list[str]:
    """Overloads that a type-erasing compiler cannot tell apart (same name, same
    parameter root symbols)."""
    out = []
    for name in p.function_names:
        seen: dict = {}
        for d in p.overloads(name):
            roots = tuple(t.head if t.is_node else ("eps" if t.is_eps else "*") for t in d.params)
            if roots in seen:
                out.append(f"{name}: overloads share the erased signature {roots}")
            seen[roots] = d
    return out


def linear_patterns(d: FunctionDef) -> bool:
    return all(is_linear(p) for p in d.params)
