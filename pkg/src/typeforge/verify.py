"""Word-by-word agreement between automata, type programs and grammars."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .automata import AutomatonSpec, run, words_upto
from .grammar import Cfg, cyk_membership
from .typesys import DEFAULT_FUEL, TypeProgram, check_word, is_member


class AlphabetMismatch(ValueError):
    pass


def alphabet_of(obj) -> tuple[str, ...]:
    if isinstance(obj, AutomatonSpec):
        if obj.forest:
            raise ValueError("forest recognizers have no word alphabet")
        return tuple(obj.alphabet)
    if isinstance(obj, TypeProgram):
        return tuple(obj.alphabet)
    if isinstance(obj, Cfg):
        return tuple(obj.terminals)
    raise TypeError(f"cannot take the alphabet of {type(obj).__name__}")


def membership(obj, w: Sequence[str], fuel: int = DEFAULT_FUEL,
               assume_unambiguous: bool = False) -> bool | None:
    """``None`` means the budget ran out before a verdict."""
    if isinstance(obj, AutomatonSpec):
        out = run(obj, tuple(w), fuel)
        return None if out.exhausted else out.accepted
    if isinstance(obj, TypeProgram):
        return is_member(check_word(obj, w, fuel=fuel), assume_unambiguous)
    if isinstance(obj, Cfg):
        return cyk_membership(obj, w)
    raise TypeError(f"no membership for {type(obj).__name__}")


@dataclass(frozen=True)
class Verdict:
    word: tuple[str, ...]
    left: bool | None
    right: bool | None

    @property
    def agree(self) -> bool | None:
        if self.left is None or self.right is None:
            return None
        return self.left == self.right


@dataclass
class VerifyReport:
    alphabet: tuple[str, ...]
    max_len: int
    rows: list[Verdict] = field(default_factory=list)

    @property
    def mismatches(self) -> list[Verdict]:
        return [r for r in self.rows if r.agree is False]

    @property
    def exhausted(self) -> list[Verdict]:
        return [r for r in self.rows if r.agree is None]

    @property
    def agreed(self) -> int:
        return sum(1 for r in self.rows if r.agree)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    @property
    def conclusive(self) -> bool:
        return not self.exhausted

    def as_dict(self) -> dict:
        def show(w):
            return " ".join(w)

        return {
            "alphabet": list(self.alphabet),
            "max_len": self.max_len,
            "words": len(self.rows),
            "agreed": self.agreed,
            "accepted": sum(1 for r in self.rows if r.left and r.right),
            "mismatches": [
                {"word": show(r.word), "left": r.left, "right": r.right} for r in self.mismatches
            ],
            "fuel_exhausted": [show(r.word) for r in self.exhausted],
            "ok": self.ok,
        }


def verify_bisimulation(left, right, max_len: int = 8, fuel: int = DEFAULT_FUEL,
                        assume_unambiguous: bool = False) -> VerifyReport:
    a, b = alphabet_of(left), alphabet_of(right)
    if set(a) != set(b):
        raise AlphabetMismatch(f"alphabets differ: {sorted(a)} vs {sorted(b)}")
    report = VerifyReport(a, max_len)
    for w in words_upto(a, max_len):
        report.rows.append(Verdict(
            w,
            membership(left, w, fuel, assume_unambiguous),
            membership(right, w, fuel, assume_unambiguous),
        ))
    return report
