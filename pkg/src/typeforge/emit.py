"""Render type programs as Java, C++ or pseudo-Java source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import EPS, Term, var_order

CHAR_MAP = {
    "γ": "g",
    "∘": "O",
    "♭": "B",
    "𝛜": "E",
    "ε": "E",
    "$": "S_",
    "＃": "S",
    "#": "S",
    "⊥": "Bot",
    "φ": "phi",
    **{chr(0x2080 + i): str(i) for i in range(10)},
}
WHOLE_MAP = {"eps": "E"}

_IDENT_OK = re.compile(r"[A-Za-z0-9_]")


def mangle(name: str) -> str:
    if name in WHOLE_MAP:
        return WHOLE_MAP[name]
    out = []
    for ch in name:
        if ch in CHAR_MAP:
            out.append(CHAR_MAP[ch])
        elif _IDENT_OK.match(ch):
            out.append(ch)
        else:
            out.append(f"u{ord(ch):x}_")
    return "".join(out)


def mangle_text(text: str) -> str:
    return "".join(CHAR_MAP.get(ch, ch) for ch in text)


class UnsupportedFeature(ValueError):
    pass


@dataclass(frozen=True)
class EmitTarget:
    syntax: str = "cpp"  # cpp | java | pseudo
    typeof_style: str = "decltype"  # decltype | auto (cpp only)
    indent: str = "  "

    def __post_init__(self) -> None:
        if self.syntax not in ("cpp", "java", "pseudo"):
            raise ValueError(f"unknown target syntax {self.syntax!r}")
        if self.typeof_style not in ("decltype", "auto"):
            raise ValueError(f"unknown typeof style {self.typeof_style!r}")


class _Names:
    """Injective renaming of one namespace, remembering the character rules used."""

    def __init__(self, names, mangling: bool):
        self.map: dict[str, str] = {}
        back: dict[str, str] = {}
        self.used: dict[str, str] = {}
        for n in names:
            m = mangle(n) if mangling else n
            if m in back and back[m] != n:
                raise UnsupportedFeature(f"names {back[m]!r} and {n!r} both mangle to {m!r}")
            back[m] = n
            self.map[n] = m
            if mangling:
                if n in WHOLE_MAP:
                    self.used[n] = WHOLE_MAP[n]
                for ch in n:
                    if ch in CHAR_MAP:
                        self.used[ch] = CHAR_MAP[ch]

    def __getitem__(self, n: str) -> str:
        return self.map.get(n, n)


def emit(p, target: EmitTarget | str = "cpp") -> str:
    if isinstance(target, str):
        target = EmitTarget(target)
    if target.syntax == "java":
        return _Java(p, target).text()
    if target.syntax == "cpp":
        return _Cpp(p, target).text()
    return _Pseudo(p, target).text()


class _Base:
    mangling = True

    def __init__(self, p, target: EmitTarget):
        from .typesys import classify_program

        self.p = p
        self.t = target
        self.point = classify_program(p)
        self.types = _Names([d.name for d in p.types] + ["eps"], self.mangling)
        self.funcs = _Names(p.function_names, self.mangling)
        self.unit = self.types["eps"]

    def header(self) -> list[str]:
        used = {**self.types.used, **self.funcs.used}
        if not used:
            return ["// identifier mangling: none"]
        pairs = ", ".join(f"{k}->{v}" for k, v in sorted(used.items()))
        return [f"// identifier mangling: {pairs}"]

    def ty(self, t: Term, lt: str = "<", gt: str = ">") -> str:
        if t.is_eps:
            return self.unit
        if t.is_var:
            return t.head
        name = self.types[t.head]
        if not t.args:
            return name
        return name + lt + ", ".join(self.ty(a, lt, gt) for a in t.args) + gt

    def decl_order(self) -> list:
        """Type declarations with the unit type spliced in at its position."""
        out = [d for d in self.p.types]
        if self.p.unit_index is not None:
            out.insert(self.p.unit_index, None)
        return out


class _Cpp(_Base):
    def text(self) -> str:
        lines = self.header()
        if self.point.typeof != "no-typeof" and self.t.typeof_style == "decltype":
            lines.append("#define typeof decltype")
        for d in self.decl_order():
            if d is None:
                lines.append(f"struct {self.unit} {{}};")
            elif not d.extern:
                if d.rank:
                    tps = ", ".join(f"typename {x}" for x in d.params)
                    lines.append(f"template<{tps}> struct {self.types[d.name]} {{}};")
                else:
                    lines.append(f"struct {self.types[d.name]} {{}};")
        for d in self.p.defs:
            lines.append(self.fn(d))
        if self.p.exprs:
            lines.append("int main() {")
            for i, e in enumerate(self.p.exprs, 1):
                lines.append(f"{self.t.indent}{self.unit} w{i}={self.expr(e)};")
            lines.append("}")
        return "\n".join(lines) + "\n"

    def fn(self, d) -> str:
        vs = var_order(d.params)
        tmpl = ""
        if vs:
            tmpl = "template<" + ", ".join(f"typename {v}" for v in vs) + "> "
        if d.arity == 1 and d.params[0] is EPS and not d.aux:
            params = ""
        else:
            params = ", ".join(self.ty(t) for t in d.params)
        name = self.funcs[d.name]
        if not d.typeof:
            return f"{tmpl}{self.ty(d.ret)} {name}({params}) {{}}"
        if self.t.typeof_style == "auto":
            return f"{tmpl}auto {name}({params}) {{ return {self.pexpr(d.ret)}; }}"
        return f"{tmpl}typeof({self.pexpr(d.ret)}) {name}({params}) {{}}"

    def pexpr(self, e) -> str:
        if isinstance(e, Term):
            return self.ty(e) + "()"
        return f"{self.funcs[e.name]}(" + ", ".join(self.pexpr(a) for a in e.args) + ")"

    def expr(self, e) -> str:
        if isinstance(e, Term):
            return self.ty(e) + "()"
        if len(e.args) == 1 and e.args[0] is EPS:
            return f"{self.funcs[e.name]}()"
        return f"{self.funcs[e.name]}(" + ", ".join(self.expr(a) for a in e.args) + ")"


class _Java(_Base):
    def __init__(self, p, target):
        super().__init__(p, target)
        if self.point.typeof != "no-typeof":
            raise UnsupportedFeature("java syntax has no typeof (type capturing characteristic)")
        if self.point.overloading != "one-type":
            raise UnsupportedFeature(
                f"java syntax cannot express {self.point.overloading} overloading (overloading characteristic)"
            )

    def text(self) -> str:
        lines = self.header()
        for d in self.decl_order():
            if d is None or d.extern:
                continue
            if d.rank:
                lines.append(f"interface {self.types[d.name]}<{', '.join(d.params)}> {{}}")
            else:
                lines.append(f"interface {self.types[d.name]} {{}}")
        for d in self.p.defs:
            lines.append(self.fn(d))
        if self.p.exprs:
            lines.append("static {")
            for e in self.p.exprs:
                lines.append(f"{self.t.indent}{self.expr(e)};")
            lines.append("}")
        return "\n".join(lines) + "\n"

    def fn(self, d) -> str:
        vs = var_order(d.params)
        gen = f"<{', '.join(vs)}> " if vs else ""
        if d.arity == 1 and d.params[0] is EPS:
            params = ""
        elif d.arity == 1:
            params = f"{self.ty(d.params[0])} e"
        else:
            params = ", ".join(f"{self.ty(t)} e{i}" for i, t in enumerate(d.params, 1))
        name = self.funcs[d.name]
        if d.ret is EPS:
            return f"static {gen}void {name}({params}) {{}}"
        return f"static {gen}{self.ty(d.ret)} {name}({params}) {{ return null; }}"

    def expr(self, e) -> str:
        if isinstance(e, Term):
            return f"(({self.ty(e)}) null)"
        if len(e.args) == 1 and e.args[0] is EPS:
            return f"{self.funcs[e.name]}()"
        return f"{self.funcs[e.name]}(" + ", ".join(self.expr(a) for a in e.args) + ")"


class _Pseudo(_Base):
    """Java-like listing grouped by receiver type; accepts every lattice point."""

    mangling = False

    def text(self) -> str:
        lines = [f"// overloading: {self.p.mode}"]
        groups: dict = {}
        loose = []
        for d in self.p.defs:
            key = self._receiver(d)
            if key is None:
                loose.append(d)
            else:
                groups.setdefault(key, []).append(d)
        for decl in self.decl_order():
            name = "eps" if decl is None else decl.name
            if decl is not None and decl.extern and name not in groups:
                continue
            params = decl.params if decl is not None else ()
            head = f"interface {self._tname(name)}"
            if params:
                head += "<" + ", ".join(params) + ">"
            members = groups.pop(name, [])
            if not members:
                lines.append(head + " {}")
                continue
            lines.append(head + " {")
            for d in members:
                lines.append(self.t.indent + self.method(d, decl))
            lines.append("}")
        for name, members in groups.items():
            lines.append(f"interface {self._tname(name)} {{")
            for d in members:
                lines.append(self.t.indent + self.method(d, None))
            lines.append("}")
        for d in loose:
            lines.append(self.static(d))
        for e in self.p.exprs:
            lines.append(self.expr(e) + ";")
        return "\n".join(lines) + "\n"

    def _tname(self, name: str) -> str:
        return "ε" if name == "eps" else name

    def ty(self, t: Term, lt: str = "<", gt: str = ">") -> str:
        if t.is_eps:
            return "ε"
        return super().ty(t, lt, gt)

    def _receiver(self, d):
        if d.arity != 1:
            return None
        t = d.params[0]
        if t.is_eps:
            return "eps"
        if t.is_node and all(a.is_var for a in t.args) and len({a.head for a in t.args}) == len(t.args):
            return t.head
        return None

    def _ret(self, d, rename) -> str:
        from .terms import rename as rn

        if d.typeof:
            return "typeof " + self.pexpr(d.ret, rename)
        if d.ret.is_eps:
            return "void"
        return self.ty(rn(d.ret, rename))

    def method(self, d, decl) -> str:
        rename = {}
        t = d.params[0]
        if decl is not None and t.is_node:
            rename = {a.head: p for a, p in zip(t.args, decl.params)}
        aux = "aux " if d.aux else ""
        return f"{aux}{self._ret(d, rename)} {d.name}();"

    def static(self, d) -> str:
        vs = var_order(d.params)
        gen = f"<{', '.join(vs)}> " if vs else ""
        params = ", ".join(f"{self.ty(t)} e{i}" for i, t in enumerate(d.params, 1))
        aux = "aux " if d.aux else ""
        return f"{aux}static {gen}{self._ret(d, {})} {d.name}({params});"

    def pexpr(self, e, rename) -> str:
        from .terms import rename as rn

        if isinstance(e, Term):
            return self.ty(rn(e, rename)) if rename else self.ty(e)
        if len(e.args) == 1:
            return f"{self.pexpr(e.args[0], rename)}.{e.name}()"
        return f"{e.name}(" + ", ".join(self.pexpr(a, rename) for a in e.args) + ")"

    def expr(self, e) -> str:
        if isinstance(e, Term):
            return "new ε()" if e.is_eps else f"(({self.ty(e)}) null)"
        if len(e.args) == 1:
            return f"{self.expr(e.args[0])}.{e.name}()"
        return f"{e.name}(" + ", ".join(self.expr(a) for a in e.args) + ")"


# -- golden comparison ----------------------------------------------------------------

_COMMENT = re.compile(r"//[^\n]*")


def normalize_source(text: str) -> str:
    """Drop line comments and all whitespace, then apply the character mangling."""
    text = _COMMENT.sub("", text)
    text = re.sub(r"\s+", "", text)
    return mangle_text(text)


def same_source(a: str, b: str) -> bool:
    return normalize_source(a) == normalize_source(b)
