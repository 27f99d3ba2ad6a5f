"""Parser and printer for the textual notation.

Subspaces::

    V_{123,24}            span of e1+e2+e3 and e2+e4
    V_1, V_{1,2}          coordinate spans
    <e1, e2 + λ e3>       angle brackets (ASCII or ⟨ ⟩); λ may be written l or lambda,
                          and α (alpha) is accepted as the same parameter
    <(λ-1)e1 + λ e2>      coefficients are rationals, λ, or affine expressions in λ
    0, V                  zero and full space

A digit group after ``e`` names a sum of unit vectors (``e235 = e2+e3+e5``),
so single indices only go up to 9.

Poset literal::

    poset N2 { a1 < a2; b1 < b2; b1 < a2; c1 < c2 }

Representation literal (one statement per element)::

    rep pi on N2 dim 3 { a1 = V_{123}; a2 = <e1, e123>; b1 = V_1; ... }

Row form, as printed in tables (spaces listed in element order)::

    (C^3; V_{123}, V_{23,1}; V_1, V_{1,2}; V_3, V_{2,3})
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import IndexOutOfRange, ParseError
from .linalg import Subspace, full, span, zero
from .poset import Poset, make_poset

_OPEN = "{(<⟨["
_CLOSE = "})>⟩]"

# --------------------------------------------------------------------------
# vector expressions


@dataclass(frozen=True)
class Coef:
    """Affine coefficient ``const + lam * λ``."""

    const: Fraction = Fraction(0)
    lam: Fraction = Fraction(0)

    def __add__(self, o):
        return Coef(self.const + o.const, self.lam + o.lam)

    def __neg__(self):
        return Coef(-self.const, -self.lam)

    def __mul__(self, o):
        if self.lam and o.lam:
            raise ParseError("λ may appear only linearly")
        return Coef(self.const * o.const, self.const * o.lam + self.lam * o.const)

    def evaluate(self, lam) -> Fraction:
        if self.lam:
            if lam is None:
                raise ParseError("expression uses λ but no value was bound")
            return self.const + self.lam * Fraction(lam)
        return self.const

    @property
    def symbolic(self) -> bool:
        return self.lam != 0


@dataclass(frozen=True)
class VectorExpr:
    terms: tuple  # ((Coef, (i1, i2, ...)), ...)

    def evaluate(self, ambient_dim: int, lam=None) -> tuple:
        v = [Fraction(0)] * ambient_dim
        for coef, idx in self.terms:
            c = coef.evaluate(lam)
            for i in idx:
                if not 1 <= i <= ambient_dim:
                    raise IndexOutOfRange(f"index e{i} outside Q^{ambient_dim}")
                v[i - 1] += c
        return tuple(v)

    @property
    def symbolic(self) -> bool:
        return any(c.symbolic for c, _ in self.terms)


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<lam>\\lambda|lambda|λ|l(?![a-zA-Z])|\\alpha|alpha|α)
  | (?P<basis>e_?\{[\d,\s]+\}|e_?\d+)
  | (?P<op>[-+*()−])
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} in {text!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group(kind)
            if val == "−":
                val = "-"
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("end", "", pos))
    return out


def _number(s: str) -> Fraction:
    if "." in s and "/" not in s:
        return Fraction(s)  # exact decimal, "0.1" -> 1/10
    return Fraction(s)


def _basis_indices(tok: str, pos: int) -> tuple:
    digits = tok.lstrip("e").lstrip("_").strip("{}")
    idx = tuple(int(ch) for ch in digits if ch.isdigit())
    if not idx:
        raise ParseError("empty basis index", pos)
    return idx


class _ExprParser:
    """Recursive descent over the token list.

    vector := ['+'|'-'] term (('+'|'-') term)*
    term   := [coef ['*']] basis
    coef   := factor ('*'? factor)*
    factor := num | λ | '(' affine ')' | '-' factor
    """

    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            raise ParseError(f"expected {val!r}, got {t[1]!r} in {self.text!r}", t[2])

    def vector(self) -> VectorExpr:
        terms = []
        sign = Coef(Fraction(1))
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            if self.take()[1] == "-":
                sign = Coef(Fraction(-1))
        terms.append(self.term(sign))
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = Coef(Fraction(1 if self.take()[1] == "+" else -1))
            terms.append(self.term(sign))
        if self.peek()[0] != "end":
            t = self.peek()
            raise ParseError(f"unexpected {t[1]!r} in {self.text!r}", t[2])
        return VectorExpr(tuple(terms))

    def term(self, sign: Coef):
        coef = Coef(Fraction(1))
        have_factor = False
        while self.peek()[0] != "basis":
            if self.peek()[0] == "end":
                raise ParseError(f"term without basis vector in {self.text!r}", self.peek()[2])
            if self.peek()[1] == "*" and have_factor:
                self.take()
                have_factor = False
                continue
            coef = coef * self.factor()
            have_factor = True
        t = self.take()
        return (sign * coef, _basis_indices(t[1], t[2]))

    def factor(self) -> Coef:
        kind, val, pos = self.take()
        if kind == "num":
            return Coef(_number(val))
        if kind == "lam":
            return Coef(Fraction(0), Fraction(1))
        if val == "-":
            return -self.factor()
        if val == "(":
            acc = self.affine()
            self.expect(")")
            return acc
        raise ParseError(f"unexpected {val!r} in {self.text!r}", pos)

    def affine(self) -> Coef:
        acc = Coef()
        sign = 1
        if self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        acc = acc + self._product() * Coef(Fraction(sign))
        while self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
            acc = acc + self._product() * Coef(Fraction(sign))
        return acc

    def _product(self) -> Coef:
        acc = self.factor()
        while self.peek()[0] in ("num", "lam") or self.peek()[1] in ("*", "("):
            if self.peek()[1] == "*":
                self.take()
            acc = acc * self.factor()
        return acc


def parse_vector(text: str) -> VectorExpr:
    return _ExprParser(text).vector()


# --------------------------------------------------------------------------
# subspaces


def split_top(text: str, seps: str = ",") -> list[str]:
    """Split on separators that are not nested inside any bracket pair."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in _OPEN:
            depth += 1
        elif ch in _CLOSE:
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in {text!r}")
        if ch in seps and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ParseError(f"unbalanced brackets in {text!r}")
    out.append("".join(cur))
    return [s.strip() for s in out]


def parse_space_exprs(text: str) -> list[VectorExpr]:
    """Generators of a subspace literal, unevaluated (``None`` for V)."""
    t = text.strip()
    if t == "0":
        return []
    m = re.fullmatch(r"V_?\{([\d,\s]*)\}|V_(\d+)", t)
    if m:
        body = m.group(1) if m.group(1) is not None else m.group(2)
        groups = [g.strip() for g in body.split(",")] if m.group(1) is not None else [body]
        out = []
        for g in groups:
            if not g or not g.isdigit():
                raise ParseError(f"bad index group {g!r} in {text!r}")
            out.append(VectorExpr(((Coef(Fraction(1)), tuple(int(ch) for ch in g)),)))
        return out
    if t and t[0] in "<⟨" and t[-1] in ">⟩":
        inner = t[1:-1].strip()
        if not inner:
            return []
        return [parse_vector(part) for part in split_top(inner)]
    raise ParseError(f"not a subspace literal: {text!r}")


def parse_space(text: str, ambient_dim: int, lam=None) -> Subspace:
    """Exact subspace for a literal; λ is replaced by ``lam``."""
    t = text.strip()
    if t in ("V", "C", "ℂ"):
        return full(ambient_dim)
    exprs = parse_space_exprs(t)
    if not exprs:
        return zero(ambient_dim)
    return span(ambient_dim, [e.evaluate(ambient_dim, lam) for e in exprs])


def is_symbolic(text: str) -> bool:
    t = text.strip()
    if t in ("V", "C", "ℂ"):
        return False
    return any(e.symbolic for e in parse_space_exprs(t))


def _fmt_coef(c: Fraction) -> str:
    return str(c)


def render_vector(v) -> str:
    ones = [i + 1 for i, x in enumerate(v) if x == 1]
    parts = []
    if ones:
        parts.append("e" + "".join(str(i) for i in ones) if max(ones) < 10 else
                     " + ".join(f"e{i}" for i in ones))
    for i, x in enumerate(v):
        if x and x != 1:
            parts.append(f"{_fmt_coef(x)} e{i + 1}" if x != -1 else f"-e{i + 1}")
    if not parts:
        return "0"
    s = parts[0]
    for p in parts[1:]:
        s += " - " + p[1:] if p.startswith("-") else " + " + p
    return s


def render_space(s: Subspace) -> str:
    if s.is_zero():
        return "0"
    return "<" + ", ".join(render_vector(v) for v in s.rows) + ">"


# --------------------------------------------------------------------------
# posets and representations

_IDENT = r"[A-Za-z_][\w~']*"


def parse_poset(text: str) -> Poset:
    m = re.fullmatch(r"\s*poset\s+(\S+)\s*\{(.*)\}\s*", text, re.S)
    if not m:
        raise ParseError("poset literal must look like: poset NAME { a < b; ... }")
    name, body = m.group(1), m.group(2)
    elements, rels = [], []
    for stmt in re.split(r"[;\n]", body):
        stmt = stmt.strip()
        if not stmt:
            continue
        parts = [p.strip() for p in stmt.split("<")]
        for p in parts:
            if not re.fullmatch(_IDENT, p):
                raise ParseError(f"bad element name {p!r} in poset {name}")
            if p not in elements:
                elements.append(p)
        rels += list(zip(parts, parts[1:]))
    return make_poset(elements, rels, name=name)


def render_poset(p: Poset) -> str:
    return p.describe()


_DIM_RE = re.compile(r"^\s*(?:C|ℂ|\\mathbb\{C\}|Q)\s*\^?\s*\{?(\d+|[⁰¹²³⁴⁵⁶⁷⁸⁹]+)\}?\s*$")
_SUP = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")


def parse_row(text: str, poset: Poset, lam=None):
    """Parse ``(C^n; space, space; ...)`` against ``poset`` (element order)."""
    from .reps import make_rep

    t = text.strip()
    if t.endswith("*"):
        t = t[:-1].rstrip()
    if not (t.startswith("(") and t.endswith(")")):
        raise ParseError(f"row literal must be parenthesised: {text!r}")
    parts = [p for p in split_top(t[1:-1], ",;") if p]
    m = _DIM_RE.match(parts[0])
    if not m:
        raise ParseError(f"row literal must start with the ambient space C^n: {parts[0]!r}")
    n = int(m.group(1).translate(_SUP))
    spaces = parts[1:]
    if len(spaces) != len(poset):
        raise ParseError(f"{len(spaces)} spaces listed for a poset with {len(poset)} elements")
    return make_rep(poset, n, [parse_space(s, n, lam) for s in spaces])


def parse_rep(text: str, posets: dict, lam=None):
    """Parse ``rep NAME on POSET dim N { x = space; ... }``."""
    from .reps import make_rep

    m = re.fullmatch(r"\s*rep\s+(\S+)\s+on\s+(\S+)\s+dim\s+(\d+)\s*\{(.*)\}\s*", text, re.S)
    if not m:
        raise ParseError("rep literal must look like: rep NAME on POSET dim N { x = ...; }")
    name, pname, n, body = m.group(1), m.group(2), int(m.group(3)), m.group(4)
    if pname not in posets:
        raise ParseError(f"unknown poset {pname!r}")
    poset = posets[pname]
    spaces = {}
    for stmt in split_top(body, ";\n"):
        if not stmt:
            continue
        if "=" not in stmt:
            raise ParseError(f"statement without '=': {stmt!r}")
        lhs, rhs = stmt.split("=", 1)
        lhs = lhs.strip()
        if lhs not in poset:
            raise ParseError(f"{lhs!r} is not an element of {pname}")
        spaces[lhs] = parse_space(rhs, n, lam)
    return make_rep(poset, n, spaces, name=name)


def render_rep(rep, name: str = "pi") -> str:
    pname = rep.poset.name or "P"
    body = "; ".join(f"{x} = {render_space(s)}" for x, s in rep.items())
    return f"rep {name} on {pname} dim {rep.ambient_dim} {{ {body} }}"


def _blocks(text: str, keyword: str) -> list[str]:
    """Top-level ``keyword ... { ... }`` blocks of a document."""
    out = []
    pos = 0
    pat = re.compile(r"\b" + keyword + r"\b")
    while True:
        m = pat.search(text, pos)
        if not m:
            return out
        start = m.start()
        brace = text.index("{", m.end())
        depth, j = 0, brace
        while j < len(text):
            if text[j] == "{":
                depth += 1
            elif text[j] == "}":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        out.append(text[start:j + 1])
        pos = j + 1


def strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_document(text: str, known_posets: dict | None = None, lam=None):
    """All poset and rep literals in a document, in order of appearance."""
    text = strip_comments(text)
    posets = dict(known_posets or {})
    found_posets = []
    for b in _blocks(text, "poset"):
        p = parse_poset(b)
        posets[p.name] = p
        found_posets.append(p)
    reps = [parse_rep(b, posets, lam) for b in _blocks(text, "rep")]
    return found_posets, reps
