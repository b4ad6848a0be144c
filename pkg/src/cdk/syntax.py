"""Text syntax for maps: a recursive-descent parser and a printer.

    map     := "map" "(" params ")" "->" tuple
    params  := pattern {"," pattern} | ""
    pattern := ident | "(" params ")"
    tuple   := expr | "(" item {"," item} ")" | "(" ")"
    item    := tuple
    expr    := ["-"] term {("+"|"-") term}
    term    := unary {"*" unary}
    unary   := "-" unary | factor
    factor  := atom ["^" nat]
    atom    := rational | ident | "(" expr ")" | ("sin"|"cos"|"exp") "(" expr ")"

Nested parameter patterns give the domain shape; comma lists nest to the
right, so ``(x, y, z)`` is ``Line × (Line × Line)``.  Codomain tuples follow
the same rule, which makes printed maps re-parseable with their shapes.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import ParseError
from .expr import (
    Const, Coord, Cos, Exp, Expr, Pow, Prod as PProd, Sin, Sum, add, const, mul, neg, power,
)
from .shapes import Line, Prod, Shape, Unit

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9']*)
  | (?P<arrow>->)
  | (?P<sym>[(),+\-*^])
""", re.VERBOSE)

FUNCS = {"sin": Sin, "cos": Cos, "exp": Exp}


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
        else:
            toks.append(_Tok(kind if kind != "sym" else m.group(), m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.names: dict = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            self.fail(f"expected {kind!r}, found {found!r}")
        self.i += 1
        return tok

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    # -- patterns ---------------------------------------------------------
    def params(self, closer=")") -> Shape:
        items = []
        if self.tok.kind == closer:
            return Unit
        items.append(self.pattern())
        while self.accept(","):
            items.append(self.pattern())
        return _nest(items)

    def pattern(self) -> Shape:
        tok = self.tok
        if tok.kind == "(":
            self.i += 1
            s = self.params()
            self.expect(")")
            return s
        if tok.kind == "ident":
            if tok.text in FUNCS or tok.text == "map":
                self.fail(f"reserved word {tok.text!r} used as a parameter")
            if tok.text in self.names:
                self.fail(f"duplicate parameter {tok.text!r}")
            self.names[tok.text] = len(self.names)
            self.i += 1
            return Line
        self.fail(f"expected a parameter, found {tok.text or 'end of input'!r}")

    # -- codomain tuples ----------------------------------------------------
    def item(self) -> Tuple[Shape, List[Expr]]:
        if self.tok.kind == "(":
            save = self.i
            self.i += 1
            if self.accept(")"):
                return Unit, []
            try:
                parts = [self.item()]
                while self.accept(","):
                    parts.append(self.item())
                self.expect(")")
            except ParseError:
                parts = None
            if parts is not None and self.tok.kind in (",", ")", "eof"):
                if len(parts) > 1 or parts[0][0] != Line:
                    return _nest([s for s, _ in parts]), [e for _, es in parts for e in es]
                return parts[0]
            self.i = save
        return Line, [self.expr()]

    # -- expressions --------------------------------------------------------
    def expr(self) -> Expr:
        terms = [self.term()]
        while self.tok.kind in ("+", "-"):
            sign = self.tok.kind
            self.i += 1
            t = self.term()
            terms.append(t if sign == "+" else neg(t))
        return terms[0] if len(terms) == 1 else add(*terms)

    def term(self) -> Expr:
        factors = [self.unary()]
        while self.accept("*"):
            factors.append(self.unary())
        return factors[0] if len(factors) == 1 else mul(*factors)

    def unary(self) -> Expr:
        if self.accept("-"):
            return neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.factor()

    def factor(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            tok = self.expect("num")
            if not tok.text.isdigit():
                self.fail("exponent must be a natural number", tok)
            return power(base, int(tok.text))
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return const(Fraction(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return FUNCS[tok.text](arg)
            if tok.text not in self.names:
                self.fail(f"unbound identifier {tok.text!r}", tok)
            return Coord(self.names[tok.text])
        if tok.kind == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        self.fail(f"unexpected {tok.text or 'end of input'!r}")


def _nest(items: Sequence[Shape]) -> Shape:
    if not items:
        return Unit
    out = items[-1]
    for s in reversed(items[:-1]):
        out = Prod(s, out)
    return out


def parse_map_named(text: str):
    """Parse a map, returning ``(SmoothMap, parameter names)``."""
    from .maps import SmoothMap

    p = _Parser(text)
    tok = p.expect("ident")
    if tok.text != "map":
        p.fail("expected 'map'", tok)
    p.expect("(")
    dom = p.params()
    p.expect(")")
    p.expect("arrow")
    cod, comps = p.item()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r} after map body")
    names = sorted(p.names, key=p.names.get)
    return SmoothMap(dom, cod, tuple(comps)), names


def parse_map(text: str):
    return parse_map_named(text)[0]


def parse_expr(text: str, names: Sequence[str]) -> Expr:
    p = _Parser(text)
    p.names = {n: i for i, n in enumerate(names)}
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r}")
    return e


# -- printing ------------------------------------------------------------------

def _fmt_const(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def format_expr(e: Expr, names: Optional[Sequence[str]] = None) -> str:
    def name(i):
        return names[i] if names is not None and i < len(names) else f"x{i}"

    def atomic(e: Expr) -> str:
        s = fmt(e)
        if isinstance(e, (Coord, Sin, Cos, Exp)) or (isinstance(e, Const) and e.value >= 0
                                                      and e.value.denominator == 1):
            return s
        return f"({s})"

    def product_part(e: Expr) -> str:
        if isinstance(e, Sum) or (isinstance(e, Const) and e.value < 0):
            return f"({fmt(e)})"
        return fmt(e)

    def fmt(e: Expr) -> str:
        if isinstance(e, Const):
            return _fmt_const(e.value)
        if isinstance(e, Coord):
            return name(e.index)
        if isinstance(e, Sum):
            if not e.terms:
                return "0"
            out = []
            for k, (c, t) in enumerate(e.terms):
                neg_c = c < 0
                mag = -c if neg_c else c
                if isinstance(t, Const) and t.value == 1:
                    body = _fmt_const(mag)
                elif mag == 1:
                    body = product_part(t)
                else:
                    body = f"{_fmt_const(mag)}*{product_part(t)}"
                if k == 0:
                    out.append(f"-{body}" if neg_c else body)
                else:
                    out.append(f" - {body}" if neg_c else f" + {body}")
            return "".join(out)
        if isinstance(e, PProd):
            return "*".join(product_part(f) for f in e.factors)
        if isinstance(e, Pow):
            return f"{atomic(e.base)}^{e.exp}"
        fname = {Sin: "sin", Cos: "cos", Exp: "exp"}[type(e)]
        return f"{fname}({fmt(e.arg)})"

    return fmt(e)


def _spine(s: Shape) -> List[Shape]:
    items = []
    while isinstance(s, Prod):
        items.append(s.left)
        s = s.right
    items.append(s)
    return items


def format_params(s: Shape, names: Sequence[str]) -> str:
    it = iter(names)

    def pat(s: Shape) -> str:
        if s == Line:
            return next(it)
        if s == Unit:
            return "()"
        return "(" + ", ".join(pat(x) for x in _spine(s)) + ")"

    if s == Unit:
        return "()"
    if s == Line:
        return f"({next(it)})"
    return pat(s)


def format_tuple(s: Shape, comps: Sequence[str]) -> str:
    it = iter(comps)

    def tup(s: Shape) -> str:
        if s == Line:
            return next(it)
        if s == Unit:
            return "()"
        return "(" + ", ".join(tup(x) for x in _spine(s)) + ")"

    if s == Line:
        return f"({next(it)})"
    return tup(s)


def default_names(n: int) -> List[str]:
    return [f"x{i}" for i in range(n)]


def format_map(f, names: Optional[Sequence[str]] = None) -> str:
    names = list(names) if names is not None else default_names(f.dom.dim)
    body = format_tuple(f.cod, [format_expr(c, names) for c in f.comps])
    return f"map {format_params(f.dom, names)} -> {body}"
