"""Scalar expressions over coordinates, with a canonical normal form.

An expression denotes one smooth coordinate function.  Normalization goes
through a sparse polynomial representation whose "atoms" are coordinates and
transcendental nodes (``sin``/``cos``/``exp`` of a normalized argument).  For
the polynomial fragment two expressions denote the same function exactly when
their normal forms are identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterable, Sequence, Tuple

from .errors import ExactModeUnsupportedPrimitive

__all__ = [
    "Expr", "Const", "Coord", "Sum", "Prod", "Pow", "Sin", "Cos", "Exp",
    "const", "coord", "add", "mul", "scale", "sub", "neg", "power",
    "sin", "cos", "exp", "normalize", "expr_key", "is_polynomial",
    "max_coord", "substitute", "partial", "eval_exact", "eval_float",
    "to_poly", "from_poly", "ZERO", "ONE",
]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


class Expr:
    """Base class of expression nodes."""

    rank = -1

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))

    @cached_property
    def key(self) -> tuple:
        return self._key()

    def _key(self) -> tuple:
        raise NotImplementedError

    def children(self) -> Tuple["Expr", ...]:
        return ()

    # operator sugar, handy in tests
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        return power(self, n)

    def __str__(self):
        from .syntax import format_expr

        return format_expr(self)


def _lift(x) -> Expr:
    return x if isinstance(x, Expr) else Const(as_fraction(x))


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: Fraction
    rank = 0

    def _key(self):
        return (0, self.value)

    __hash__ = Expr.__hash__


@dataclass(frozen=True, eq=True)
class Coord(Expr):
    index: int
    rank = 1

    def _key(self):
        return (1, self.index)

    __hash__ = Expr.__hash__


@dataclass(frozen=True, eq=True)
class Sum(Expr):
    terms: Tuple[Tuple[Fraction, Expr], ...]
    rank = 2

    def _key(self):
        return (2, tuple((c, e.key) for c, e in self.terms))

    def children(self):
        return tuple(e for _, e in self.terms)

    __hash__ = Expr.__hash__


@dataclass(frozen=True, eq=True)
class Prod(Expr):
    factors: Tuple[Expr, ...]
    rank = 3

    def _key(self):
        return (3, tuple(f.key for f in self.factors))

    def children(self):
        return self.factors

    __hash__ = Expr.__hash__


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exp: int
    rank = 4

    def __post_init__(self):
        if self.exp < 2:
            raise ValueError("Pow exponent must be a natural number >= 2")

    def _key(self):
        return (4, self.base.key, self.exp)

    def children(self):
        return (self.base,)

    __hash__ = Expr.__hash__


@dataclass(frozen=True, eq=True)
class Sin(Expr):
    arg: Expr
    rank = 5

    def _key(self):
        return (5, self.arg.key)

    def children(self):
        return (self.arg,)

    __hash__ = Expr.__hash__


@dataclass(frozen=True, eq=True)
class Cos(Expr):
    arg: Expr
    rank = 6

    def _key(self):
        return (6, self.arg.key)

    def children(self):
        return (self.arg,)

    __hash__ = Expr.__hash__


@dataclass(frozen=True, eq=True)
class Exp(Expr):
    arg: Expr
    rank = 7

    def _key(self):
        return (7, self.arg.key)

    def children(self):
        return (self.arg,)

    __hash__ = Expr.__hash__


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
TRANSCENDENTAL = (Sin, Cos, Exp)


def expr_key(e: Expr) -> tuple:
    """Total order on expressions: node kind first, then recursive lexicographic."""
    return e.key


# -- raw constructors (no simplification beyond flattening) -----------------

def const(v) -> Const:
    return Const(as_fraction(v))


def coord(i: int) -> Coord:
    return Coord(i)


def add(*es: Expr) -> Expr:
    terms = []
    for e in es:
        if isinstance(e, Sum):
            terms.extend(e.terms)
        else:
            terms.append((Fraction(1), e))
    return Sum(tuple(terms))


def scale(c, e: Expr) -> Expr:
    c = as_fraction(c)
    if isinstance(e, Sum):
        return Sum(tuple((c * k, t) for k, t in e.terms))
    return Sum(((c, e),))


def neg(e: Expr) -> Expr:
    return scale(-1, e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def mul(*es: Expr) -> Expr:
    factors = []
    for e in es:
        if isinstance(e, Prod):
            factors.extend(e.factors)
        else:
            factors.append(e)
    if len(factors) == 1:
        return factors[0]
    return Prod(tuple(factors))


def power(e: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return e
    return Pow(e, n)


def sin(e: Expr) -> Expr:
    return Sin(e)


def cos(e: Expr) -> Expr:
    return Cos(e)


def exp(e: Expr) -> Expr:
    return Exp(e)


# -- polynomial representation ---------------------------------------------
# A monomial is a tuple of (atom, power) pairs sorted by atom key; a polynomial
# is a dict monomial -> nonzero Fraction.  Dicts returned by the cached
# functions below are shared and must never be mutated.

Monomial = Tuple[Tuple[Expr, int], ...]
Poly = Dict[Monomial, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged: Dict[Expr, int] = dict(a)
    for atom, k in b:
        merged[atom] = merged.get(atom, 0) + k
    return tuple(sorted(merged.items(), key=lambda item: item[0].key))


def poly_add(p: Poly, q: Poly, cq: Fraction = Fraction(1)) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + cq * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_scale(c: Fraction, p: Poly) -> Poly:
    if not c:
        return {}
    return {m: c * v for m, v in p.items()}


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return {}
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def poly_pow(p: Poly, n: int) -> Poly:
    result: Poly = {(): Fraction(1)}
    base = p
    while n:
        if n & 1:
            result = poly_mul(result, base)
        n >>= 1
        if n:
            base = poly_mul(base, base)
    return result


def poly_const(c) -> Poly:
    c = as_fraction(c)
    return {(): c} if c else {}


def poly_atom(atom: Expr) -> Poly:
    return {((atom, 1),): Fraction(1)}


def _trans_atom(kind, arg: Expr) -> Poly:
    narg = normalize(arg)
    if isinstance(narg, Const) and narg.value == 0:
        return poly_const(0 if kind is Sin else 1)
    return poly_atom(kind(narg))


@lru_cache(maxsize=200_000)
def to_poly(e: Expr) -> Poly:
    if isinstance(e, Const):
        return poly_const(e.value)
    if isinstance(e, Coord):
        return poly_atom(e)
    if isinstance(e, Sum):
        out: Poly = {}
        for c, t in e.terms:
            out = poly_add(out, to_poly(t), c)
        return out
    if isinstance(e, Prod):
        out = {(): Fraction(1)}
        for f in e.factors:
            out = poly_mul(out, to_poly(f))
        return out
    if isinstance(e, Pow):
        return poly_pow(to_poly(e.base), e.exp)
    if isinstance(e, TRANSCENDENTAL):
        return _trans_atom(type(e), e.arg)
    raise TypeError(f"not an expression: {e!r}")


def _mono_degree(m: Monomial) -> int:
    return sum(k for _, k in m)


def _mono_expr(m: Monomial) -> Expr:
    factors = [atom if k == 1 else Pow(atom, k) for atom, k in m]
    if not factors:
        return ONE
    if len(factors) == 1:
        return factors[0]
    return Prod(tuple(factors))


def from_poly(p: Poly) -> Expr:
    """Canonical expression of a polynomial.

    Terms are ordered by descending total degree, ties broken by the
    expression order on the monomial.
    """
    if not p:
        return ZERO
    if len(p) == 1:
        ((m, c),) = p.items()
        if not m:
            return Const(c)
        if c == 1:
            return _mono_expr(m)
    items = sorted(((m, c) for m, c in p.items()),
                   key=lambda mc: (-_mono_degree(mc[0]), _mono_expr(mc[0]).key))
    return Sum(tuple((c, _mono_expr(m)) for m, c in items))


@lru_cache(maxsize=200_000)
def normalize(e: Expr) -> Expr:
    """Idempotent, evaluation-preserving canonical form."""
    return from_poly(to_poly(e))


# -- structural queries ------------------------------------------------------

@lru_cache(maxsize=100_000)
def is_polynomial(e: Expr) -> bool:
    if isinstance(e, TRANSCENDENTAL):
        return False
    return all(is_polynomial(c) for c in e.children())


@lru_cache(maxsize=100_000)
def max_coord(e: Expr) -> int:
    """Largest coordinate index occurring in ``e`` (-1 if none)."""
    if isinstance(e, Coord):
        return e.index
    return max((max_coord(c) for c in e.children()), default=-1)


# -- substitution and differentiation on the polynomial form ------------------

def subst_poly(p: Poly, images: Sequence[Poly], _cache=None) -> Poly:
    """Replace coordinate ``i`` by ``images[i]`` in a polynomial."""
    cache: Dict[Tuple[Expr, int], Poly] = {} if _cache is None else _cache
    out: Poly = {}
    for m, c in p.items():
        term: Poly = {(): Fraction(1)}
        for atom, k in m:
            key = (atom, k)
            val = cache.get(key)
            if val is None:
                if isinstance(atom, Coord):
                    base = images[atom.index]
                else:
                    new_arg = from_poly(subst_poly(to_poly(atom.arg), images, cache))
                    base = _trans_atom(type(atom), new_arg)
                val = poly_pow(base, k) if k > 1 else base
                cache[key] = val
            term = poly_mul(term, val)
            if not term:
                break
        out = poly_add(out, term, c)
    return out


def substitute(e: Expr, images: Sequence[Expr]) -> Expr:
    """Normalized ``e`` with ``Coord(i)`` replaced by ``images[i]``."""
    return from_poly(subst_poly(to_poly(e), [to_poly(x) for x in images]))


def partial_poly(p: Poly, i: int) -> Poly:
    """Partial derivative with respect to coordinate ``i``."""
    out: Poly = {}
    for m, c in p.items():
        for pos, (atom, k) in enumerate(m):
            d_atom = _atom_partial(atom, i)
            if not d_atom:
                continue
            rest = m[:pos] + ((atom, k - 1),) + m[pos + 1:] if k > 1 else m[:pos] + m[pos + 1:]
            out = poly_add(out, poly_mul({rest: c * k}, d_atom))
    return out


@lru_cache(maxsize=100_000)
def _atom_partial(atom: Expr, i: int) -> Poly:
    if isinstance(atom, Coord):
        return poly_const(1 if atom.index == i else 0)
    d_arg = partial_poly(to_poly(atom.arg), i)
    if not d_arg:
        return {}
    if isinstance(atom, Sin):
        outer = poly_atom(Cos(atom.arg))
    elif isinstance(atom, Cos):
        outer = poly_scale(Fraction(-1), poly_atom(Sin(atom.arg)))
    else:
        outer = poly_atom(atom)
    return poly_mul(outer, d_arg)


def partial(e: Expr, i: int) -> Expr:
    return from_poly(partial_poly(to_poly(e), i))


# -- evaluation --------------------------------------------------------------

def eval_exact(e: Expr, point: Sequence[Fraction]) -> Fraction:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Coord):
        return Fraction(point[e.index])
    if isinstance(e, Sum):
        return sum((c * eval_exact(t, point) for c, t in e.terms), Fraction(0))
    if isinstance(e, Prod):
        out = Fraction(1)
        for f in e.factors:
            out *= eval_exact(f, point)
        return out
    if isinstance(e, Pow):
        return eval_exact(e.base, point) ** e.exp
    raise ExactModeUnsupportedPrimitive(
        f"{type(e).__name__.lower()} cannot be evaluated exactly")


_FLOAT_FUNCS = {Sin: math.sin, Cos: math.cos, Exp: math.exp}


def eval_float(e: Expr, point: Sequence[float]) -> float:
    """Direct tree-walking evaluation; the batch kernels are faster."""
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Coord):
        return float(point[e.index])
    if isinstance(e, Sum):
        return math.fsum(float(c) * eval_float(t, point) for c, t in e.terms)
    if isinstance(e, Prod):
        out = 1.0
        for f in e.factors:
            out *= eval_float(f, point)
        return out
    if isinstance(e, Pow):
        return eval_float(e.base, point) ** e.exp
    return _FLOAT_FUNCS[type(e)](eval_float(e.arg, point))


def walk(e: Expr) -> Iterable[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())
