"""Typed maps of the SMOOTH model and the equality oracle.

A :class:`SmoothMap` is a tuple of scalar expressions, one per leaf of the
codomain shape, in the coordinates of the domain shape.  Composition is
substitution; every constructor here returns normalized components.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from ._kernels import opcodes as op
from .errors import DimensionMismatch, ExactModeUnsupportedPrimitive, ShapeMismatch
from .expr import (
    Const, Coord, Cos, Exp, Expr, Pow, Prod as PProd, Sin, Sum,
    as_fraction, eval_exact, from_poly, is_polynomial, max_coord, normalize,
    poly_add, subst_poly, to_poly,
)
from .shapes import Prod, Shape, Unit


@dataclass(frozen=True)
class SmoothMap:
    dom: Shape
    cod: Shape
    comps: Tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "comps", tuple(self.comps))
        if len(self.comps) != self.cod.dim:
            raise DimensionMismatch(
                f"{len(self.comps)} components for codomain of dim {self.cod.dim}")
        for c in self.comps:
            if max_coord(c) >= self.dom.dim:
                raise DimensionMismatch(
                    f"coordinate x{max_coord(c)} outside domain of dim {self.dom.dim}")

    @cached_property
    def polynomial(self) -> bool:
        return all(is_polynomial(c) for c in self.comps)

    @cached_property
    def program(self) -> "Program":
        return compile_exprs(self.comps)

    def normalized(self) -> "SmoothMap":
        return SmoothMap(self.dom, self.cod, tuple(normalize(c) for c in self.comps))

    def __call__(self, *coords):
        return evaluate(self, coords)

    def __str__(self):
        from .syntax import format_map

        return format_map(self)


def _check_dims(f: SmoothMap, p: Sequence) -> None:
    if len(p) != f.dom.dim:
        raise DimensionMismatch(f"point of length {len(p)} for domain of dim {f.dom.dim}")


# -- product structure -------------------------------------------------------

def identity(a: Shape) -> SmoothMap:
    return SmoothMap(a, a, tuple(Coord(i) for i in range(a.dim)))


def zero(a: Shape, b: Shape) -> SmoothMap:
    return SmoothMap(a, b, (Const(Fraction(0)),) * b.dim)


def terminal(a: Shape) -> SmoothMap:
    """The unique map to ``Unit`` (which is also the zero map)."""
    return SmoothMap(a, Unit, ())


def proj(s1: Shape, s2: Shape, side: str) -> SmoothMap:
    dom = Prod(s1, s2)
    if side == "left":
        return SmoothMap(dom, s1, tuple(Coord(i) for i in range(s1.dim)))
    if side == "right":
        return SmoothMap(dom, s2, tuple(Coord(s1.dim + i) for i in range(s2.dim)))
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def pair(f: SmoothMap, g: SmoothMap) -> SmoothMap:
    if f.dom != g.dom:
        raise ShapeMismatch(f"cannot pair maps from {f.dom} and {g.dom}")
    return SmoothMap(f.dom, Prod(f.cod, g.cod), f.comps + g.comps)


def times(f: SmoothMap, g: SmoothMap) -> SmoothMap:
    """``f × g = ⟨f∘π₁, g∘π₂⟩``."""
    left = proj(f.dom, g.dom, "left")
    right = proj(f.dom, g.dom, "right")
    return pair(compose(f, left), compose(g, right))


# -- category and module structure ---------------------------------------------

def compose(g: SmoothMap, f: SmoothMap) -> SmoothMap:
    """``g ∘ f`` by substitution of ``f``'s components into ``g``."""
    if f.cod != g.dom:
        raise ShapeMismatch(f"cannot compose: {f.cod} is not {g.dom}")
    images = [to_poly(c) for c in f.comps]
    cache: dict = {}
    comps = tuple(from_poly(subst_poly(to_poly(c), images, cache)) for c in g.comps)
    return SmoothMap(f.dom, g.cod, comps)


def lin_comb(r, f: SmoothMap, s, g: SmoothMap) -> SmoothMap:
    """``r·f + s·g`` computed componentwise."""
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeMismatch("lin_comb needs parallel maps")
    r, s = as_fraction(r), as_fraction(s)
    comps = tuple(
        from_poly(poly_add(poly_add({}, to_poly(a), r), to_poly(b), s))
        for a, b in zip(f.comps, g.comps))
    return SmoothMap(f.dom, f.cod, comps)


def add_maps(f: SmoothMap, g: SmoothMap) -> SmoothMap:
    return lin_comb(1, f, 1, g)


def scale_map(r, f: SmoothMap) -> SmoothMap:
    return lin_comb(r, f, 0, f)


def normalize_map(f: SmoothMap) -> SmoothMap:
    return f.normalized()


# -- evaluation ----------------------------------------------------------------

@dataclass(frozen=True)
class Program:
    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    ncomp: int
    max_stack: int


_FUNC_OPS = {Sin: op.SIN, Cos: op.COS, Exp: op.EXP}


def compile_exprs(exprs: Sequence[Expr]) -> Program:
    """Flatten expressions into one postfix program, one OUT per component."""
    ops, args = [], []
    consts: list = []
    const_index: dict = {}
    depth = 0
    max_depth = 0

    def emit(o, a=0, delta=0):
        nonlocal depth, max_depth
        ops.append(o)
        args.append(a)
        depth += delta
        max_depth = max(max_depth, depth)

    def cidx(value) -> int:
        v = float(value)
        if v not in const_index:
            const_index[v] = len(consts)
            consts.append(v)
        return const_index[v]

    def visit(e: Expr):
        if isinstance(e, Const):
            emit(op.CONST, cidx(e.value), 1)
        elif isinstance(e, Coord):
            emit(op.COORD, e.index, 1)
        elif isinstance(e, Sum):
            if not e.terms:
                emit(op.CONST, cidx(0), 1)
                return
            for c, t in e.terms:
                visit(t)
                if c != 1:
                    emit(op.SCALE, cidx(c))
            emit(op.ADD, len(e.terms), 1 - len(e.terms))
        elif isinstance(e, PProd):
            for f in e.factors:
                visit(f)
            emit(op.MUL, len(e.factors), 1 - len(e.factors))
        elif isinstance(e, Pow):
            visit(e.base)
            emit(op.POW, e.exp)
        else:
            visit(e.arg)
            emit(_FUNC_OPS[type(e)])

    for j, e in enumerate(exprs):
        visit(e)
        emit(op.OUT, j, -1)
    return Program(np.asarray(ops, dtype=np.intc), np.asarray(args, dtype=np.intc),
                   np.asarray(consts, dtype=np.float64), len(exprs), max(max_depth, 1))


def eval_batch(f: SmoothMap, points, backend=None) -> np.ndarray:
    """Evaluate ``f`` at each row of ``points`` (float arithmetic)."""
    pts = np.asarray(points, dtype=np.float64)
    if f.dom.dim == 0:
        pts = pts.reshape(pts.shape[0] if pts.ndim == 2 else 1, 0)
    else:
        pts = pts.reshape(-1, f.dom.dim)
    prog = f.program
    run = backend or _kernels.run_program
    return run(prog.ops, prog.args, prog.consts, pts, prog.ncomp, prog.max_stack)


def evaluate(f: SmoothMap, p: Sequence, exact: bool = False) -> tuple:
    """Componentwise value of ``f`` at ``p``.

    With ``exact=True`` (or when every coordinate of ``p`` is an int or
    Fraction and ``f`` is polynomial) the result is a tuple of Fractions.
    """
    _check_dims(f, p)
    if exact or (f.polynomial and all(isinstance(v, (int, Fraction)) for v in p)):
        pt = [as_fraction(v) if not isinstance(v, float) else Fraction(v) for v in p]
        return tuple(eval_exact(c, pt) for c in f.comps)
    return tuple(float(v) for v in eval_batch(f, [list(map(float, p))])[0])


# -- equality oracle -----------------------------------------------------------

@dataclass(frozen=True)
class EqPolicy:
    """How map equality is decided.

    ``mode`` is ``"exact"`` (normal forms, polynomial fragment),
    ``"sampled"`` (seeded points in a box) or ``"auto"`` (exact when both
    maps are polynomial, sampled otherwise).
    """

    mode: str = "auto"
    num_points: int = 32
    seed: int = 0
    box_halfwidth: float = 1.5
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("exact", "sampled", "auto"):
            raise ValueError(f"unknown equality mode {self.mode!r}")
        if self.num_points < 1:
            raise ValueError("num_points must be >= 1")
        if self.box_halfwidth <= 0 or self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("box_halfwidth and tolerances must be positive")

    @classmethod
    def exact(cls) -> "EqPolicy":
        return cls(mode="exact")

    @classmethod
    def sampled(cls, num_points=32, seed=0, box_halfwidth=1.5, abs_tol=1e-9, rel_tol=1e-9):
        return cls("sampled", num_points, seed, box_halfwidth, abs_tol, rel_tol)

    def with_seed(self, seed: int) -> "EqPolicy":
        return EqPolicy(self.mode, self.num_points, seed, self.box_halfwidth,
                        self.abs_tol, self.rel_tol)


DEFAULT_POLICY = EqPolicy()


@dataclass(frozen=True)
class Verdict:
    equal: bool
    witness: Optional[Tuple[float, ...]] = None
    residual: float = 0.0
    exact: bool = False
    note: str = field(default="", compare=False)

    def __bool__(self):
        return self.equal


def sample_points(dim: int, policy: EqPolicy) -> np.ndarray:
    """``num_points`` uniform points; point ``i`` depends only on ``(seed, i)``."""
    seed = policy.seed & 0xFFFFFFFFFFFFFFFF
    pts = np.empty((policy.num_points, dim))
    for i in range(policy.num_points):
        rng = np.random.default_rng([seed, i])
        pts[i] = rng.uniform(-policy.box_halfwidth, policy.box_halfwidth, dim)
    return pts


def _require_parallel(f: SmoothMap, g: SmoothMap) -> None:
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeMismatch(f"maps are not parallel: {f.dom}->{f.cod} vs {g.dom}->{g.cod}")


def _exact_witness(diffs, dim: int, seed: int):
    """Search for a rational point where some difference polynomial is nonzero."""
    def check(pt):
        vals = [abs(eval_exact(d, pt)) for d in diffs]
        worst = max(vals)
        return worst if worst else None

    if dim <= 4:
        for pt in itertools.product(range(-2, 3), repeat=dim):
            r = check([Fraction(v) for v in pt])
            if r is not None:
                return pt, r
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 0xE7AC7])
    for _ in range(256):
        pt = [Fraction(int(v), int(q)) for v, q in
              zip(rng.integers(-9, 10, dim), rng.integers(1, 5, dim))]
        r = check(pt)
        if r is not None:
            return tuple(pt), r
    return None, None


def maps_equal(f: SmoothMap, g: SmoothMap, policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    _require_parallel(f, g)
    mode = policy.mode
    if mode == "auto":
        mode = "exact" if (f.polynomial and g.polynomial) else "sampled"
    if mode == "exact":
        return _exact_equal(f, g, policy)
    return _sampled_equal(f, g, policy)


def _exact_equal(f: SmoothMap, g: SmoothMap, policy: EqPolicy) -> Verdict:
    diffs = []
    for a, b in zip(f.comps, g.comps):
        d = from_poly(poly_add(to_poly(a), to_poly(b), Fraction(-1)))
        if d != Const(Fraction(0)):
            diffs.append(d)
    if not diffs:
        return Verdict(True, exact=True)
    if not all(is_polynomial(d) for d in diffs):
        raise ExactModeUnsupportedPrimitive(
            "normal forms differ and contain transcendental nodes; use sampled equality")
    pt, r = _exact_witness(diffs, f.dom.dim, policy.seed)
    if pt is None:
        return Verdict(False, None, float("nan"), exact=True, note="normal forms differ")
    return Verdict(False, tuple(float(v) for v in pt), float(r), exact=True)


def _sampled_equal(f: SmoothMap, g: SmoothMap, policy: EqPolicy) -> Verdict:
    if f.cod.dim == 0:
        return Verdict(True)
    pts = sample_points(f.dom.dim, policy)
    lhs = eval_batch(f, pts)
    rhs = eval_batch(g, pts)
    with np.errstate(invalid="ignore"):
        diff = np.abs(lhs - rhs)
        bound = policy.abs_tol + policy.rel_tol * np.maximum(np.abs(lhs), np.abs(rhs))
        bad = ~(diff <= bound)
    rows = np.flatnonzero(bad.any(axis=1))
    if rows.size == 0:
        return Verdict(True, residual=float(diff.max()) if diff.size else 0.0)
    i = int(rows[0])
    return Verdict(False, tuple(float(v) for v in pts[i]), float(np.nanmax(diff[i])))
