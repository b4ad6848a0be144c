"""Seeded random shapes, expressions and maps for the law suites."""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from .expr import Const, Coord, Cos, Exp, Expr, Pow, Sin, add, mul, normalize, scale
from .maps import SmoothMap
from .shapes import Line, Prod, Shape

DEFAULT_POOL = tuple(Fraction(v) for v in ("-2", "-1", "-1/2", "1/2", "1", "3/2", "2", "3"))


@dataclass(frozen=True)
class RandomMapConfig:
    seed: int = 0
    max_depth: int = 3
    dims: Tuple[int, int] = (1, 3)
    allow_transcendental: bool = False
    coefficient_pool: Tuple[Fraction, ...] = DEFAULT_POOL

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        lo, hi = self.dims
        if lo < 1 or hi < lo:
            raise ValueError("dims must be a nonempty range of positive leaf counts")
        if not self.coefficient_pool:
            raise ValueError("coefficient_pool must be nonempty")

    def replace(self, **kw) -> "RandomMapConfig":
        fields = dict(seed=self.seed, max_depth=self.max_depth, dims=self.dims,
                      allow_transcendental=self.allow_transcendental,
                      coefficient_pool=self.coefficient_pool)
        fields.update(kw)
        return RandomMapConfig(**fields)


def _stable(text: str) -> int:
    return zlib.crc32(text.encode())


def rng_for(seed: int, *parts) -> np.random.Generator:
    """Generator keyed by the seed and any number of ints/strings."""
    key = [seed & 0xFFFFFFFFFFFFFFFF]
    key.extend(p if isinstance(p, int) else _stable(repr(p)) for p in parts)
    return np.random.default_rng(key)


def gen_shape(rng: np.random.Generator, dims: Tuple[int, int]) -> Shape:
    n = int(rng.integers(dims[0], dims[1] + 1))
    return _bracket(rng, n)


def _bracket(rng, n: int) -> Shape:
    if n == 1:
        return Line
    k = int(rng.integers(1, n))
    return Prod(_bracket(rng, k), _bracket(rng, n - k))


def _coef(rng, pool) -> Fraction:
    return pool[int(rng.integers(len(pool)))]


def _affine(rng, nvars: int, pool, allow_const=True) -> Expr:
    terms = []
    if allow_const and rng.random() < 0.6:
        terms.append(scale(_coef(rng, pool), Const(Fraction(1))))
    if nvars:
        k = int(rng.integers(1, min(nvars, 3) + 1))
        for i in sorted(rng.choice(nvars, size=k, replace=False).tolist()):
            terms.append(scale(_coef(rng, pool), Coord(i)))
    if not terms:
        return Const(_coef(rng, pool))
    return add(*terms)


def gen_expr(rng: np.random.Generator, nvars: int, depth: int, cfg: RandomMapConfig) -> Expr:
    """Random expression of polynomial degree at most ``max(depth, 2)``."""
    pool = cfg.coefficient_pool
    if depth <= 1 or nvars == 0:
        return _affine(rng, nvars, pool)
    kinds = ["sum", "prod", "prod", "pow"]
    if cfg.allow_transcendental:
        kinds += ["sin", "cos", "exp"]
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "sum":
        return add(gen_expr(rng, nvars, depth - 1, cfg),
                   scale(_coef(rng, pool), gen_expr(rng, nvars, depth - 1, cfg)))
    if kind == "prod":
        return mul(gen_expr(rng, nvars, depth - 1, cfg), _affine(rng, nvars, pool))
    if kind == "pow":
        return Pow(_affine(rng, nvars, pool), 2)
    inner = gen_expr(rng, nvars, min(depth - 1, 2), cfg)
    # keep arguments of exp small so sampled values stay moderate
    if kind == "exp":
        return Exp(scale(Fraction(1, 2), inner))
    return (Sin if kind == "sin" else Cos)(inner)


def gen_map(cfg: RandomMapConfig, dom: Shape, cod: Shape, index: int = 0) -> SmoothMap:
    """Deterministic in ``(cfg, dom, cod, index)``."""
    rng = rng_for(cfg.seed, index, dom, cod)
    comps = []
    for _ in range(cod.dim):
        depth = int(rng.integers(1, cfg.max_depth + 1))
        comps.append(normalize(gen_expr(rng, dom.dim, depth, cfg)))
    return SmoothMap(dom, cod, tuple(comps))


def gen_linear_map(cfg: RandomMapConfig, dom: Shape, cod: Shape, index: int = 0) -> SmoothMap:
    """A random D-linear (homogeneous linear) map."""
    rng = rng_for(cfg.seed, "linear", index, dom, cod)
    comps = [normalize(_affine(rng, dom.dim, cfg.coefficient_pool, allow_const=False))
             if dom.dim else Const(Fraction(0)) for _ in range(cod.dim)]
    return SmoothMap(dom, cod, tuple(comps))


def gen_scalars(rng: np.random.Generator, pool: Sequence[Fraction], n: int):
    return [_coef(rng, pool) for _ in range(n)]
