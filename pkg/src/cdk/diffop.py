"""The differential combinator of the smooth model and related predicates."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ShapeMismatch
from .expr import Coord, from_poly, partial_poly, poly_add, poly_mul, poly_atom, to_poly
from .maps import (
    DEFAULT_POLICY, EqPolicy, SmoothMap, Verdict, compose, lin_comb, maps_equal, pair, proj,
    zero,
)
from .shapes import Prod, Shape


def D(f: SmoothMap) -> SmoothMap:
    """Total derivative ``A × A → B``: base point first, tangent second."""
    n = f.dom.dim
    comps = []
    for c in f.comps:
        p = to_poly(c)
        out: dict = {}
        for i in range(n):
            d = partial_poly(p, i)
            if d:
                out = poly_add(out, poly_mul(d, poly_atom(Coord(n + i))))
        comps.append(from_poly(out))
    return SmoothMap(Prod(f.dom, f.dom), f.cod, tuple(comps))


@dataclass(frozen=True)
class DerivedMap:
    base: SmoothMap
    deriv: SmoothMap

    def __post_init__(self):
        if self.deriv.dom != Prod(self.base.dom, self.base.dom) or self.deriv.cod != self.base.cod:
            raise ShapeMismatch("derivative is not typed A×A → B for the base map")

    @classmethod
    def of(cls, f: SmoothMap) -> "DerivedMap":
        return cls(f, D(f))


def D_partial(context: Shape, f: SmoothMap) -> SmoothMap:
    """Derivative in the non-context block: ``(c, (a, b)) ↦ D f((c, a), (0, b))``."""
    if not isinstance(f.dom, Prod) or f.dom.left != context:
        raise ShapeMismatch(f"domain {f.dom} is not a product with context {context}")
    a = f.dom.right
    dom = Prod(context, Prod(a, a))
    c = proj(context, Prod(a, a), "left")
    ab = proj(context, Prod(a, a), "right")
    x = compose(proj(a, a, "left"), ab)
    b = compose(proj(a, a, "right"), ab)
    insert = pair(pair(c, x), pair(zero(dom, context), b))
    return compose(D(f), insert)


def T_obj(s: Shape) -> Shape:
    return Prod(s, s)


def T_map(f: SmoothMap) -> SmoothMap:
    """``⟨f∘π₁, D f⟩``."""
    return pair(compose(f, proj(f.dom, f.dom, "left")), D(f))


def is_D_linear(f: SmoothMap, policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    return maps_equal(D(f), compose(f, proj(f.dom, f.dom, "right")), policy)


def is_k_linear(f: SmoothMap, policy: EqPolicy = DEFAULT_POLICY, trials: int = 8,
                seed: int = 0) -> Verdict:
    """Check ``f∘(r·x + s·y) = r·(f∘x) + s·(f∘y)`` on seeded random data."""
    from .generate import DEFAULT_POOL, RandomMapConfig, gen_map, gen_scalars, gen_shape, rng_for

    cfg = RandomMapConfig(seed=seed, max_depth=2)
    for t in range(trials):
        rng = rng_for(seed, "k-linear", t)
        src = gen_shape(rng, (1, 2))
        r, s = gen_scalars(rng, DEFAULT_POOL, 2)
        x = gen_map(cfg, src, f.dom, 2 * t)
        y = gen_map(cfg, src, f.dom, 2 * t + 1)
        lhs = compose(f, lin_comb(r, x, s, y))
        rhs = lin_comb(r, compose(f, x), s, compose(f, y))
        v = maps_equal(lhs, rhs, policy)
        if not v:
            return Verdict(False, v.witness, v.residual, v.exact,
                           note=f"trial {t}: r={r}, s={s}")
    return Verdict(True, exact=f.polynomial)
