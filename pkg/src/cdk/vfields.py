"""Generalized vector fields: Kleisli maps of the tangent-bundle monad as pairs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .diffop import D
from .errors import ShapeMismatch
from .kleisli import KleisliMap, k_compose
from .maps import (
    DEFAULT_POLICY, EqPolicy, SmoothMap, Verdict, add_maps, compose, identity, maps_equal,
    pair, proj, zero,
)
from .monads import MonadSpec, tangent_monad
from .shapes import Prod, Shape


@dataclass(frozen=True)
class GenVectorField:
    dom: Shape
    cod: Shape
    f1: SmoothMap
    f2: SmoothMap

    def __post_init__(self):
        for f in (self.f1, self.f2):
            if f.dom != self.dom or f.cod != self.cod:
                raise ShapeMismatch(f"component typed {f.dom} -> {f.cod}, "
                                    f"expected {self.dom} -> {self.cod}")

    @classmethod
    def of(cls, f1: SmoothMap, f2: SmoothMap) -> "GenVectorField":
        return cls(f1.dom, f1.cod, f1, f2)

    @classmethod
    def from_carrier(cls, carrier: SmoothMap) -> "GenVectorField":
        """Split ``A → B × B`` into its two components."""
        c = carrier.cod
        if not isinstance(c, Prod) or c.left != c.right:
            raise ShapeMismatch(f"{c} is not of the form B × B")
        return cls.of(compose(proj(c.left, c.right, "left"), carrier),
                      compose(proj(c.left, c.right, "right"), carrier))

    @classmethod
    def from_kleisli(cls, f: KleisliMap) -> "GenVectorField":
        return cls.from_carrier(f.carrier)

    @property
    def carrier(self) -> SmoothMap:
        return pair(self.f1, self.f2)

    def to_kleisli(self, m: Optional[MonadSpec] = None) -> KleisliMap:
        return KleisliMap(m or tangent_monad(), self.dom, self.cod, self.carrier)

    def is_strict(self, policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
        """A vector field proper has first component the identity."""
        if self.dom != self.cod:
            return Verdict(False, None, float("nan"), note="domain and codomain differ")
        return maps_equal(self.f1, identity(self.dom), policy)


def vf_identity(a: Shape) -> GenVectorField:
    return GenVectorField(a, a, identity(a), zero(a, a))


def vf_compose(g: GenVectorField, f: GenVectorField) -> GenVectorField:
    """``⟨g₁∘f₁, g₂∘f₁ + D[g₁]∘⟨f₁,f₂⟩ + D[g₂]∘⟨f₁,f₂⟩⟩``."""
    if f.cod != g.dom:
        raise ShapeMismatch(f"cannot compose: {f.cod} is not {g.dom}")
    ff = pair(f.f1, f.f2)
    second = add_maps(add_maps(compose(g.f2, f.f1), compose(D(g.f1), ff)),
                      compose(D(g.f2), ff))
    return GenVectorField(f.dom, g.cod, compose(g.f1, f.f1), second)


def vf_compose_terms(g: GenVectorField, f: GenVectorField) -> Tuple[SmoothMap, SmoothMap, SmoothMap]:
    """The three summands of the second component, each normalized on its own."""
    if f.cod != g.dom:
        raise ShapeMismatch(f"cannot compose: {f.cod} is not {g.dom}")
    ff = pair(f.f1, f.f2)
    return (compose(g.f2, f.f1).normalized(), compose(D(g.f1), ff).normalized(),
            compose(D(g.f2), ff).normalized())


def vf_D(f: GenVectorField) -> GenVectorField:
    """``⟨D f₁, D f₂⟩``."""
    return GenVectorField(Prod(f.dom, f.dom), f.cod, D(f.f1), D(f.f2))


def vf_equal(a: GenVectorField, b: GenVectorField, policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    if (a.dom, a.cod) != (b.dom, b.cod):
        raise ShapeMismatch("vector fields are not parallel")
    return maps_equal(a.carrier, b.carrier, policy)


def vf_cross_check(g: GenVectorField, f: GenVectorField, policy: EqPolicy = DEFAULT_POLICY,
                   m: Optional[MonadSpec] = None) -> Verdict:
    """Compare :func:`vf_compose` with generic Kleisli composition."""
    m = m or tangent_monad()
    generic = k_compose(g.to_kleisli(m), f.to_kleisli(m))
    return maps_equal(vf_compose(g, f).carrier, generic.carrier, policy)


def vf_discrepancy(g: GenVectorField, f: GenVectorField) -> SmoothMap:
    """The term ``D[g₂]∘⟨f₁,f₂⟩`` by which the direct formula exceeds
    Kleisli composition for the multiplication ``⟨π₁, π₂+π₃⟩``."""
    return compose(D(g.f2), pair(f.f1, f.f2))
