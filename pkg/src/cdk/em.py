"""Algebras of a differential monad and their lifted tangent structure."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Tuple

from .diffop import D, T_map, is_D_linear
from .errors import NotACDM, NotAnAlgebra, ShapeMismatch
from .kleisli import KleisliMap
from .maps import (
    DEFAULT_POLICY, EqPolicy, SmoothMap, Verdict, compose, identity, lin_comb, maps_equal,
    pair, proj, terminal, times, zero,
)
from .monads import MonadSpec, tangent_blocks
from .shapes import Prod, Shape, Unit


@dataclass(frozen=True, eq=False)
class Algebra:
    monad: MonadSpec
    carrier: Shape
    alpha: SmoothMap

    def __post_init__(self):
        want = self.monad.on_obj(self.carrier)
        if self.alpha.dom != want or self.alpha.cod != self.carrier:
            raise ShapeMismatch(f"structure map typed {self.alpha.dom} -> {self.alpha.cod}, "
                                f"expected {want} -> {self.carrier}")


def algebras_equal(a: Algebra, b: Algebra, policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    if a.monad is not b.monad or a.carrier != b.carrier:
        return Verdict(False, None, float("nan"), note="different monad or carrier")
    return maps_equal(a.alpha, b.alpha, policy)


def check_algebra(a: Algebra, policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    """``α∘μ = α∘S(α)`` and ``α∘η = 1``."""
    m, x, al = a.monad, a.carrier, a.alpha
    v = maps_equal(compose(al, m.mu(x)), compose(al, m.on_map(al)), policy)
    if not v:
        return Verdict(False, v.witness, v.residual, v.exact, note="associativity law")
    v = maps_equal(compose(al, m.eta(x)), identity(x), policy)
    if not v:
        return Verdict(False, v.witness, v.residual, v.exact, note="unit law")
    return v


def free_algebra(m: MonadSpec, a: Shape) -> Algebra:
    return Algebra(m, m.on_obj(a), m.mu(a))


def terminal_algebra(m: MonadSpec) -> Algebra:
    return Algebra(m, Unit, terminal(m.on_obj(Unit)))


def product_algebra(a: Algebra, b: Algebra) -> Algebra:
    """``(A × B, (α × β) ∘ ω_{A,B})``."""
    if a.monad is not b.monad:
        raise ShapeMismatch("algebras over different monads")
    m = a.monad
    return Algebra(m, Prod(a.carrier, b.carrier),
                   compose(times(a.alpha, b.alpha), m.omega(a.carrier, b.carrier)))


def _require(a: Algebra, policy: EqPolicy) -> None:
    if a.monad.verdicts.get("cdm") is False:
        raise NotACDM(f"monad {a.monad.name!r} failed the differential-monad checks")
    v = check_algebra(a, policy)
    if not v:
        raise NotAnAlgebra(f"{v.note} fails at {v.witness}")


def em_tangent(a: Algebra, policy: EqPolicy = DEFAULT_POLICY, check: bool = True) -> Algebra:
    """``(A × A, ⟨α∘π₁, D[α]∘ω_{A,A}⟩)``, i.e. ``T(α) ∘ ω_{A,A}``."""
    if check:
        _require(a, policy)
    x = a.carrier
    return Algebra(a.monad, Prod(x, x), compose(T_map(a.alpha), a.monad.omega(x, x)))


def _omega3(m: MonadSpec, x: Shape) -> SmoothMap:
    """``S(A × (A × A)) → S A × (S A × S A)`` built from the binary comparison."""
    inner = m.omega(x, x)
    outer = m.omega(x, Prod(x, x))
    return compose(times(identity(m.on_obj(x)), inner), outer)


def T2_map(f: SmoothMap) -> SmoothMap:
    """``⟨f∘π₁, D f∘⟨π₁,π₂⟩, D f∘⟨π₁,π₃⟩⟩`` on ``A × (A × A)``."""
    a = f.dom
    rest = Prod(a, a)
    p1 = proj(a, rest, "left")
    p2 = compose(proj(a, a, "left"), proj(a, rest, "right"))
    p3 = compose(proj(a, a, "right"), proj(a, rest, "right"))
    df = D(f)
    return pair(compose(f, p1), pair(compose(df, pair(p1, p2)), compose(df, pair(p1, p3))))


def em_tangent2(a: Algebra, policy: EqPolicy = DEFAULT_POLICY, check: bool = True) -> Algebra:
    """The algebra on the pullback ``T₂A = A × (A × A)``."""
    if check:
        _require(a, policy)
    x = a.carrier
    return Algebra(a.monad, Prod(x, Prod(x, x)), compose(T2_map(a.alpha), _omega3(a.monad, x)))


def is_algebra_morphism(f: SmoothMap, a: Algebra, b: Algebra,
                        policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    """``β ∘ S(f) = f ∘ α``."""
    if f.dom != a.carrier or f.cod != b.carrier:
        raise ShapeMismatch(f"{f.dom} -> {f.cod} is not {a.carrier} -> {b.carrier}")
    return maps_equal(compose(b.alpha, a.monad.on_map(f)), compose(f, a.alpha), policy)


# -- tangent structure on algebras ------------------------------------------------

def tangent_transformations(x: Shape) -> Dict[str, SmoothMap]:
    """``p, s, z, ℓ, c`` at an object ``A``."""
    p1, p2 = proj(x, x, "left"), proj(x, x, "right")
    rest = Prod(x, x)
    q1 = proj(x, rest, "left")
    q2 = compose(proj(x, x, "left"), proj(x, rest, "right"))
    q3 = compose(proj(x, x, "right"), proj(x, rest, "right"))
    w1, w2, w3, w4 = tangent_blocks(x)
    xx = Prod(x, x)
    return {
        "p": p1,
        "s": pair(q1, lin_comb(1, q2, 1, q3)),
        "z": pair(identity(x), zero(x, x)),
        "l": pair(pair(p1, zero(xx, x)), pair(zero(xx, x), p2)),
        "c": pair(pair(w1, w3), pair(w2, w4)),
    }


def check_tangent_morphisms(a: Algebra, policy: EqPolicy = DEFAULT_POLICY) -> Dict[str, Verdict]:
    """Each of ``p, s, z, ℓ, c`` is an algebra morphism between lifted algebras."""
    t = tangent_transformations(a.carrier)
    ta = em_tangent(a, policy)
    tta = em_tangent(ta, policy)
    t2a = em_tangent2(a, policy)
    return {
        "p": is_algebra_morphism(t["p"], ta, a, policy),
        "s": is_algebra_morphism(t["s"], t2a, ta, policy),
        "z": is_algebra_morphism(t["z"], a, ta, policy),
        "l": is_algebra_morphism(t["l"], ta, tta, policy),
        "c": is_algebra_morphism(t["c"], tta, tta, policy),
    }


def differential_object_data(x: Shape) -> Dict[str, SmoothMap]:
    """``p̂ = π₂``, ``σ = π₁ + π₂``, ``ζ = 0``."""
    p1, p2 = proj(x, x, "left"), proj(x, x, "right")
    return {"p_hat": p2, "sigma": lin_comb(1, p1, 1, p2), "zeta": zero(Unit, x)}


def is_differential_object(a: Algebra, policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    v = check_algebra(a, policy)
    if not v:
        raise NotAnAlgebra(f"{v.note} fails at {v.witness}")
    lin = is_D_linear(a.alpha, policy)
    if not lin:
        return lin
    data = differential_object_data(a.carrier)
    targets = [("p_hat", em_tangent(a, policy, check=False)),
               ("sigma", product_algebra(a, a)),
               ("zeta", terminal_algebra(a.monad))]
    for name, src in targets:
        v = is_algebra_morphism(data[name], src, a, policy)
        if not v:
            return Verdict(False, v.witness, v.residual, v.exact, note=f"{name} is not a morphism")
    return lin


def linear_iff_split(alpha: SmoothMap, policy: EqPolicy = DEFAULT_POLICY) -> Tuple[Verdict, Verdict]:
    """``(is α D-linear, does T(α) = α × α)``; the two should agree."""
    return is_D_linear(alpha, policy), maps_equal(T_map(alpha), times(alpha, alpha), policy)


def derivative_morphism(f: SmoothMap, a: Algebra, b: Algebra,
                        policy: EqPolicy = DEFAULT_POLICY) -> Verdict:
    """For differential objects, ``D f : (A,α) × (A,α) → (B,β)`` is a morphism."""
    return is_algebra_morphism(D(f), product_algebra(a, a), b, policy)


def embed_E(f: KleisliMap, policy: EqPolicy = DEFAULT_POLICY) -> Tuple[SmoothMap, Algebra, Algebra]:
    """``μ_B ∘ S⟦f⟧ : (S A, μ_A) → (S B, μ_B)``."""
    m = f.monad
    if m.verdicts.get("cdm") is False:
        raise NotACDM(f"monad {m.name!r} failed the differential-monad checks")
    e = compose(m.mu(f.cod), m.on_map(f.carrier))
    src, tgt = free_algebra(m, f.dom), free_algebra(m, f.cod)
    v = is_algebra_morphism(e, src, tgt, policy)
    if not v:
        raise NotAnAlgebra(f"embedded map is not an algebra morphism at {v.witness}")
    return e, src, tgt


def unembed(e: SmoothMap, m: MonadSpec, a: Shape, b: Shape) -> KleisliMap:
    """Recover the carrier as ``E(f) ∘ η_A``."""
    return KleisliMap(m, a, b, compose(e, m.eta(a)))


AlgebraBuilder = Callable[[MonadSpec, Shape], Algebra]
