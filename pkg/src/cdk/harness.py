"""Category-generic law suites.

A handle packages the operations needed to state the differential axioms:
identity, composition, projections, pairing, linear combination, zero,
the derivative and equality.  The same suite runs against the smooth model,
any Kleisli category of a presented monad, and a simple slice.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import em, kleisli as kl
from .diffop import D as total_D, D_partial
from .errors import DimensionMismatch
from .expr import Coord, Const, mul, power, substitute
from .generate import RandomMapConfig, gen_map, gen_scalars, gen_shape, rng_for
from .maps import (
    EqPolicy, SmoothMap, Verdict, compose, eval_batch, identity, lin_comb,
    maps_equal, pair, proj, zero,
)
from .monads import (
    MonadCheckConfig, MonadSpec, _Trials, check_cartesian_k_linear, check_cdm,
    check_monad_laws, identity_monad,
)
from .report import CheckReport, sub_seed
from .shapes import Prod, Shape

Diff = Callable[[SmoothMap], SmoothMap]


# -- handles ------------------------------------------------------------------------

class DiffCategoryHandle:
    """Operations of a Cartesian differential category over opaque maps."""

    name = "abstract"

    def dom(self, f) -> Shape: raise NotImplementedError
    def cod(self, f) -> Shape: raise NotImplementedError
    def identity(self, a: Shape): raise NotImplementedError
    def compose(self, g, f): raise NotImplementedError
    def proj(self, a: Shape, b: Shape, side: str): raise NotImplementedError
    def pair(self, f, g): raise NotImplementedError
    def lin_comb(self, r, f, s, g): raise NotImplementedError
    def zero(self, a: Shape, b: Shape): raise NotImplementedError
    def D(self, f): raise NotImplementedError
    def maps_equal(self, f, g, policy: EqPolicy) -> Verdict: raise NotImplementedError
    def gen_map(self, cfg: RandomMapConfig, dom: Shape, cod: Shape, index: int): raise NotImplementedError


class SmoothCategory(DiffCategoryHandle):
    def __init__(self, diff: Diff = total_D, name: str = "smooth"):
        self.diff, self.name = diff, name

    def dom(self, f): return f.dom
    def cod(self, f): return f.cod
    def identity(self, a): return identity(a)
    def compose(self, g, f): return compose(g, f)
    def proj(self, a, b, side): return proj(a, b, side)
    def pair(self, f, g): return pair(f, g)
    def lin_comb(self, r, f, s, g): return lin_comb(r, f, s, g)
    def zero(self, a, b): return zero(a, b)
    def D(self, f): return self.diff(f)
    def maps_equal(self, f, g, policy): return maps_equal(f, g, policy)
    def gen_map(self, cfg, dom, cod, index): return gen_map(cfg, dom, cod, index)


class KleisliCategory(DiffCategoryHandle):
    def __init__(self, monad: MonadSpec, diff: Diff = total_D):
        self.m, self.diff = monad, diff
        self.name = f"kleisli[{monad.name}]"

    def dom(self, f): return f.dom
    def cod(self, f): return f.cod
    def identity(self, a): return kl.k_id(self.m, a)
    def compose(self, g, f): return kl.k_compose(g, f)
    def proj(self, a, b, side): return kl.k_proj(self.m, a, b, side)
    def pair(self, f, g): return kl.k_pair(f, g)
    def lin_comb(self, r, f, s, g): return kl.k_lin_comb(r, f, s, g)
    def zero(self, a, b): return kl.k_zero(self.m, a, b)
    def D(self, f): return kl.k_D(f, self.diff)
    def maps_equal(self, f, g, policy): return kl.k_equal(f, g, policy)

    def gen_map(self, cfg, dom, cod, index):
        return kl.KleisliMap(self.m, dom, cod, gen_map(cfg, dom, self.m.on_obj(cod), index))


@dataclass(frozen=True)
class SliceMap:
    """A map ``A → B`` of the simple slice: ``body : C × A → B``."""
    dom: Shape
    cod: Shape
    body: SmoothMap


class SliceCategory(DiffCategoryHandle):
    """The simple slice over a context; its derivative is the partial one."""

    def __init__(self, context: Shape):
        self.c = context
        self.s = kl.SimpleSlice(context)
        self.name = f"slice[{context}]"

    def _wrap(self, body: SmoothMap) -> SliceMap:
        return SliceMap(self.s.dom(body), body.cod, body)

    def dom(self, f): return f.dom
    def cod(self, f): return f.cod
    def identity(self, a): return self._wrap(self.s.identity(a))
    def compose(self, g, f): return self._wrap(self.s.compose(g.body, f.body))
    def proj(self, a, b, side): return self._wrap(self.s.proj(a, b, side))
    def pair(self, f, g): return self._wrap(pair(f.body, g.body))
    def lin_comb(self, r, f, s, g): return self._wrap(lin_comb(r, f.body, s, g.body))
    def zero(self, a, b): return self._wrap(zero(Prod(self.c, a), b))
    def D(self, f): return self._wrap(D_partial(self.c, f.body))
    def maps_equal(self, f, g, policy): return maps_equal(f.body, g.body, policy)

    def gen_map(self, cfg, dom, cod, index):
        return self._wrap(gen_map(cfg, Prod(self.c, dom), cod, index))


# -- the differential axioms ---------------------------------------------------------

def _blocks3(cat, a):
    rest = Prod(a, a)
    p1 = cat.proj(a, rest, "left")
    r = cat.proj(a, rest, "right")
    return p1, cat.compose(cat.proj(a, a, "left"), r), cat.compose(cat.proj(a, a, "right"), r)


def _blocks4(cat, a):
    aa = Prod(a, a)
    first, second = cat.proj(aa, aa, "left"), cat.proj(aa, aa, "right")
    return (cat.compose(cat.proj(a, a, "left"), first), cat.compose(cat.proj(a, a, "right"), first),
            cat.compose(cat.proj(a, a, "left"), second), cat.compose(cat.proj(a, a, "right"), second))


def cd_axiom_checks(cat: DiffCategoryHandle, f, f2, g, r, s, policy: EqPolicy):
    """The seven axioms (plus the derived form of CD.4) for one instantiation.

    ``f, f2 : A → B`` and ``g : B → C``.  Returns ``[(axiom, thunk)]``.
    """
    a, b = cat.dom(f), cat.cod(f)
    eq = cat.maps_equal
    Dm = cat.D

    def cd1():
        return eq(Dm(cat.lin_comb(r, f, s, f2)), cat.lin_comb(r, Dm(f), s, Dm(f2)), policy)

    def cd2():
        p1, p2, p3 = _blocks3(cat, a)
        df = Dm(f)
        lhs = cat.compose(df, cat.pair(p1, cat.lin_comb(r, p2, s, p3)))
        rhs = cat.lin_comb(r, cat.compose(df, cat.pair(p1, p2)),
                           s, cat.compose(df, cat.pair(p1, p3)))
        return eq(lhs, rhs, policy)

    def cd3():
        v = eq(Dm(cat.identity(a)), cat.proj(a, a, "right"), policy)
        if not v or not isinstance(a, Prod):
            return v
        for side in ("left", "right"):
            pj = cat.proj(a.left, a.right, side)
            v = eq(Dm(pj), cat.compose(pj, cat.proj(a, a, "right")), policy)
            if not v:
                return v
        return v

    def cd4():
        return eq(Dm(cat.pair(f, f2)), cat.pair(Dm(f), Dm(f2)), policy)

    def cd4_derived():
        # project the derivative of a pairing; by CD.3 and CD.5 this is D of the component
        dp = Dm(cat.pair(f, f2))
        v = eq(cat.compose(cat.proj(b, b, "left"), dp), Dm(f), policy)
        if not v:
            return v
        return eq(cat.compose(cat.proj(b, b, "right"), dp), Dm(f2), policy)

    def cd5():
        p1 = cat.proj(a, a, "left")
        rhs = cat.compose(Dm(g), cat.pair(cat.compose(f, p1), Dm(f)))
        return eq(Dm(cat.compose(g, f)), rhs, policy)

    def cd6():
        aa = Prod(a, a)
        x1, x2 = cat.proj(a, a, "left"), cat.proj(a, a, "right")
        z = cat.zero(aa, a)
        ins = cat.pair(cat.pair(x1, z), cat.pair(z, x2))
        return eq(cat.compose(Dm(Dm(f)), ins), Dm(f), policy)

    def cd7():
        w1, w2, w3, w4 = _blocks4(cat, a)
        ddf = Dm(Dm(f))
        return eq(cat.compose(ddf, cat.pair(cat.pair(w1, w3), cat.pair(w2, w4))), ddf, policy)

    return [("CD.1", cd1), ("CD.2", cd2), ("CD.3", cd3), ("CD.4", cd4),
            ("CD.4(derived)", cd4_derived), ("CD.5", cd5), ("CD.6", cd6), ("CD.7", cd7)]


CD_AXIOMS = ("CD.1", "CD.2", "CD.3", "CD.4", "CD.4(derived)", "CD.5", "CD.6", "CD.7")


@dataclass(frozen=True)
class CDSuiteConfig:
    generator: RandomMapConfig = RandomMapConfig(max_depth=3, dims=(1, 3))
    trials: int = 16
    sampled_trials: int = 8
    sampled_policy: EqPolicy = EqPolicy.sampled(abs_tol=1e-9, rel_tol=1e-9)
    exact_policy: EqPolicy = EqPolicy.exact()

    def __post_init__(self):
        if self.trials < 0 or self.sampled_trials < 0 or self.trials + self.sampled_trials < 1:
            raise ValueError("need at least one trial")


def run_cd_suite(cat: DiffCategoryHandle, cfg: CDSuiteConfig = CDSuiteConfig(),
                 axioms: Sequence[str] = CD_AXIOMS) -> CheckReport:
    """Polynomial trials under exact equality, then transcendental trials sampled."""
    rep = CheckReport(f"cd[{cat.name}]")
    passes = [(cfg.generator.replace(allow_transcendental=False), cfg.exact_policy, cfg.trials, 0),
              (cfg.generator.replace(allow_transcendental=True, max_depth=min(cfg.generator.max_depth, 3)),
               cfg.sampled_policy, cfg.sampled_trials, cfg.trials)]
    for gen, policy, n, offset in passes:
        for k in range(n):
            t = offset + k
            rng = rng_for(gen.seed, "cd", cat.name, t)
            seed = sub_seed(gen.seed, "cd", t)
            pol = policy.with_seed(seed)
            a, b, c = (gen_shape(rng, gen.dims) for _ in range(3))
            r, s = gen_scalars(rng, gen.coefficient_pool, 2)
            f = cat.gen_map(gen, a, b, 4 * t)
            f2 = cat.gen_map(gen, a, b, 4 * t + 1)
            g = cat.gen_map(gen, b, c, 4 * t + 2)
            for name, thunk in cd_axiom_checks(cat, f, f2, g, r, s, pol):
                if name in axioms:
                    rep.run(name, t, seed, thunk)
    rep.cases.sort(key=lambda c: (CD_AXIOMS.index(c.axiom), c.trial))
    return rep


# -- numerical oracle ----------------------------------------------------------------

def fd_oracle(f: SmoothMap, p: Sequence[float], v: Sequence[float], h: float = 1e-4) -> np.ndarray:
    """Central difference ``(F(p + h v) − F(p − h v)) / 2h``."""
    if h <= 0:
        raise ValueError("h must be positive")
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if p.shape != (f.dom.dim,) or v.shape != (f.dom.dim,):
        raise DimensionMismatch(f"point/tangent of dims {p.shape}, {v.shape} for domain {f.dom.dim}")
    vals = eval_batch(f, np.stack([p + h * v, p - h * v]))
    return (vals[0] - vals[1]) / (2 * h)


def oracle_check(f: SmoothMap, p, v, h: float = 1e-4, abs_tol: float = 1e-5,
                 rel_tol: float = 1e-5) -> Verdict:
    """Compare ``D f (p, v)`` with the central-difference oracle."""
    sym = eval_batch(total_D(f), [np.concatenate([np.asarray(p, float), np.asarray(v, float)])])[0]
    num = fd_oracle(f, p, v, h)
    diff = np.abs(sym - num)
    bad = ~(diff <= abs_tol + rel_tol * np.maximum(np.abs(sym), np.abs(num)))
    res = float(diff.max()) if diff.size else 0.0
    if bad.any():
        return Verdict(False, tuple(map(float, p)) + tuple(map(float, v)), res)
    return Verdict(True, residual=res)


# -- mutants of the derivative -----------------------------------------------------------

def _at_zero(f: SmoothMap) -> SmoothMap:
    """``f(0)`` as a constant map on the same domain."""
    zs = [Const(Fraction(0))] * f.dom.dim
    return SmoothMap(f.dom, f.cod, tuple(substitute(c, zs) for c in f.comps))


def _times(u: SmoothMap, w: SmoothMap) -> SmoothMap:
    return SmoothMap(u.dom, u.cod, tuple(mul(x, y) for x, y in zip(u.comps, w.comps))).normalized()


def D_mutant_zero(f: SmoothMap) -> SmoothMap:
    return zero(Prod(f.dom, f.dom), f.cod)


def D_mutant_nonadditive(f: SmoothMap) -> SmoothMap:
    """Adds ``(f(a) − f(0) − D f(0, a))² · b₀``: zero on linear maps, not additive in ``f``."""
    a = f.dom
    p1 = proj(a, a, "left")
    lin = compose(total_D(f), pair(zero(a, a), identity(a)))
    rem = lin_comb(1, compose(lin_comb(1, f, -1, _at_zero(f)), p1), -1, compose(lin, p1))
    sq = SmoothMap(rem.dom, rem.cod, tuple(power(c, 2) for c in rem.comps))
    b0 = SmoothMap(rem.dom, rem.cod, (Coord(a.dim),) * f.cod.dim)
    return lin_comb(1, total_D(f), 1, _times(sq, b0))


def D_mutant_second_order(f: SmoothMap) -> SmoothMap:
    """Adds the second derivative ``D(D f)((a, b), (b, 0))``: quadratic in the tangent."""
    a = f.dom
    x1, x2 = proj(a, a, "left"), proj(a, a, "right")
    dd = total_D(total_D(f))
    extra = compose(dd, pair(pair(x1, x2), pair(x2, zero(Prod(a, a), a))))
    return lin_comb(1, total_D(f), 1, extra)


def D_mutant_shifted_base(f: SmoothMap) -> SmoothMap:
    """``D f ∘ ⟨2π₁, π₂⟩``: evaluates the derivative at the wrong point."""
    a = f.dom
    x1, x2 = proj(a, a, "left"), proj(a, a, "right")
    return compose(total_D(f), pair(lin_comb(2, x1, 0, x1), x2))


def D_mutant_pair_swap(f: SmoothMap) -> SmoothMap:
    """On a nonlinear map into ``X × X``, swap the halves of the derivative."""
    d = total_D(f)
    c = f.cod
    if isinstance(c, Prod) and c.left == c.right and not all(isinstance(e, Coord) for e in f.comps):
        half = c.left.dim
        return SmoothMap(d.dom, d.cod, d.comps[half:] + d.comps[:half])
    return d


def _second_unlinked(df: SmoothMap) -> SmoothMap:
    """``D(D f)`` plus ``a₀·b'₀`` on ``(A×A)×(A×A)``."""
    n = df.dom.dim // 2
    extra = SmoothMap(Prod(df.dom, df.dom), df.cod, (mul(Coord(0), Coord(3 * n)),) * df.cod.dim)
    return lin_comb(1, total_D(df), 1, extra)


def _second_asymmetric(df: SmoothMap) -> SmoothMap:
    """``D(D f)`` plus ``(b₀ − a'₀)·b'₀``, which changes sign under the middle swap."""
    n = df.dom.dim // 2
    b0, a0p, b0p = Coord(n), Coord(2 * n), Coord(3 * n)
    extra = SmoothMap(Prod(df.dom, df.dom), df.cod, ((mul(b0, b0p) - mul(a0p, b0p)),) * df.cod.dim)
    return lin_comb(1, total_D(df), 1, extra)


class NonAdditive(SmoothCategory):
    """Linear combinations are differentiated with a non-additive correction."""

    def __init__(self):
        super().__init__(name="smooth[D+nonadditive]")
        self._combos: Dict[int, SmoothMap] = {}

    def lin_comb(self, r, f, s, g):
        out = lin_comb(r, f, s, g)
        self._combos[id(out)] = out
        return out

    def D(self, f):
        if self._combos.get(id(f)) is f:
            return D_mutant_nonadditive(f)
        return total_D(f)


class TrackingCategory(SmoothCategory):
    """Smooth category whose derivative may act differently on its own outputs."""

    def __init__(self, name: str, first: Diff = total_D, second: Diff = total_D):
        super().__init__(name=name)
        self._issued: Dict[int, SmoothMap] = {}
        self._first, self._second = first, second

    def D(self, f):
        own = self._issued.get(id(f)) is f
        out = (self._second if own else self._first)(f)
        self._issued[id(out)] = out
        return out


def mutant_handles() -> Dict[str, Tuple[DiffCategoryHandle, str]]:
    """Shipped corrupted handles, each with the axiom it is meant to break."""
    return {
        "zero": (SmoothCategory(D_mutant_zero, "smooth[D=0]"), "CD.3"),
        "nonadditive": (NonAdditive(), "CD.1"),
        "second-order": (SmoothCategory(D_mutant_second_order, "smooth[D+second-order]"), "CD.2"),
        "pair-swap": (TrackingCategory("smooth[pair-swap]", first=D_mutant_pair_swap), "CD.4"),
        "shifted-base": (SmoothCategory(D_mutant_shifted_base, "smooth[D at 2a]"), "CD.5"),
        "second-unlinked": (TrackingCategory("smooth[DD+a0*b'0]", second=_second_unlinked), "CD.6"),
        "second-asymmetric": (TrackingCategory("smooth[DD+(b0-a'0)*b'0]",
                                               second=_second_asymmetric), "CD.7"),
    }


# -- Kleisli, abstract Kleisli and algebra stages -----------------------------------------

def _kmap(tr: _Trials, m: MonadSpec, a: Shape, b: Shape) -> kl.KleisliMap:
    return kl.KleisliMap(m, a, b, tr.map(a, m.on_obj(b)))


def check_kl_category(m: MonadSpec, cfg: MonadCheckConfig = MonadCheckConfig(),
                      diff: Diff = total_D) -> CheckReport:
    """Category, adjunction, lifted product/module and derivative-transport laws."""
    rep = CheckReport(f"kl_category[{m.name}]")
    for t in range(cfg.trials):
        tr = _Trials(cfg, "kl_category", t)
        a, b, c, d = (tr.shape() for _ in range(4))
        pol, seed = tr.policy, tr.seed
        f, f2, g, h = _kmap(tr, m, a, b), _kmap(tr, m, a, b), _kmap(tr, m, b, c), _kmap(tr, m, c, d)
        u = _kmap(tr, m, a, Prod(b, c))
        x = _kmap(tr, m, d, a)
        base_f, base_g = tr.map(a, b), tr.map(b, c)
        r, s = tr.scalars(2)
        eq = kl.k_equal
        rep.run("assoc", t, seed, lambda: eq(
            kl.k_compose(h, kl.k_compose(g, f)), kl.k_compose(kl.k_compose(h, g), f), pol))
        rep.run("unit_left", t, seed, lambda: eq(kl.k_compose(kl.k_id(m, b), f), f, pol))
        rep.run("unit_right", t, seed, lambda: eq(kl.k_compose(f, kl.k_id(m, a)), f, pol))
        rep.run("L_functor", t, seed, lambda: _both(
            eq(kl.L(m, compose(base_g, base_f)), kl.k_compose(kl.L(m, base_g), kl.L(m, base_f)), pol),
            eq(kl.L(m, identity(a)), kl.k_id(m, a), pol)))
        rep.run("R_functor", t, seed, lambda: _both(
            maps_equal(kl.R(kl.k_compose(g, f)), compose(kl.R(g), kl.R(f)), pol),
            maps_equal(kl.R(kl.k_id(m, a)), identity(m.on_obj(a)), pol)))
        rep.run("RL_is_S", t, seed, lambda: maps_equal(kl.R(kl.L(m, base_f)), m.on_map(base_f), pol))
        rep.run("lifted_beta", t, seed, lambda: _both(
            eq(kl.k_compose(kl.k_proj(m, b, b, "left"), kl.k_pair(f, f2)), f, pol),
            eq(kl.k_compose(kl.k_proj(m, b, b, "right"), kl.k_pair(f, f2)), f2, pol)))
        rep.run("lifted_eta", t, seed, lambda: eq(
            kl.k_pair(kl.k_compose(kl.k_proj(m, b, c, "left"), u),
                      kl.k_compose(kl.k_proj(m, b, c, "right"), u)), u, pol))
        rep.run("precompose_k_linear", t, seed, lambda: eq(
            kl.k_compose(kl.k_lin_comb(r, f, s, f2), x),
            kl.k_lin_comb(r, kl.k_compose(f, x), s, kl.k_compose(f2, x)), pol))
        rep.run("zero_absorbs", t, seed, lambda: eq(
            kl.k_compose(kl.k_zero(m, b, c), kl.L(m, compose(tr.linear(a, b), identity(a)))),
            kl.k_zero(m, a, c), pol))
    m.verdicts["kl_category"] = rep.passed
    return rep


def _both(*vs: Verdict) -> Verdict:
    for v in vs:
        if not v:
            return v
    return vs[-1]


def check_abstract(m: MonadSpec, cfg: MonadCheckConfig = MonadCheckConfig(),
                   diff: Diff = total_D) -> CheckReport:
    """Abstract Kleisli equations, ϑ-naturality, linearity of ε and ϑ, round trips."""
    rep = CheckReport(f"abstract[{m.name}]")
    ab = kl.abstract_structure(m)
    for t in range(cfg.trials):
        tr = _Trials(cfg, "abstract", t)
        a, b, c = tr.shape(), tr.shape(), tr.shape()
        pol, seed = tr.policy, tr.seed
        f, g = _kmap(tr, m, a, b), _kmap(tr, m, b, c)
        base_f, base_f2 = tr.map(a, b), tr.map(a, b)
        r, s = tr.scalars(2)
        eq = kl.k_equal
        sa = m.on_obj(a)
        rep.run("eps_theta", t, seed, lambda: eq(
            kl.k_compose(ab.epsilon(a), ab.vartheta(a)), kl.k_id(m, a), pol))
        # the printed ε_{SA}∘S(ϑ_A) needs S(η) = η_S; see kl.counit_after_S_theta
        rep.run("S_eps_theta", t, seed, lambda: eq(
            kl.k_compose(ab.s_on_map(ab.epsilon(a)), ab.vartheta(sa)), kl.k_id(m, sa), pol))
        rep.run("theta_theta", t, seed, lambda: eq(
            kl.k_compose(ab.vartheta(sa), ab.vartheta(a)),
            kl.k_compose(ab.s_on_map(ab.vartheta(a)), ab.vartheta(a)), pol))
        rep.run("eps_natural", t, seed, lambda: eq(
            kl.k_compose(ab.epsilon(b), ab.s_on_map(f)), kl.k_compose(f, ab.epsilon(a)), pol))
        rep.run("theta_S_natural", t, seed, lambda: eq(
            kl.k_compose(ab.vartheta(m.on_obj(b)), ab.s_on_map(f)),
            kl.k_compose(ab.s_on_map(ab.s_on_map(f)), ab.vartheta(sa)), pol))
        rep.run("S_functor", t, seed, lambda: eq(
            ab.s_on_map(kl.k_compose(g, f)), kl.k_compose(ab.s_on_map(g), ab.s_on_map(f)), pol))
        rep.run("delta_is_S_eps", t, seed, lambda: eq(ab.delta(a), ab.s_on_map(ab.epsilon(a)), pol))

        def proj_nat():
            v = kl.is_vartheta_natural(kl.k_proj(m, a, b, "left"), pol)
            return v if not v else kl.is_vartheta_natural(kl.k_proj(m, a, b, "right"), pol)
        rep.run("proj_theta_natural", t, seed, proj_nat)
        rep.run("L_theta_natural", t, seed, lambda: kl.is_vartheta_natural(kl.L(m, base_f), pol))
        rep.run("S_strong_differential", t, seed, lambda: eq(
            kl.k_D(ab.s_on_map(f), diff),
            kl.k_compose(ab.s_on_map(kl.k_D(f, diff)), kl.L(m, m.omega_inv(a, a))), pol))
        rep.run("eps_D_linear", t, seed, lambda: kl.k_is_D_linear(ab.epsilon(a), pol))
        rep.run("theta_D_linear", t, seed, lambda: kl.k_is_D_linear(ab.vartheta(a), pol))
        rep.run("L_preserves_D", t, seed, lambda: maps_equal(
            kl.L(m, diff(base_f)).carrier, diff(kl.L(m, base_f).carrier), pol))
        rep.run("D_of_identity", t, seed, lambda: eq(
            kl.k_D(kl.k_id(m, a), diff), kl.k_proj(m, a, a, "right"), pol))
        rep.run("G_roundtrip", t, seed, lambda: kl.g_roundtrip(f, pol))

        lf, lf2 = kl.L(m, base_f), kl.L(m, base_f2)
        lg = kl.L(m, tr.map(b, c))

        def closure():
            for k in (kl.k_id(m, a), kl.k_compose(lg, lf), kl.k_pair(lf, lf2),
                      kl.k_lin_comb(r, lf, s, lf2), kl.k_D(lf, diff)):
                v = kl.is_vartheta_natural(k, pol)
                if not v:
                    return v
            return v
        rep.run("theta_natural_closure", t, seed, closure)
    m.verdicts["abstract"] = rep.passed
    return rep


def check_em(m: MonadSpec, cfg: MonadCheckConfig = MonadCheckConfig()) -> CheckReport:
    """Free algebras, lifted tangent algebras, tangent morphisms, differential objects."""
    rep = CheckReport(f"em[{m.name}]")
    for t in range(cfg.trials):
        tr = _Trials(cfg, "em", t)
        a, b, c = tr.shape(), tr.shape(), tr.shape()
        pol, seed = tr.policy, tr.seed
        fa, fb = em.free_algebra(m, a), em.free_algebra(m, b)
        rep.run("free_algebra", t, seed, lambda: em.check_algebra(fa, pol))
        rep.run("tangent_algebra", t, seed, lambda: em.check_algebra(em.em_tangent(fa, pol), pol))
        rep.run("tangent2_algebra", t, seed, lambda: em.check_algebra(em.em_tangent2(fa, pol), pol))
        rep.run("product_algebra", t, seed, lambda: em.check_algebra(em.product_algebra(fa, fb), pol))

        def tangent_maps():
            for name, v in em.check_tangent_morphisms(fa, pol).items():
                if not v:
                    return Verdict(False, v.witness, v.residual, v.exact, note=f"{name} is not a morphism")
            return v
        rep.run("tangent_morphisms", t, seed, tangent_maps)
        rep.run("free_is_differential_object", t, seed, lambda: em.is_differential_object(fa, pol))
        k = _kmap(tr, m, a, b)
        k2 = _kmap(tr, m, b, c)
        rep.run("embed_morphism", t, seed, lambda: em.is_algebra_morphism(*em.embed_E(k, pol), pol))
        rep.run("embed_identity", t, seed, lambda: maps_equal(
            em.embed_E(kl.k_id(m, a), pol)[0], identity(m.on_obj(a)), pol))
        rep.run("embed_composition", t, seed, lambda: maps_equal(
            em.embed_E(kl.k_compose(k2, k), pol)[0],
            compose(em.embed_E(k2, pol)[0], em.embed_E(k, pol)[0]), pol))
        rep.run("embed_faithful", t, seed, lambda: kl.k_equal(
            em.unembed(em.embed_E(k, pol)[0], m, a, b), k, pol))
        rep.run("derivative_morphism", t, seed, lambda: em.derivative_morphism(
            em.embed_E(k, pol)[0], fa, fb, pol))

        def linear_iff_split():
            for alpha in (tr.linear(m.on_obj(a), a), tr.map(m.on_obj(a), a)):
                lin, tt = em.linear_iff_split(alpha, pol)
                if bool(lin) != bool(tt):
                    return Verdict(False, (lin.witness or tt.witness), float("nan"),
                                   note="D-linearity and T(alpha) = alpha x alpha disagree")
            return Verdict(True)
        rep.run("linear_iff_split", t, seed, linear_iff_split)
    m.verdicts["em"] = rep.passed
    return rep


# -- the full pipeline --------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    checks: MonadCheckConfig = MonadCheckConfig()
    cd: CDSuiteConfig = CDSuiteConfig(generator=RandomMapConfig(max_depth=2, dims=(1, 2)),
                                      trials=8, sampled_trials=4)

    @classmethod
    def seeded(cls, seed: int = 0, trials: Optional[int] = None, exact: bool = False,
               tol: Optional[float] = None) -> "PipelineConfig":
        """``exact`` drops the sampled transcendental pass; ``tol`` sets sampled tolerances."""
        base = cls()
        tol = base.cd.sampled_policy.abs_tol if tol is None else tol
        sampled = EqPolicy.sampled(abs_tol=tol, rel_tol=tol)
        gen = base.checks.generator.replace(seed=seed)
        checks = MonadCheckConfig(EqPolicy.exact() if exact else replace(base.checks.policy, abs_tol=tol, rel_tol=tol),
                                  gen, trials or base.checks.trials)
        n = trials or base.cd.trials
        cd = replace(base.cd, generator=base.cd.generator.replace(seed=seed), trials=n,
                     sampled_trials=0 if exact else max(1, n // 2), sampled_policy=sampled)
        return cls(checks, cd)


STAGES = ("monad_laws", "k_linear", "cdm", "kl_category", "kl_cd", "abstract", "kd", "em")
REQUIRES = {
    "monad_laws": (), "k_linear": (), "cdm": (),
    "kl_category": ("monad_laws",),
    "kl_cd": ("monad_laws", "k_linear", "cdm"),
    "abstract": ("monad_laws", "cdm"),
    "kd": ("monad_laws", "cdm"),
    "em": ("monad_laws", "cdm"),
}


def run_full_pipeline(m: MonadSpec, cfg: PipelineConfig = PipelineConfig(),
                      diff: Diff = total_D, stages: Sequence[str] = STAGES) -> CheckReport:
    """Run the stages in order; a stage whose prerequisites failed is skipped."""
    runners = {
        "monad_laws": lambda: check_monad_laws(m, cfg.checks),
        "k_linear": lambda: check_cartesian_k_linear(m, cfg.checks),
        "cdm": lambda: check_cdm(m, cfg.checks, diff),
        "kl_category": lambda: check_kl_category(m, cfg.checks, diff),
        "kl_cd": lambda: run_cd_suite(KleisliCategory(m, diff), cfg.cd),
        "abstract": lambda: check_abstract(m, cfg.checks, diff),
        "kd": lambda: kl.check_KD(m, cfg.checks, B=lambda f: kl.B_from_D(f, m, diff)),
        "em": lambda: check_em(m, cfg.checks),
    }
    rep = CheckReport(f"pipeline[{m.name}]")
    for stage in STAGES:
        if stage not in stages:
            continue
        blocked = [p for p in REQUIRES[stage] if rep.stages.get(p) in ("fail", "skipped")]
        if blocked:
            rep.stages[stage] = "skipped"
            continue
        sub = runners[stage]()
        rep.extend(sub, prefix=f"{stage}/")
        rep.stages[stage] = "pass" if sub.passed else "fail"
    return rep


def failed_stages(rep: CheckReport) -> List[str]:
    return [s for s, v in rep.stages.items() if v == "fail"]


def doubled_D(f: SmoothMap) -> SmoothMap:
    return lin_comb(2, total_D(f), 0, total_D(f))


def pipeline_mutants() -> Dict[str, Tuple[MonadSpec, Diff, Tuple[str, ...]]]:
    """Corrupted monads and derivatives with the validation stages they should trip."""
    from .monads import mutant_eta_diagonal, mutant_mu_forget, mutant_mu_product

    return {
        "eta=<1,1>": (mutant_eta_diagonal(), total_D, ("monad_laws",)),
        "mu=<p1,p2>": (mutant_mu_forget(), total_D, ("monad_laws",)),
        # not even a monad nor linear, so every validation stage objects
        "mu=<p1,p2*p3>": (mutant_mu_product(), total_D, ("monad_laws", "k_linear", "cdm")),
        "D=2D": (identity_monad().replace(name="identity[D=2D]"), doubled_D, ("cdm",)),
    }
