"""Presented monads on the smooth model and their validation suites.

A monad is given by closures over map builders, so any user presentation can
be pushed through the same checks as the shipped identity, constant and
tangent-bundle monads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from .diffop import D as total_D, T_map
from .errors import NotACDM
from .expr import mul
from .generate import RandomMapConfig, gen_linear_map, gen_map, gen_scalars, gen_shape, rng_for
from .maps import (
    DEFAULT_POLICY, EqPolicy, SmoothMap, Verdict, compose, identity, lin_comb, maps_equal,
    pair, proj, terminal, times, zero,
)
from .report import CheckReport, sub_seed
from .shapes import Prod, Shape, Unit

Diff = Callable[[SmoothMap], SmoothMap]


@dataclass(frozen=True, eq=False)
class MonadSpec:
    name: str
    on_obj: Callable[[Shape], Shape]
    on_map: Callable[[SmoothMap], SmoothMap]
    mu: Callable[[Shape], SmoothMap]
    eta: Callable[[Shape], SmoothMap]
    omega: Callable[[Shape, Shape], SmoothMap]
    omega_inv: Callable[[Shape, Shape], SmoothMap]
    omega_unit: SmoothMap
    omega_unit_inv: SmoothMap
    # cached suite outcomes, keyed by suite name
    verdicts: dict = field(default_factory=dict, repr=False)

    def replace(self, **kw) -> "MonadSpec":
        data = {k: getattr(self, k) for k in
                ("name", "on_obj", "on_map", "mu", "eta", "omega", "omega_inv",
                 "omega_unit", "omega_unit_inv")}
        data.update(kw)
        return MonadSpec(**data)


def swap_middle(p: Shape, q: Shape, r: Shape, s: Shape) -> SmoothMap:
    """``((a, b), (c, d)) ↦ ((a, c), (b, d))``."""
    dom = Prod(Prod(p, q), Prod(r, s))
    left = proj(Prod(p, q), Prod(r, s), "left")
    right = proj(Prod(p, q), Prod(r, s), "right")
    a = compose(proj(p, q, "left"), left)
    b = compose(proj(p, q, "right"), left)
    c = compose(proj(r, s, "left"), right)
    d = compose(proj(r, s, "right"), right)
    out = pair(pair(a, c), pair(b, d))
    assert out.dom == dom
    return out


def tangent_blocks(a: Shape):
    """The four block projections ``T T A → A``, in reading order."""
    ta = Prod(a, a)
    first, second = proj(ta, ta, "left"), proj(ta, ta, "right")
    return (compose(proj(a, a, "left"), first), compose(proj(a, a, "right"), first),
            compose(proj(a, a, "left"), second), compose(proj(a, a, "right"), second))


@lru_cache(maxsize=None)
def identity_monad() -> MonadSpec:
    return MonadSpec(
        name="identity",
        on_obj=lambda a: a,
        on_map=lambda f: f,
        mu=identity,
        eta=identity,
        omega=lambda a, b: identity(Prod(a, b)),
        omega_inv=lambda a, b: identity(Prod(a, b)),
        omega_unit=identity(Unit),
        omega_unit_inv=identity(Unit),
    )


@lru_cache(maxsize=None)
def constant_monad() -> MonadSpec:
    """Every object goes to ``Unit``; every structure map is the unique one."""
    return MonadSpec(
        name="constant",
        on_obj=lambda a: Unit,
        on_map=lambda f: identity(Unit),
        mu=lambda a: identity(Unit),
        eta=terminal,
        omega=lambda a, b: SmoothMap(Unit, Prod(Unit, Unit), ()),
        omega_inv=lambda a, b: SmoothMap(Prod(Unit, Unit), Unit, ()),
        omega_unit=identity(Unit),
        omega_unit_inv=identity(Unit),
    )


def tangent_eta(a: Shape) -> SmoothMap:
    return pair(identity(a), zero(a, a))


def tangent_mu(a: Shape) -> SmoothMap:
    p1, p2, p3, _ = tangent_blocks(a)
    return pair(p1, lin_comb(1, p2, 1, p3))


@lru_cache(maxsize=None)
def tangent_monad(diff: Diff = total_D, name: str = "tangent") -> MonadSpec:
    """``T A = A × A`` with ``T f = ⟨f∘π₁, D f⟩``, ``μ = ⟨π₁, π₂+π₃⟩``, ``η = ⟨1, 0⟩``.

    Shipped monads are cached, so maps built from separate calls share one
    monad instance.
    """
    if diff is total_D:
        on_map = T_map
    else:
        def on_map(f):
            return pair(compose(f, proj(f.dom, f.dom, "left")), diff(f))
    return MonadSpec(
        name=name,
        on_obj=lambda a: Prod(a, a),
        on_map=on_map,
        mu=tangent_mu,
        eta=tangent_eta,
        omega=lambda a, b: swap_middle(a, b, a, b),
        omega_inv=lambda a, b: swap_middle(a, a, b, b),
        omega_unit=terminal(Prod(Unit, Unit)),
        omega_unit_inv=SmoothMap(Unit, Prod(Unit, Unit), ()),
    )


# -- shipped mutants -------------------------------------------------------------

def mutant_eta_diagonal() -> MonadSpec:
    """Tangent monad with ``η′ = ⟨1, 1⟩``: linear, but breaks the unit laws."""
    return tangent_monad(name="tangent[eta=<1,1>]").replace(
        name="tangent[eta=<1,1>]", eta=lambda a: pair(identity(a), identity(a)))


def mutant_mu_forget() -> MonadSpec:
    """Tangent monad with ``μ′ = ⟨π₁, π₂⟩``: linear, but breaks a unit law."""
    def mu(a):
        p1, p2, _, _ = tangent_blocks(a)
        return pair(p1, p2)
    return tangent_monad().replace(name="tangent[mu=<p1,p2>]", mu=mu)


def mutant_mu_product() -> MonadSpec:
    """Tangent monad with ``μ′ = ⟨π₁, π₂·π₃⟩``: not linear at all."""
    def mu(a):
        p1, p2, p3, _ = tangent_blocks(a)
        prod = SmoothMap(p2.dom, a, tuple(mul(x, y) for x, y in zip(p2.comps, p3.comps)))
        return pair(p1, prod)
    return tangent_monad().replace(name="tangent[mu=<p1,p2*p3>]", mu=mu)


SHIPPED = {"identity": identity_monad, "constant": constant_monad, "tangent": tangent_monad}


def get_monad(name: str) -> MonadSpec:
    try:
        return SHIPPED[name]()
    except KeyError:
        raise ValueError(f"unknown monad {name!r}; choose from {sorted(SHIPPED)}") from None


# -- checks ------------------------------------------------------------------------

@dataclass(frozen=True)
class MonadCheckConfig:
    policy: EqPolicy = DEFAULT_POLICY
    generator: RandomMapConfig = RandomMapConfig(max_depth=2, dims=(1, 2))
    trials: int = 8

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def _typed(f: SmoothMap, dom: Shape, cod: Shape, what: str) -> Optional[str]:
    if f.dom != dom or f.cod != cod:
        return f"{what} typed {f.dom} -> {f.cod}, expected {dom} -> {cod}"
    return None


def _typing_verdict(*problems) -> Verdict:
    bad = [p for p in problems if p]
    return Verdict(not bad, None, float("nan") if bad else 0.0, note="; ".join(bad))


class _Trials:
    """Per-trial random shapes and maps, deterministic in the config."""

    def __init__(self, cfg: MonadCheckConfig, suite: str, trial: int):
        self.cfg, self.suite, self.trial = cfg, suite, trial
        gen = cfg.generator
        self.rng = rng_for(gen.seed, suite, trial)
        self.seed = sub_seed(gen.seed, suite, trial)
        self.policy = cfg.policy.with_seed(self.seed)
        self.k = 0

    def shape(self) -> Shape:
        return gen_shape(self.rng, self.cfg.generator.dims)

    def map(self, dom: Shape, cod: Shape) -> SmoothMap:
        self.k += 1
        return gen_map(self.cfg.generator, dom, cod, index=(self.trial << 8) + self.k)

    def linear(self, dom: Shape, cod: Shape) -> SmoothMap:
        self.k += 1
        return gen_linear_map(self.cfg.generator, dom, cod, index=(self.trial << 8) + self.k)

    def scalars(self, n: int):
        return gen_scalars(self.rng, self.cfg.generator.coefficient_pool, n)


def check_monad_laws(m: MonadSpec, cfg: MonadCheckConfig = MonadCheckConfig()) -> CheckReport:
    rep = CheckReport(f"monad_laws[{m.name}]")
    S = m.on_obj
    for t in range(cfg.trials):
        tr = _Trials(cfg, "monad_laws", t)
        a, b, c = tr.shape(), tr.shape(), tr.shape()
        f, g = tr.map(a, b), tr.map(b, c)
        pol, seed = tr.policy, tr.seed
        rep.run("typing", t, seed, lambda: _typing_verdict(
            _typed(m.eta(a), a, S(a), "eta"),
            _typed(m.mu(a), S(S(a)), S(a), "mu"),
            _typed(m.on_map(f), S(a), S(b), "on_map")))
        one = identity(S(a))
        rep.run("unit_left", t, seed, lambda: maps_equal(compose(m.mu(a), m.eta(S(a))), one, pol))
        rep.run("unit_right", t, seed,
                lambda: maps_equal(compose(m.mu(a), m.on_map(m.eta(a))), one, pol))
        rep.run("assoc", t, seed, lambda: maps_equal(
            compose(m.mu(a), m.mu(S(a))), compose(m.mu(a), m.on_map(m.mu(a))), pol))
        rep.run("functor_id", t, seed, lambda: maps_equal(m.on_map(identity(a)), one, pol))
        rep.run("functor_comp", t, seed, lambda: maps_equal(
            m.on_map(compose(g, f)), compose(m.on_map(g), m.on_map(f)), pol))
        rep.run("eta_natural", t, seed, lambda: maps_equal(
            compose(m.on_map(f), m.eta(a)), compose(m.eta(b), f), pol))
        rep.run("mu_natural", t, seed, lambda: maps_equal(
            compose(m.on_map(f), m.mu(a)), compose(m.mu(b), m.on_map(m.on_map(f))), pol))
    m.verdicts["monad_laws"] = rep.passed
    return rep


def check_cartesian_k_linear(m: MonadSpec, cfg: MonadCheckConfig = MonadCheckConfig()) -> CheckReport:
    from .diffop import is_k_linear

    rep = CheckReport(f"k_linear[{m.name}]")
    S = m.on_obj
    for t in range(cfg.trials):
        tr = _Trials(cfg, "k_linear", t)
        a, b, a2, b2 = tr.shape(), tr.shape(), tr.shape(), tr.shape()
        pol, seed = tr.policy, tr.seed
        w, wi = m.omega(a, b), m.omega_inv(a, b)
        rep.run("omega_iso", t, seed, lambda: _and(
            maps_equal(compose(wi, w), identity(S(Prod(a, b))), pol),
            maps_equal(compose(w, wi), identity(Prod(S(a), S(b))), pol)))
        rep.run("omega_is_comparison", t, seed, lambda: maps_equal(
            w, pair(m.on_map(proj(a, b, "left")), m.on_map(proj(a, b, "right"))), pol))
        rep.run("omega_unit_iso", t, seed, lambda: _and(
            maps_equal(compose(m.omega_unit_inv, m.omega_unit), identity(S(Unit)), pol),
            maps_equal(compose(m.omega_unit, m.omega_unit_inv), identity(Unit), pol)))
        f, g = tr.map(a, a2), tr.map(b, b2)
        rep.run("omega_natural", t, seed, lambda: maps_equal(
            compose(m.omega(a2, b2), m.on_map(times(f, g))),
            compose(times(m.on_map(f), m.on_map(g)), w), pol))
        f1, f2 = tr.map(a, b), tr.map(a, b)
        r, s = tr.scalars(2)
        rep.run("functor_k_linear", t, seed, lambda: maps_equal(
            m.on_map(lin_comb(r, f1, s, f2)),
            lin_comb(r, m.on_map(f1), s, m.on_map(f2)), pol))
        rep.run("eta_k_linear", t, seed, lambda: is_k_linear(m.eta(a), pol, trials=2, seed=seed))
        rep.run("mu_k_linear", t, seed, lambda: is_k_linear(m.mu(a), pol, trials=2, seed=seed))
        h = tr.linear(a, b)
        rep.run("preserves_k_linear", t, seed,
                lambda: is_k_linear(m.on_map(h), pol, trials=2, seed=seed))
    m.verdicts["k_linear"] = rep.passed
    return rep


def _and(*vs: Verdict) -> Verdict:
    for v in vs:
        if not v:
            return v
    return vs[0]


def is_D_linear_wrt(f: SmoothMap, policy: EqPolicy, diff: Diff = total_D) -> Verdict:
    return maps_equal(diff(f), compose(f, proj(f.dom, f.dom, "right")), policy)


def check_cdm(m: MonadSpec, cfg: MonadCheckConfig = MonadCheckConfig(),
              diff: Diff = total_D) -> CheckReport:
    """Strong differential functor, D-linear unit and multiplication, and λ = ω naturality."""
    rep = CheckReport(f"cdm[{m.name}]")

    def T(f):
        return pair(compose(f, proj(f.dom, f.dom, "left")), diff(f))

    for t in range(cfg.trials):
        tr = _Trials(cfg, "cdm", t)
        a, b = tr.shape(), tr.shape()
        pol, seed = tr.policy, tr.seed
        f = tr.map(a, b)
        rep.run("SD", t, seed, lambda: maps_equal(
            diff(m.on_map(f)), compose(m.on_map(diff(f)), m.omega_inv(a, a)), pol))
        rep.run("mu_D_linear", t, seed, lambda: is_D_linear_wrt(m.mu(a), pol, diff))
        rep.run("eta_D_linear", t, seed, lambda: is_D_linear_wrt(m.eta(a), pol, diff))
        h = tr.linear(a, b)
        rep.run("preserves_D_linear", t, seed, lambda: is_D_linear_wrt(m.on_map(h), pol, diff))
        rep.run("lambda_natural", t, seed, lambda: maps_equal(
            compose(m.omega(b, b), m.on_map(T(f))),
            compose(T(m.on_map(f)), m.omega(a, a)), pol))
    if diff is total_D:
        m.verdicts["cdm"] = rep.passed
    return rep


def tangent_monad_lambda(m: MonadSpec, a: Shape) -> SmoothMap:
    """``λ_A = ω_{A,A}: S T A → T S A``."""
    if m.verdicts.get("cdm") is False:
        raise NotACDM(f"monad {m.name!r} failed the differential-monad checks")
    return m.omega(a, a)
