from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cdk.errors import DimensionMismatch, ExactModeUnsupportedPrimitive, ParseError, ShapeMismatch
from cdk.expr import Coord, Const, is_polynomial, normalize, sin
from cdk.generate import RandomMapConfig, gen_map, gen_shape, rng_for
from cdk.maps import (
    EqPolicy, SmoothMap, compose, evaluate, identity, lin_comb, maps_equal, pair, proj, terminal,
    times, zero,
)
from cdk.shapes import Line, Prod, Unit, flat, parse_shape
from cdk.syntax import format_map, parse_map, parse_map_named


def test_shapes():
    s = Prod(Prod(Line, Line), Line)
    assert s.dim == 3
    assert Unit.dim == 0
    assert flat(3) == Prod(Line, Prod(Line, Line))
    assert parse_shape(repr(s)) == s
    with pytest.raises(ValueError):
        parse_shape("Prod(Line)")


def test_parse_shapes_from_patterns():
    assert parse_map("map ((x,y),z) -> (x+z)").dom == Prod(Prod(Line, Line), Line)
    assert parse_map("map () -> (1)").dom == Unit
    f, names = parse_map_named("map (a, (b, c)) -> (a*b, c)")
    assert names == ["a", "b", "c"]
    assert f.cod == Prod(Line, Line)


def test_parse_error_location():
    with pytest.raises(ParseError) as err:
        parse_map("map (x -> x")
    assert (err.value.line, err.value.column) == (1, 8)
    with pytest.raises(ParseError):
        parse_map("map (x) -> (y)")
    with pytest.raises(ParseError) as err:
        parse_map("map (x) ->\n  (x $ 2)")
    assert err.value.line == 2


def test_exact_arithmetic_is_rational():
    f = parse_map("map (x, y) -> (1/3*x + y^2)")
    assert evaluate(f, [Fraction(3), Fraction(1, 2)]) == (Fraction(5, 4),)
    with pytest.raises(ExactModeUnsupportedPrimitive):
        evaluate(parse_map("map (x) -> (sin(x))"), [1], exact=True)


def test_normal_form_merges_like_terms():
    f = parse_map("map (x, y) -> ((x + y)^2 - x^2 - 2*x*y)")
    g = parse_map("map (x, y) -> (y^2)")
    assert f.normalized().comps == g.normalized().comps
    assert is_polynomial(f.comps[0])
    assert not is_polynomial(sin(Coord(0)))


def test_map_typing():
    with pytest.raises(DimensionMismatch):
        SmoothMap(Line, Prod(Line, Line), (Coord(0),))
    with pytest.raises(DimensionMismatch):
        SmoothMap(Line, Line, (Coord(1),))
    f = parse_map("map (x) -> (x^2)")
    with pytest.raises(ShapeMismatch):
        compose(f, identity(Prod(Line, Line)))
    with pytest.raises(DimensionMismatch):
        evaluate(f, [1, 2])


def test_products_and_projections():
    a, b = Line, Prod(Line, Line)
    f = parse_map("map (x) -> (x^2)")
    g = parse_map("map (x) -> (x, x + 1)")
    h = pair(f, g)
    pol = EqPolicy.exact()
    assert maps_equal(compose(proj(a, b, "left"), h), f, pol)
    assert maps_equal(compose(proj(a, b, "right"), h), g, pol)
    assert maps_equal(times(f, identity(b)), pair(compose(f, proj(a, b, "left")), proj(a, b, "right")), pol)
    assert terminal(b).cod == Unit
    assert maps_equal(lin_comb(2, f, -2, f), zero(a, a), pol)


def test_sampled_equality_reports_witness():
    f = parse_map("map (x) -> (sin(x)^2 + cos(x)^2)")
    one = parse_map("map (x) -> (1)")
    assert maps_equal(f, one)
    v = maps_equal(parse_map("map (x) -> (sin(x))"), parse_map("map (x) -> (x)"))
    assert not v and v.witness is not None and v.residual > 0
    with pytest.raises(ExactModeUnsupportedPrimitive):
        maps_equal(f, one, EqPolicy.exact())


def test_sampling_is_deterministic():
    pol = EqPolicy.sampled(seed=7)
    f, g = parse_map("map (x) -> (exp(x))"), parse_map("map (x) -> (1 + x)")
    assert maps_equal(f, g, pol) == maps_equal(f, g, pol)


@given(st.integers(0, 10_000), st.booleans())
def test_print_parse_round_trip(seed, transcendental):
    rng = rng_for(seed, "round-trip")
    cfg = RandomMapConfig(seed=seed, max_depth=3, allow_transcendental=transcendental)
    a, b = gen_shape(rng, (1, 3)), gen_shape(rng, (1, 3))
    f = gen_map(cfg, a, b, index=seed)
    g = parse_map(format_map(f))
    assert g.dom == f.dom and g.cod == f.cod
    assert g.normalized().comps == f.normalized().comps


@given(st.integers(0, 10_000))
def test_generator_is_deterministic(seed):
    cfg = RandomMapConfig(seed=seed)
    f1 = gen_map(cfg, Line, Prod(Line, Line), index=3)
    f2 = gen_map(cfg, Line, Prod(Line, Line), index=3)
    assert f1 == f2


def test_generator_config_validation():
    with pytest.raises(ValueError):
        RandomMapConfig(max_depth=0)
    with pytest.raises(ValueError):
        RandomMapConfig(dims=(3, 1))


def test_normalize_is_idempotent():
    e = parse_map("map (x, y) -> ((x - y)*(x + y)*sin(x))").comps[0]
    n = normalize(e)
    assert normalize(n) == n
    assert Const(Fraction(1, 2)) == Const(Fraction(2, 4))


def test_eval_batch_matches_exact():
    f = parse_map("map (x, y) -> (x^3 - 2*x*y + 1/5, y^2)")
    pts = np.array([[0.5, -1.0], [2.0, 0.25]])
    from cdk.maps import eval_batch
    got = eval_batch(f, pts)
    for row, p in zip(got, pts):
        want = evaluate(f, [Fraction(v) for v in p])
        assert np.allclose(row, [float(w) for w in want], rtol=0, atol=1e-12)
