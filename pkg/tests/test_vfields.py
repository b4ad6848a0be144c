import pytest
from hypothesis import given, strategies as st

from cdk.errors import ShapeMismatch
from cdk.generate import RandomMapConfig, gen_map, gen_shape, rng_for
from cdk.kleisli import k_compose
from cdk.maps import EqPolicy, add_maps
from cdk.shapes import Line, Prod
from cdk.syntax import format_map, parse_map
from cdk.vfields import (
    GenVectorField, vf_compose, vf_compose_terms, vf_cross_check, vf_D, vf_discrepancy,
    vf_equal, vf_identity,
)

EXACT = EqPolicy.exact()


def field(text):
    return GenVectorField.from_carrier(parse_map(text))


def test_worked_instance():
    v, w = field("map (x) -> (x, x^2)"), field("map (x) -> (x, x^3)")
    out = vf_compose(w, v)
    assert format_map(out.carrier.normalized(), ["x"]) == "map (x) -> (x, 3*x^4 + x^3 + x^2)"
    terms = [format_map(t, ["x"]) for t in vf_compose_terms(w, v)]
    assert terms == ["map (x) -> (x^3)", "map (x) -> (x^2)", "map (x) -> (3*x^4)"]


def test_construction_and_typing():
    v = field("map (x, y) -> ((x, y), (y, -x))")
    assert v.dom == v.cod == Prod(Line, Line)
    assert v.is_strict(EXACT)
    assert not field("map (x) -> (2*x, 1)").is_strict(EXACT)
    with pytest.raises(ShapeMismatch):
        GenVectorField.from_carrier(parse_map("map (x) -> (x)"))
    with pytest.raises(ShapeMismatch):
        vf_compose(v, field("map (x) -> (x, 1)"))
    assert v.to_kleisli().carrier == v.carrier


def test_identity_is_a_unit():
    v = field("map (x) -> (x^2, x + 1)")
    assert vf_equal(vf_compose(v, vf_identity(Line)), v, EXACT)
    assert vf_equal(vf_compose(vf_identity(Line), v), v, EXACT)


def test_derivative_componentwise():
    v = field("map (x) -> (x^2, x^3)")
    dv = vf_D(v)
    assert dv.dom == Prod(Line, Line)
    assert format_map(dv.carrier, ["x", "u"]) == "map (x, u) -> (2*x*u, 3*x^2*u)"


@given(st.integers(0, 5000))
def test_gap_to_kleisli_composition_is_one_term(seed):
    """Direct formula = Kleisli composition + D[g2]<f1, f2>, exactly."""
    rng = rng_for(seed, "vf")
    cfg = RandomMapConfig(seed=seed, max_depth=3)
    a, b, c = (gen_shape(rng, (1, 2)) for _ in range(3))
    f = GenVectorField.from_carrier(gen_map(cfg, a, Prod(b, b), 0))
    g = GenVectorField.from_carrier(gen_map(cfg, b, Prod(c, c), 1))
    generic = GenVectorField.from_kleisli(k_compose(g.to_kleisli(), f.to_kleisli()))
    patched = GenVectorField.of(generic.f1, add_maps(generic.f2, vf_discrepancy(g, f)))
    assert vf_equal(vf_compose(g, f), patched, EXACT)


def test_cross_check_agrees_when_g2_is_constant():
    f = field("map (x) -> (x^2, x)")
    g = field("map (x) -> (sin(x), 3)")
    assert vf_cross_check(g, f)
    v = vf_cross_check(field("map (x) -> (x, x^3)"), field("map (x) -> (x, x^2)"), EXACT)
    assert not v and v.witness is not None
