import pytest

from cdk.errors import NotACDM
from cdk.maps import EqPolicy, maps_equal
from cdk.monads import (
    MonadCheckConfig, SHIPPED, check_cartesian_k_linear, check_cdm, check_monad_laws,
    constant_monad, get_monad, identity_monad, mutant_eta_diagonal, mutant_mu_forget,
    mutant_mu_product, tangent_eta, tangent_monad, tangent_monad_lambda, tangent_mu,
)
from cdk.shapes import Line, Prod, Unit
from cdk.syntax import format_map, parse_map

CFG = MonadCheckConfig()


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_shipped_monads_pass_every_check(name):
    m = get_monad(name)
    for check in (check_monad_laws, check_cartesian_k_linear, check_cdm):
        rep = check(m, CFG)
        assert rep.passed, rep.summary()


def test_registry():
    assert get_monad("tangent") is tangent_monad()
    with pytest.raises(ValueError):
        get_monad("reader")


def test_tangent_structure_maps():
    names = ["a", "b", "c", "d"]
    assert format_map(tangent_mu(Line), names) == "map ((a, b), c, d) -> (a, b + c)"
    assert format_map(tangent_eta(Line), ["x"]) == "map (x) -> (x, 0)"
    m = tangent_monad()
    f = parse_map("map (x) -> (x^2)")
    assert format_map(m.on_map(f), ["x", "v"]) == "map (x, v) -> (x^2, 2*x*v)"
    assert m.omega(Line, Line).dom == Prod(Prod(Line, Line), Prod(Line, Line))


def test_omega_is_middle_swap():
    m = tangent_monad()
    assert format_map(m.omega(Line, Line), list("abcd")) == "map ((a, b), c, d) -> ((a, c), b, d)"
    assert maps_equal(m.omega_inv(Line, Line), m.omega(Line, Line), EqPolicy.exact())


def test_constant_monad_is_degenerate():
    m = constant_monad()
    assert m.on_obj(Prod(Line, Line)) == Unit
    assert m.eta(Line).cod == Unit


@pytest.mark.parametrize("factory,suite,axioms", [
    (mutant_eta_diagonal, check_monad_laws, {"unit_left", "unit_right", "eta_natural"}),
    (mutant_mu_forget, check_monad_laws, {"unit_right"}),
    (mutant_mu_product, check_monad_laws, None),
    (mutant_mu_product, check_cartesian_k_linear, {"mu_k_linear"}),
    (mutant_mu_product, check_cdm, {"mu_D_linear"}),
])
def test_mutants_fail_with_witnesses(factory, suite, axioms):
    rep = suite(factory(), CFG)
    assert not rep.passed
    if axioms is not None:
        assert set(rep.failed_axioms()) == axioms
    assert any(c.witness is not None for c in rep.failures())


def test_linear_mutants_keep_the_other_checks():
    for factory in (mutant_eta_diagonal, mutant_mu_forget):
        m = factory()
        assert check_cartesian_k_linear(m, CFG).passed
        assert check_cdm(m, CFG).passed


def test_non_natural_multiplication_is_caught():
    """``⟨π₁, π₂+π₃+π₄⟩`` is linear with the right units but not natural."""
    from cdk.maps import add_maps, pair
    from cdk.monads import tangent_blocks

    def mu(a):
        p1, p2, p3, p4 = tangent_blocks(a)
        return pair(p1, add_maps(add_maps(p2, p3), p4))
    rep = check_monad_laws(tangent_monad().replace(name="mu4", mu=mu), CFG)
    assert rep.failed_axioms() == ["mu_natural"]


def test_lambda_refuses_failed_cdm():
    m = mutant_mu_product()
    check_cdm(m, CFG)
    with pytest.raises(NotACDM):
        tangent_monad_lambda(m, Line)
    lam = tangent_monad_lambda(identity_monad(), Line)
    assert lam.dom == Prod(Line, Line)


def test_checks_are_deterministic():
    a = check_monad_laws(tangent_monad(), CFG).to_json()
    b = check_monad_laws(tangent_monad(), CFG).to_json()
    assert a == b
