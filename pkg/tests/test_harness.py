import json

import pytest

from cdk.harness import (
    CD_AXIOMS, CDSuiteConfig, KleisliCategory, PipelineConfig, REQUIRES, STAGES, SmoothCategory,
    failed_stages, mutant_handles, pipeline_mutants, run_cd_suite, run_full_pipeline,
)
from cdk.monads import SHIPPED, constant_monad, get_monad, mutant_mu_product, tangent_monad
from cdk.report import CheckReport, sub_seed
from cdk.maps import Verdict

SMALL = CDSuiteConfig(trials=8, sampled_trials=4)


def test_smooth_cd_suite_passes_and_is_ordered():
    rep = run_cd_suite(SmoothCategory(), SMALL)
    assert rep.passed, rep.summary()
    assert rep.axioms() == list(CD_AXIOMS)
    keys = [(CD_AXIOMS.index(c.axiom), c.trial) for c in rep.cases]
    assert keys == sorted(keys)


def test_suite_is_deterministic():
    a = run_cd_suite(KleisliCategory(tangent_monad()), SMALL).to_json()
    b = run_cd_suite(KleisliCategory(tangent_monad()), SMALL).to_json()
    assert a == b


def test_axiom_subset():
    rep = run_cd_suite(SmoothCategory(), SMALL, axioms=("CD.3",))
    assert rep.axioms() == ["CD.3"]


@pytest.mark.parametrize("name", sorted(mutant_handles()))
def test_each_mutant_breaks_its_axiom(name):
    handle, axiom = mutant_handles()[name]
    rep = run_cd_suite(handle, SMALL)
    assert axiom in rep.failed_axioms(), rep.summary()
    bad = [c for c in rep.failures() if c.axiom == axiom]
    assert any(c.witness is not None for c in bad)


def test_mutants_cover_every_axiom():
    intended = {axiom for _, axiom in mutant_handles().values()}
    assert intended == {"CD.1", "CD.2", "CD.3", "CD.4", "CD.5", "CD.6", "CD.7"}


@pytest.mark.parametrize("name", ["zero", "nonadditive", "second-unlinked", "second-asymmetric"])
def test_targeted_mutants_fail_only_their_axiom(name):
    handle, axiom = mutant_handles()[name]
    assert run_cd_suite(handle, SMALL).failed_axioms() == [axiom]


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_full_pipeline_passes(name):
    rep = run_full_pipeline(get_monad(name))
    assert rep.passed, rep.summary()
    assert list(rep.stages) == list(STAGES)
    assert set(rep.stages.values()) == {"pass"}


def test_constant_pipeline_is_degenerate():
    rep = run_full_pipeline(constant_monad())
    assert rep.passed
    # everything lives over the one-point space
    assert all(c.witness is None for c in rep.cases)


@pytest.mark.parametrize("name", sorted(pipeline_mutants()))
def test_pipeline_mutants(name):
    m, diff, expected = pipeline_mutants()[name]
    rep = run_full_pipeline(m, diff=diff)
    assert failed_stages(rep) == list(expected)
    for stage, status in rep.stages.items():
        if status == "skipped":
            assert any(rep.stages[p] in ("fail", "skipped") for p in REQUIRES[stage])


def test_product_mutant_skips_kleisli_cd():
    rep = run_full_pipeline(mutant_mu_product())
    assert rep.stages["cdm"] == "fail" and rep.stages["kl_cd"] == "skipped"


def test_stage_selection():
    rep = run_full_pipeline(tangent_monad(), PipelineConfig.seeded(3, trials=2), stages=("cdm", "kd"))
    assert list(rep.stages) == ["cdm", "kd"]


def test_seeded_config():
    cfg = PipelineConfig.seeded(5, trials=3, exact=True)
    assert cfg.checks.generator.seed == 5 and cfg.checks.trials == 3
    assert cfg.cd.sampled_trials == 0 and cfg.checks.policy.mode == "exact"
    assert PipelineConfig.seeded(5, tol=1e-6).cd.sampled_policy.abs_tol == 1e-6


def test_report_json_schema():
    rep = CheckReport("demo")
    rep.add("A", 0, Verdict(True), seed=1)
    rep.add("B", 0, Verdict(False, (1.0, 2.0), float("nan"), note="why"), seed=2)
    d = json.loads(rep.to_json())
    assert d["suite"] == "demo" and d["passed"] is False
    assert d["cases"][1] == {"axiom": "B", "trial": 0, "ok": False, "witness": [1.0, 2.0],
                             "residual": None, "seed": 2, "note": "why"}
    assert rep.failed_axioms() == ["B"]
    assert "first failure" in rep.summary()


def test_report_catches_library_errors():
    from cdk.errors import ShapeMismatch
    rep = CheckReport("demo")

    def boom():
        raise ShapeMismatch("bad typing")
    rep.run("X", 0, 0, boom)
    assert not rep.passed and "bad typing" in rep.cases[0].note


def test_sub_seeds_differ():
    assert sub_seed(0, "a", 1) != sub_seed(0, "a", 2)
    assert sub_seed(0, "a", 1) == sub_seed(0, "a", 1)
    assert 0 <= sub_seed(2**70, "x") < 2**63
