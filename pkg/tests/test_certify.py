import dataclasses

import pytest

from complementary_mubs.analysis import Verdict
from complementary_mubs.certify import (
    DEFAULT_TOLERANCES,
    CertifySession,
    PipelineConfig,
    run_pipeline,
    verify_external,
)
from complementary_mubs.constructions import Family
from complementary_mubs.errors import NotPrime, SearchExhausted
from complementary_mubs.serialization import serialize_certificate
from complementary_mubs.subalgebra import SubalgebraDesc, SubalgebraKind


def test_config_defaults():
    cfg = PipelineConfig(5, family="ab")
    assert cfg.family is Family.AB
    assert cfg.tolerances == DEFAULT_TOLERANCES
    assert cfg.numeric_enabled
    assert cfg.provenance()["seed"] == 0


def test_numeric_layer_switches_off_for_large_p():
    assert PipelineConfig(7).numeric_enabled
    assert not PipelineConfig(11).numeric_enabled
    assert PipelineConfig(11, numeric=True).numeric_enabled
    assert not PipelineConfig(3, numeric=False).numeric_enabled


def test_config_overrides_one_tolerance():
    cfg = PipelineConfig(3, tolerances={"unbiasedness": 1e-6})
    assert cfg.tolerances["unbiasedness"] == 1e-6
    assert cfg.tolerances["complementarity"] == DEFAULT_TOLERANCES["complementarity"]


@pytest.mark.parametrize("kwargs", [
    {"family": "custom"},
    {"family": "nonsense"},
    {"tolerances": {"bogus": 1.0}},
    {"tolerances": {"unbiasedness": 0.0}},
    {"attempt_budget": 0},
])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        PipelineConfig(3, **kwargs)


def test_config_needs_a_prime():
    with pytest.raises(NotPrime):
        PipelineConfig(9)


def test_galois_pipeline_p3():
    result = run_pipeline(PipelineConfig(3))
    report = result.report
    assert report.verdict is Verdict.STRONGLY_UNEXTENDIBLE
    assert len(result.mub_family) == 8
    assert result.subgroup.order == 8
    assert report.residuals["numeric_complementarity"] < 1e-10
    assert report.residuals["mub_unbiasedness"] < 1e-9
    assert report.residuals["eigenbasis"] < 1e-8
    assert report.provenance["numeric"] is True


def test_ab_pipeline_p5():
    result = run_pipeline(PipelineConfig(5, family=Family.AB))
    report = result.report
    assert report.verdict is Verdict.BOUND_NOT_MET
    assert report.factor_count == 6
    assert len(result.mub_family) == 20
    assert report.residuals["extension_witness"] < 1e-9
    assert report.provenance["nonresidue"] == 2
    assert "extension witness: eigenbases of the recombined MASAs" in report.notes


def test_ab_pipeline_without_numerics():
    result = run_pipeline(PipelineConfig(7, family=Family.AB, numeric=False))
    assert result.report.verdict is Verdict.STRONGLY_UNEXTENDIBLE
    assert result.report.residuals == {}
    assert result.mub_family is None


def test_pipeline_surfaces_an_exhausted_search():
    with pytest.raises(SearchExhausted):
        run_pipeline(PipelineConfig(13, attempt_budget=200))


def test_reports_are_reproducible():
    cfg = PipelineConfig(3, family=Family.AB, seed=4)
    first = serialize_certificate(run_pipeline(cfg).report)
    second = serialize_certificate(run_pipeline(PipelineConfig(3, family=Family.AB, seed=4)).report)
    assert first == second


def test_session_reuses_stages():
    session = CertifySession(PipelineConfig(3, family=Family.AB))
    decomposition = session.decompose()
    assert session.decompose() is decomposition
    report = session.certify()
    assert session.certify() is report
    assert session.run().report is report
    assert session.extract_mubs() is session.run().mub_family


def test_external_verification_matches_the_pipeline(ab):
    decomposition = ab(3)
    report = verify_external(decomposition)
    assert report.verdict is Verdict.STRONGLY_UNEXTENDIBLE
    assert report.notes[-1] == "externally supplied decomposition re-verified from its subspaces"


def test_external_verification_names_bad_pairs(ab):
    decomposition = ab(3)
    members = list(decomposition.subalgebras)
    members[3] = members[2]
    report = verify_external(dataclasses.replace(decomposition, subalgebras=members), numeric=True)
    assert report.verdict is Verdict.INVALID
    assert any("subalgebras 2 and 3" in failure for failure in report.failures)


def test_external_verification_checks_tags(ab):
    decomposition = ab(3)
    members = list(decomposition.subalgebras)
    masa_index = next(i for i, s in enumerate(members) if s.kind is SubalgebraKind.MASA)
    original = members[masa_index]
    members[masa_index] = SubalgebraDesc(SubalgebraKind.FACTOR, original.subspace, original.gl2_rep)
    report = verify_external(dataclasses.replace(decomposition, subalgebras=members))
    assert report.verdict is Verdict.INVALID
    assert any("tagged factor" in failure for failure in report.failures)
