import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kahlerlift import suites as S
from kahlerlift.suites import CheckRecord, ConfigError, SuiteConfig, VerificationReport


@pytest.fixture(scope="module")
def flat_all():
    return S.run_suite(SuiteConfig(geometry="flat_c", suite="all", points=16, seed=42))


@pytest.fixture(scope="module")
def sphere_curvature():
    return S.run_suite(SuiteConfig(geometry="sphere", suite="curvature", points=32, seed=7))


def test_flat_plane_everything_passes_tightly(flat_all):
    assert flat_all.all_passed
    for c in flat_all.checks:
        if c.comparator == "<" and c.name != "lift.signature" and c.name != "hodge.duality_verdict":
            assert c.residual < 1e-9, c.name
    names = {c.name for c in flat_all.checks}
    # existence checks for curved or variable geometries do not apply here
    assert "curvature.einstein" not in names
    assert "weyl.nonzero" not in names
    assert "curvature.flat_rm_tilde" in names


def test_sphere_curvature_suite(sphere_curvature):
    names = {c.name for c in sphere_curvature.checks}
    assert {"curvature.ricci", "curvature.scalar", "curvature.einstein"} <= names
    assert sphere_curvature.all_passed
    assert all(c.name.startswith("curvature.") for c in sphere_curvature.checks)
    assert sphere_curvature.check("curvature.ricci").points == 32


def test_bump_weyl_existence_check():
    report = S.run_suite(SuiteConfig(geometry="bump", suite="weyl", points=32, seed=7))
    rec = report.check("weyl.nonzero")
    assert rec.comparator == ">" and rec.passed
    assert rec.residual > 1e-3


def test_checks_are_sorted_by_name(flat_all):
    names = [c.name for c in flat_all.checks]
    assert names == sorted(names)


def test_registry_names_are_unique_and_suited():
    names = [spec.name for spec in S.REGISTRY]
    assert len(names) == len(set(names))
    assert {spec.suite for spec in S.REGISTRY} == set(S.SUITES)
    assert all(spec.comparator in ("<", ">") for spec in S.REGISTRY)


# ---------------------------------------------------------------- config

@pytest.mark.parametrize("kwargs, match", [
    ({"suite": "geodesics"}, "unknown suite"),
    ({"geometry": "torus"}, "unknown geometry"),
    ({"geometry": "sphere", "params": {"sigma": 1.0}}, "does not take"),
    ({"points": 0}, "at least 1"),
    ({"jet_order": 4}, "jet_order"),
    ({"tol_overrides": {"curvature.nope": 1e-3}}, "unknown tolerance"),
    ({"tol_overrides": {"curvature": -1.0}}, "positive"),
])
def test_config_validation(kwargs, match):
    with pytest.raises(ConfigError, match=match):
        SuiteConfig(**kwargs).validate()


def test_invalid_config_fails_before_any_work(monkeypatch):
    monkeypatch.setattr(S, "SuiteContext", lambda *a, **k: pytest.fail("should not run"))
    with pytest.raises(ConfigError):
        S.run_suite(SuiteConfig(suite="nope"))


def test_jet_order_raised_for_curvature_suites():
    assert SuiteConfig(suite="curvature", jet_order=2).effective_jet_order == 3
    assert SuiteConfig(suite="kahler", jet_order=2).effective_jet_order == 2
    assert SuiteConfig(suite="all").echo()["jet_order"] == 3


def test_seed_is_reduced_to_64_bits():
    assert SuiteConfig(seed=-1).echo()["seed"] == 2**64 - 1


def test_tolerance_overrides_full_name_beats_suite():
    cfg = SuiteConfig(geometry="sphere", suite="curvature", points=2,
                      tol_overrides={"curvature": 1e-30, "curvature.scalar": 1.0})
    report = S.run_suite(cfg)
    assert report.check("curvature.scalar").threshold == 1.0
    assert report.check("curvature.ricci").threshold == 1e-30
    assert not report.check("curvature.ricci").passed
    assert not report.all_passed


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv(S.THREADS_ENV, "3")
    assert S.thread_count() == 3
    monkeypatch.setenv(S.THREADS_ENV, "0")
    assert S.thread_count() == 1
    monkeypatch.setenv(S.THREADS_ENV, "many")
    with pytest.raises(ConfigError):
        S.thread_count()


# ---------------------------------------------------------------- reports

def test_empty_report_is_valid_json():
    report = VerificationReport([], SuiteConfig().echo())
    doc = json.loads(S.emit_report(report))
    assert doc["schema"] == 1
    assert doc["checks"] == []
    assert doc["summary"]["checks"] == 0 and doc["summary"]["all_passed"]


def test_round_trip(flat_all):
    again = S.load_report(S.emit_report(flat_all))
    assert again == flat_all


def test_residuals_are_17_digit_strings(flat_all):
    doc = json.loads(S.emit_report(flat_all))
    for rec, c in zip(doc["checks"], flat_all.checks):
        assert isinstance(rec["residual"], str)
        assert float(rec["residual"]) == c.residual


finite = st.floats(allow_nan=False, width=64)


@given(finite | st.just(math.inf), st.floats(1e-300, 1e300), st.sampled_from(["<", ">"]))
def test_record_round_trip_is_bit_exact(residual, threshold, cmp):
    rec = CheckRecord("kahler.j_squared", "anchor", residual, threshold, cmp, 4, 0.125)
    report = VerificationReport([rec], {"geometry": "sphere"}, timestamp="t")
    back = S.load_report(S.emit_report(report))
    assert back == report
    assert back.checks[0].passed == rec.passed


def test_load_rejects_tampered_pass_flag(flat_all):
    doc = json.loads(S.emit_report(flat_all))
    doc["checks"][0]["passed"] = not doc["checks"][0]["passed"]
    with pytest.raises(ValueError, match="contradicts"):
        S.load_report(json.dumps(doc))


def test_load_rejects_unknown_schema():
    with pytest.raises(ValueError, match="schema"):
        S.load_report('{"schema": 2, "checks": []}')


def test_text_table_width(flat_all):
    text = S.emit_report(flat_all, "text").decode()
    lines = text.splitlines()
    assert all(len(line) <= S.TEXT_WIDTH for line in lines)
    assert lines[-1] == f"{len(flat_all.checks)}/{len(flat_all.checks)} checks passed"


def test_unknown_format(flat_all):
    with pytest.raises(ConfigError):
        S.emit_report(flat_all, "yaml")


def test_pass_flag_derives_from_residual_alone():
    assert CheckRecord("a", "", 0.5, 1.0, "<", 1).passed
    assert not CheckRecord("a", "", 1.0, 1.0, "<", 1).passed
    assert CheckRecord("a", "", 2.0, 1.0, ">", 1).passed
    assert not CheckRecord("a", "", math.inf, 1.0, "<", 1).passed
    with pytest.raises(ValueError):
        CheckRecord("a", "", 0.0, 1.0, "=", 1).passed


def test_nan_residual_becomes_a_failure(monkeypatch):
    broken = [dataclasses.replace(s, run=lambda ctx: (float("nan"), 1)) if s.name == "kahler.j_squared" else s
              for s in S.REGISTRY]
    monkeypatch.setattr(S, "REGISTRY", broken)
    report = S.run_suite(SuiteConfig(geometry="sphere", suite="kahler", points=2))
    rec = report.check("kahler.j_squared")
    assert rec.residual == math.inf and not rec.passed


# ---------------------------------------------------------------- determinism

def test_canonical_output_independent_of_threads():
    cfg = SuiteConfig(geometry="para_bump", suite="hodge", points=8, seed=99)
    one = S.emit_report(S.run_suite(cfg, threads=1), canonical=True)
    four = S.emit_report(S.run_suite(cfg, threads=4), canonical=True)
    assert one == four


def test_different_seeds_sample_different_points():
    a = S.SuiteContext(SuiteConfig(geometry="sphere", points=4, seed=1))
    b = S.SuiteContext(SuiteConfig(geometry="sphere", points=4, seed=2))
    assert not np.allclose(a.base_points[0], b.base_points[0])
    again = S.SuiteContext(SuiteConfig(geometry="sphere", points=4, seed=1))
    assert np.array_equal(a.base_points[0], again.base_points[0])
