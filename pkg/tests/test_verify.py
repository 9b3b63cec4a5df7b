"""verify: suite semantics, rejections, mutation detection and determinism."""

from __future__ import annotations

import json

import pytest

import cohaq.verify as V
from cohaq.poly import Z
from cohaq.quiver import a_n, jordan, loop_quiver, triple
from cohaq.verify import SUITE_NAMES, list_suites, run_suite, verify


def test_suite_registry():
    assert SUITE_NAMES == [
        "psi", "davison-joyce", "coassoc", "colocality", "hexagon",
        "bialgebra", "taut", "phi", "yangian", "bps",
    ]
    assert [s["name"] for s in list_suites()] == SUITE_NAMES
    assert all(s["anchor"] for s in list_suites())


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_every_suite_passes_on_small_symmetric_quiver(name):
    res = run_suite(name, loop_quiver(1), 2)
    assert res.status == "pass", res.counterexample
    assert res.cases > 0 and res.failures == 0


def test_spec_examples():
    assert run_suite("coassoc", jordan(), 3).status == "pass"
    assert run_suite("colocality", loop_quiver(0), 2).status == "pass"
    assert run_suite("bialgebra", jordan(), 2).status == "pass"


@pytest.mark.parametrize("name", ["colocality", "bialgebra", "bps"])
def test_non_symmetric_quiver_is_rejected_not_passed(name):
    res = run_suite(name, a_n(2), 2)
    assert res.status == "skipped"
    assert "symmetric" in res.reason
    assert res.cases == 0


def test_tripled_suites_run_on_the_triple():
    res = run_suite("phi", a_n(2), 2)
    assert res.status == "pass"
    weighted = run_suite("phi", jordan(2), 1)
    assert any("discarded" in n for n in weighted.notes)


def test_report_json_schema():
    rep = verify(jordan(), ["psi", "bps"], 2)
    data = json.loads(rep.to_json())
    assert data["schema"] == "cohaq.verify/1"
    assert data["passed"] is True and data["max_dim"] == 2
    assert [s["name"] for s in data["suites"]] == ["psi", "bps"]
    for s in data["suites"]:
        assert set(s) == {"name", "anchor", "status", "cases", "failures", "counterexample", "reason", "notes"}
    assert rep.to_text().endswith("result: PASS")


def test_report_is_deterministic_and_thread_independent():
    q = a_n(2)
    names = ["psi", "davison-joyce", "colocality"]
    first = verify(q, names, 2, threads=1).to_json()
    assert verify(q, names, 2, threads=1).to_json() == first
    assert verify(q, names, 2, threads=2).to_json() == first


def test_verify_argument_errors():
    with pytest.raises(KeyError):
        verify(jordan(), ["nope"], 1)
    with pytest.raises(ValueError):
        verify(jordan(), "all", -1)


# --- mutation checks: broken conventions must be caught ------------------------------------


def test_sign_flip_in_vertex_coproduct_is_detected(monkeypatch):
    orig = V.delta_z
    monkeypatch.setattr(V, "delta_z", lambda a, d1, d2, spectral=Z: orig(a, d1, d2, spectral) * (-1))
    res = run_suite("davison-joyce", loop_quiver(2), 2)
    assert res.status == "fail"
    assert "lhs - rhs" in res.counterexample


def test_broken_coproduct_fails_coassociativity_and_colocality(monkeypatch):
    orig = V.delta_z_leg

    def broken(q, f, d1, d2, spectral=Z, src=0, legs=(1, 2)):
        out = orig(q, f, d1, d2, spectral, src, legs)
        return out * (-1) if sum(d1) == 1 else out

    monkeypatch.setattr(V, "delta_z_leg", broken)
    for name in ("coassoc", "colocality"):
        res = run_suite(name, loop_quiver(0), 3)
        assert res.status == "fail", name
        assert res.counterexample
    rep = verify(loop_quiver(0), ["coassoc"], 3)
    assert not rep.passed and "FAIL" in rep.to_text()


def test_missing_hexagon_correction_is_detected(monkeypatch):
    from cohaq.spectral import SpectralFraction

    assert run_suite("hexagon", a_n(2), 3).status == "pass"
    monkeypatch.setattr(V, "_hexagon_factor", lambda k, num: SpectralFraction(1))
    res = run_suite("hexagon", a_n(2), 3)
    assert res.status == "fail"
    assert "(taut)" in res.counterexample
