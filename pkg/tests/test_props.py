import pytest

import relhom.complexes as cx
from relhom.complexes import Complex
from relhom.props import PROPERTIES, prop_suite, replay_seed, run_property


def test_budget_zero_is_empty():
    rep = prop_suite(0, 0)
    assert rep.results == {} and rep.ok
    assert "no properties run" in rep.text()
    assert rep.to_json()["properties"] == {}


def test_suite_passes_and_is_deterministic():
    a = prop_suite(7, 2)
    b = prop_suite(7, 2)
    assert a.ok, a.failures()
    assert set(a.results) == set(PROPERTIES)
    assert a.to_json() == b.to_json()
    assert all(r.runs == 2 for r in a.results.values())


def test_replay_seed_stable():
    assert replay_seed(1, "x", 0) == replay_seed(1, "x", 0)
    assert replay_seed(1, "x", 0) != replay_seed(1, "x", 1)
    assert replay_seed(1, "x", 0) != replay_seed(2, "x", 0)


def _buggy_shift(X: Complex, n: int) -> Complex:
    # wrong sign convention: only positive odd shifts negate the differential
    sign = -1 if (n > 0 and n % 2) else 1
    comps = {k - n: M for k, M in X.components.items()}
    diffs = {k - n: d * sign for k, d in X.differentials.items()}
    return Complex(X.modulus, comps, diffs, check=False)


def _constant_sign_shift(X: Complex, n: int) -> Complex:
    comps = {k - n: M for k, M in X.components.items()}
    diffs = {k - n: -d for k, d in X.differentials.items()}
    return Complex(X.modulus, comps, diffs, check=False)


@pytest.mark.parametrize("bug", [_buggy_shift, _constant_sign_shift])
def test_injected_shift_bug_is_caught(monkeypatch, bug):
    monkeypatch.setattr(cx, "shift", bug)
    rep = prop_suite(0, 10, ["complexes.shift_inverse", "complexes.shift_additive"])
    assert not rep.ok
    res = rep.results["complexes.shift_additive"]
    assert res.counterexample is not None
    # the recorded replay seed reproduces the failure
    ok, _ = run_property("complexes.shift_additive", res.counterexample["replay_seed"])
    assert not ok
    assert "FAIL" in rep.text()


def test_crash_is_reported_not_raised(monkeypatch):
    def boom(X, n):
        raise RuntimeError("boom")

    monkeypatch.setattr(cx, "shift", boom)
    rep = prop_suite(0, 1, ["complexes.shift_inverse"])
    r = rep.results["complexes.shift_inverse"]
    assert r.passed == 0 and "RuntimeError" in r.counterexample["detail"]
