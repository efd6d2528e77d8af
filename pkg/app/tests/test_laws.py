# tests/test_laws.py
import pytest

import services.ends as ends
import services.glueing as glueing
import services.laws as laws
from services.harness import all_diagrams, replay, run_laws
from services.laws import SUITES, find_law


@pytest.fixture
def small_sweeps(monkeypatch):
    # enumerated laws sweep halves of two points instead of three
    monkeypatch.setattr(laws, "EXHAUSTIVE_POINTS", 2)

# ---------- healthy engine ----------

@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes(suite, small_sweeps):
    report = run_laws(suite, 5, 2024)
    assert report.passed, report.to_json()
    assert report.cases > 0

def test_all_suites_in_one_report(small_sweeps):
    report = run_laws("all", 1, 3)
    assert report.passed, report.to_json()
    assert report.suite == "all"

# ---------- three-point sweeps ----------

def _sweep(law_id):
    law = find_law(law_id)
    cases = list(law.enumerate())
    return cases, [k for k, case in enumerate(cases) if not law.holds(case)]

def test_round_trip_covers_every_pair_on_three_points():
    law = find_law("glueing.round_trip_exhaustive")
    seen, broken = 0, []
    for k, s in enumerate(law.enumerate()):
        seen += 1
        if not law.holds(s):
            broken.append(k)
    # glued pairs on labeled halves match topologies on their union: 4 + 2*29 + 2*355 + 355 + 2*6942 + 209527
    assert seen == 224538
    assert broken == []

def test_hausdorff_sweep_on_three_points():
    cases, broken = _sweep("glueing.hausdorff_exhaustive")
    assert len(cases) == 682 and broken == []

@pytest.mark.parametrize("law_id", ["limits.matching_families_exhaustive", "limits.cone_universal_exhaustive"])
def test_limit_sweeps_on_three_points(law_id):
    cases, broken = _sweep(law_id)
    assert cases and broken == []
    assert max(max(o.total.n for o in d.objects.values()) for d in cases) == 3

def test_diagram_sweep_includes_arrows():
    diagrams = list(all_diagrams(3))
    assert any(d.arrows for d in diagrams)
    assert {len(d.objects) for d in diagrams} == {1, 2}

def test_pullback_sweep_checks_every_competitor():
    cases, broken = _sweep("transport.pullback_coarsest_exhaustive")
    assert cases and broken == []
    assert all(c.other is None for c in cases)

@pytest.mark.parametrize("law_id,count", [
    ("ends.bond_functoriality_exhaustive", 8 * 165),
    ("ends.tree_growth_exhaustive", 8),
    ("ends.tree_never_settles", 1),
    ("ends.fixture_counts", 10),
])
def test_ends_sweeps(law_id, count):
    cases, broken = _sweep(law_id)
    assert len(cases) == count and broken == []

# ---------- broken engines are caught ----------

def _failed_ids(report):
    return {f.law_id for f in report.failures}

def test_skipping_the_monotone_check_is_caught(monkeypatch, small_sweeps):
    monkeypatch.setattr(glueing, "_monotone_witness", lambda X, gen: None)
    report = run_laws("glueing", 60, 1)
    assert "glueing.admissible_readback" in _failed_ids(report)

    failure = next(f for f in report.failures if f.law_id == "glueing.admissible_readback")
    assert failure.seed is not None
    law = find_law(failure.law_id)
    assert not law.holds(replay(law, failure.seed))

def test_one_directional_closure_is_caught(monkeypatch, small_sweeps):
    original = glueing._close_up

    def _forward_off(X, Y, pair, mask, forward=True, backward=True):
        return original(X, Y, pair, mask, False, backward)

    monkeypatch.setattr(glueing, "_close_up", _forward_off)
    report = run_laws("glueing", 30, 5)
    assert "glueing.tau_axioms" in _failed_ids(report)

    failure = next(f for f in report.failures if f.law_id == "glueing.tau_axioms")
    assert len(failure.counterexample["total"]["points"]) <= 4
    # the exhaustive sweep reports an enumeration index instead of a seed
    exhaustive = [f for f in report.failures if f.law_id == "glueing.exhaustive"]
    assert exhaustive and exhaustive[0].seed is None

def test_escape_everything_is_caught(monkeypatch):
    monkeypatch.setattr(ends, "_escapes", lambda members, dist, horizon: True)
    report = run_laws("ends", 20, 9)
    failed = _failed_ids(report)
    assert "ends.finite_graph_no_ends" in failed
    assert "ends.partition" in failed

def test_failures_are_capped_per_law(monkeypatch, small_sweeps):
    monkeypatch.setattr(glueing, "_monotone_witness", lambda X, gen: None)
    report = run_laws("glueing", 60, 1)
    assert sum(f.law_id == "glueing.admissible_readback" for f in report.failures) <= 3

def test_broken_reports_stay_reproducible(monkeypatch):
    monkeypatch.setattr(ends, "_escapes", lambda members, dist, horizon: True)
    assert run_laws("ends", 10, 4).to_json() == run_laws("ends", 10, 4, jobs=3).to_json()
