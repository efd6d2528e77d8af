# tests/test_harness.py
import pytest
from hypothesis import given, settings, strategies as st

from services.errors import PreconditionError, UnknownSuite
from services.harness import (
    Law, SplitMix64, all_admissible, all_glued, all_pairs, all_spaces, gen_admissible, gen_space, minimize, replay, run_laws, trial_seed,
)
from services.laws import SUITES, find_law, suite_laws
from services.spaces import sierpinski

# ---------- random source ----------

def test_splitmix_reference_outputs():
    rng = SplitMix64(0)
    assert [rng.next() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

def test_split_does_not_advance_parent():
    rng = SplitMix64(42)
    a = rng.split(3).next()
    assert rng.split(3).next() == a
    assert rng.state == 42

def test_below_needs_positive_bound():
    with pytest.raises(PreconditionError):
        SplitMix64(1).below(0)

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 100))
def test_below_stays_in_range(seed, n):
    rng = SplitMix64(seed)
    assert all(0 <= rng.below(n) < n for _ in range(20))

def test_trial_seeds_depend_on_law_and_trial():
    assert trial_seed(7, "space.product", 0) == trial_seed(7, "space.product", 0)
    assert trial_seed(7, "space.product", 0) != trial_seed(7, "space.product", 1)
    assert trial_seed(7, "space.product", 0) != trial_seed(7, "space.components", 0)

# ---------- generators ----------

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_generation_is_deterministic(seed):
    assert gen_space(SplitMix64(seed), 5) == gen_space(SplitMix64(seed), 5)

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_generated_admissible_maps_validate(seed):
    rng = SplitMix64(seed)
    X, Y = gen_space(rng, 1 + rng.below(5), "x"), gen_space(rng, 1 + rng.below(5), "y")
    f = gen_admissible(rng, X, Y)
    assert all(Y.is_closed(m) for m in f.gen)

def test_gen_space_bounds():
    with pytest.raises(PreconditionError):
        gen_space(SplitMix64(0), 0)

# ---------- enumerators ----------

def test_topology_counts():
    assert len(all_spaces(1)) == 1
    assert len(all_spaces(2)) == 4
    assert len(all_spaces(3)) == 29

def test_admissible_maps_on_sierpinski():
    # monotone choices of closed values {}, {s0}, {s0,s1} per point
    assert len(list(all_admissible(sierpinski(), sierpinski("t0", "t1")))) == 6

@pytest.mark.parametrize("n,m,total", [(1, 1, 4), (1, 2, 29), (2, 2, 355)])
def test_pairs_match_topologies_on_the_union(n, m, total):
    # a glued pair on labeled halves is a topology on the n + m points
    assert sum(len(list(all_pairs(X, Y))) for X in all_spaces(n, "x") for Y in all_spaces(m, "y")) == total

def test_glued_sweep_counts():
    assert sum(1 for _ in all_glued(2)) == 4 + 2 * 29 + 355

# ---------- shrinking ----------

def _list_law(limit):
    def _shrink(case):
        for i in range(len(case)):
            yield case[:i] + case[i + 1:]
    return Law("test.short_lists", "test", lambda rng: [rng.below(10) for _ in range(8)],
               lambda case: len(case) < limit, _shrink)

def test_minimize_stops_at_smallest_failure():
    small, steps = minimize(_list_law(3), [1, 2, 3, 4, 5])
    assert small == [3, 4, 5]
    assert steps > 0

def test_minimize_leaves_passing_neighbours():
    small, _ = minimize(_list_law(1), [9])
    assert small == [9]

def test_replay_reproduces_draw():
    law = _list_law(3)
    assert replay(law, 99) == replay(law, 99)

# ---------- runner ----------

def test_zero_trials_give_empty_passing_report():
    report = run_laws("space", 0, 1)
    assert report.passed and report.cases == 0 and report.failures == []
    assert report.laws == [law.law_id for law in suite_laws("space")]

def test_unknown_suite():
    with pytest.raises(UnknownSuite) as e:
        run_laws("geometry", 1, 0)
    assert "all" in e.value.witness["known"]

def test_all_covers_every_suite():
    ids = [law.law_id for law in suite_laws("all")]
    assert {i.split(".")[0] for i in ids} == set(SUITES)
    assert len(ids) == len(set(ids))
    assert find_law(ids[0]).law_id == ids[0]

def test_reports_are_reproducible():
    a = run_laws("coarse", 4, 7)
    b = run_laws("coarse", 4, 7, jobs=4)
    assert a.passed
    assert a.to_json() == b.to_json()

def test_seed_is_reported_modulo_64_bits():
    assert run_laws("space", 0, 2**64 + 5).seed == 5
