# tests/test_glueing.py
import pytest
from hypothesis import given, settings, strategies as st

from services.errors import AdmissibleError, PairError, PreconditionError, SpaceMismatch
from services.glueing import (
    AdmissibleMap, admissible_leq, check_pair, closed_in_glueing, compactness_criterion, coproduct, decompose,
    empty_map, full_map, glue, glue_one_sided, hausdorff_criterion, is_complete,
    is_dense_left, is_dense_right, make_admissible, one_sided, split_space,
)
from services.harness import SplitMix64, gen_glued, gen_space
from services.spaces import discrete_space, enumerate_closed_sets, from_closures, same_topology, sierpinski

# ---------- admissible maps ----------

def test_non_monotone_table_names_both_points():
    X, Y = sierpinski(), discrete_space(["y"])
    with pytest.raises(AdmissibleError) as e:
        make_admissible(X, Y, [0b1, 0b0])
    assert e.value.witness["points"] == ["s0", "s1"]

def test_value_must_be_closed():
    X, Y = discrete_space(["x"]), sierpinski()
    with pytest.raises(AdmissibleError) as e:
        make_admissible(X, Y, {"x": ["s1"]})
    assert e.value.witness["points"] == ["x"]

def test_label_table_must_be_total():
    X, Y = discrete_space(["x1", "x2"]), discrete_space(["y"])
    with pytest.raises(AdmissibleError):
        make_admissible(X, Y, {"x1": ["y"]})

def test_admissible_readback_from_labels():
    X, Y = sierpinski(), sierpinski("t0", "t1")
    f = make_admissible(X, Y, {"s0": ["t0"], "s1": ["t0", "t1"]})
    assert f.gen == (0b01, 0b11)
    assert f.table() == {"s0": ["t0"], "s1": ["t0", "t1"]}
    assert is_complete(f)
    assert admissible_leq(empty_map(X, Y), f) and admissible_leq(f, full_map(X, Y))
    assert not is_complete(empty_map(X, Y))

# ---------- pairs ----------

def test_pair_condition_failure():
    X, Y = discrete_space(["x1", "x2"]), discrete_space(["y"])
    f = AdmissibleMap(X, Y, (0b1, 0b0))
    g = AdmissibleMap(Y, X, (0b10,))
    with pytest.raises(PairError) as e:
        check_pair(f, g)
    assert e.value.witness == {"points": ["x1"], "side": "left"}

def test_pair_directions_must_match():
    X, Y = discrete_space(["x"]), discrete_space(["y"])
    with pytest.raises(SpaceMismatch):
        check_pair(empty_map(X, Y), empty_map(X, Y))

def test_mutual_pair_makes_indiscrete_sum():
    X, Y = discrete_space(["x"]), discrete_space(["y"])
    s = glue(X, Y, check_pair(full_map(X, Y), full_map(Y, X)))
    assert enumerate_closed_sets(s.total) == [0, 0b11]

# ---------- glueing ----------

def test_one_point_glueing():
    X, Y = discrete_space(["x"]), discrete_space(["y"])
    s = glue_one_sided(X, Y, full_map(X, Y))
    assert s.total.points == ("L:x", "R:y")
    assert enumerate_closed_sets(s.total) == [0b00, 0b10, 0b11]
    assert [d for d in range(4) if closed_in_glueing(s, d)] == [0b00, 0b10, 0b11]
    assert is_dense_left(s) and not is_dense_right(s)

def test_coproduct_is_disjoint():
    s = coproduct(sierpinski(), discrete_space(["y"]))
    assert s.total.down == (0b001, 0b011, 0b100)
    assert not is_dense_left(s) and not is_dense_right(s)

def test_label_collision_is_rejected():
    X, Y = discrete_space(["p"]), discrete_space(["p"])
    with pytest.raises(PreconditionError):
        glue_one_sided(X, Y, empty_map(X, Y))

def test_embeddings_are_identity_on_halves():
    X, Y = sierpinski(), sierpinski("t0", "t1")
    s = glue_one_sided(X, Y, full_map(X, Y))
    assert s.embed_left.table == (0, 1)
    assert s.embed_right.table == (2, 3)
    assert s.split(0b1101) == (0b01, 0b11)
    assert s.join(0b01, 0b11) == 0b1101

# ---------- decomposition ----------

def test_decompose_needs_open_left_half():
    with pytest.raises(PreconditionError):
        decompose(sierpinski(), 0b01)

def test_decompose_open_point_of_sierpinski():
    Z = sierpinski()
    pair = decompose(Z, 0b10)
    assert pair.f.source.points == ("s1",) and pair.f.target.points == ("s0",)
    assert pair.f.gen == (0b1,)
    assert pair.g.gen == (0b0,)
    s = glue(pair.f.source, pair.f.target, pair)
    assert same_topology(s.strip_labels(), Z)

def test_split_of_closed_half_uses_g():
    pair = split_space(sierpinski(), 0b01)
    assert pair.f.gen == (0b0,)
    assert pair.g.gen == (0b1,)

def test_split_needs_two_halves():
    with pytest.raises(PreconditionError):
        split_space(sierpinski(), 0b11)

# ---------- criteria ----------

def test_hausdorff_on_discrete_halves():
    X, Y = discrete_space(["x1", "x2"]), discrete_space(["y1", "y2"])
    assert hausdorff_criterion(X, Y, empty_map(X, Y))
    assert not hausdorff_criterion(X, Y, make_admissible(X, Y, [0b01, 0b00]))

def test_hausdorff_refuses_non_discrete_halves():
    X, Y = sierpinski(), discrete_space(["y"])
    with pytest.raises(PreconditionError):
        hausdorff_criterion(X, Y, empty_map(X, Y))

def test_hausdorff_reads_f_on_large_halves():
    X, Y = discrete_space([f"x{i}" for i in range(20)]), discrete_space(["y"])
    assert hausdorff_criterion(X, Y, empty_map(X, Y))
    assert not hausdorff_criterion(X, Y, make_admissible(X, Y, [0] * 19 + [1]))

def test_compactness_holds_on_finite_glueings():
    X, Y = discrete_space(["x"]), discrete_space(["y"])
    assert compactness_criterion(glue(X, Y, one_sided(empty_map(X, Y))))

# ---------- generated glueings ----------

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_closed_sets_match_pair_conditions(seed):
    rng = SplitMix64(seed)
    s = gen_glued(rng, 1 + rng.below(3), 1 + rng.below(3))
    closed = set(enumerate_closed_sets(s.total))
    assert closed == {d for d in range(1 << s.total.n) if closed_in_glueing(s, d)}

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_split_then_glue_recovers_space(seed):
    rng = SplitMix64(seed)
    n = 2 + rng.below(4)
    Z = gen_space(rng, n, labels=[f"z{i}" for i in range(n)])
    xs = 1 + rng.below((1 << n) - 2)
    pair = split_space(Z, xs)
    s = glue(pair.f.source, pair.f.target, pair)
    assert same_topology(s.strip_labels(), Z)
