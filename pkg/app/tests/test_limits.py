# tests/test_limits.py
import pytest
from hypothesis import given, settings, strategies as st

from services.errors import DiagramError, PreconditionError
from services.glueing import glue_one_sided, make_admissible
from services.harness import SplitMix64, gen_codirected_diagram, gen_free_diagram
from services.limits import (
    InverseSystem, detect_stabilization, find_isomorphism, is_codirected, is_cone, least_object, make_diagram,
    mediating_map, sum_limit, system_stages, terminal_map, terminal_object,
)
from services.spaces import SpaceMap, discrete_space, sierpinski
from services.transport import diagram_continuity


def _two_remainders():
    """Two glueings of a two-point base, each sending x1 and x2 to different remainder points."""
    X = discrete_space(["x1", "x2"])
    A = discrete_space(["a-", "a+"])
    B = discrete_space(["b-", "b+"])
    objects = {
        "A": glue_one_sided(X, A, make_admissible(X, A, [0b01, 0b10])),
        "B": glue_one_sided(X, B, make_admissible(X, B, [0b01, 0b10])),
    }
    return make_diagram(X, objects, {})

# ---------- terminal object ----------

def test_terminal_object_has_one_point_remainder():
    t = terminal_object(sierpinski())
    assert t.right.points == ("inf",)
    assert t.f.gen == (1, 1)

def test_terminal_map_is_continuous():
    X, Y = sierpinski(), discrete_space(["y1", "y2"])
    s = glue_one_sided(X, Y, make_admissible(X, Y, [0b00, 0b01]))
    m = terminal_map(s)
    assert m.phi.table == (0, 0)
    assert diagram_continuity(m)

def test_empty_diagram_limit_is_terminal():
    X = discrete_space(["x"])
    limit = sum_limit(make_diagram(X, {}, {}))
    assert limit.full.right.points == ("inf",)

# ---------- limits ----------

def test_single_object_limit_is_isomorphic():
    X, Y = sierpinski(), discrete_space(["y1", "y2"])
    s = glue_one_sided(X, Y, make_admissible(X, Y, [0b01, 0b11]))
    limit = sum_limit(make_diagram(X, {"c0": s}, {}))
    assert find_isomorphism(limit.full, s) is not None

def test_limit_of_independent_remainders_is_not_dense():
    limit = sum_limit(_two_remainders())
    assert limit.full.right.n == 4
    assert limit.dense is not None
    assert limit.dense.right.points == (("a-", "b-"), ("a+", "b+"))

def test_projections_form_a_cone():
    d = _two_remainders()
    limit = sum_limit(d)
    assert is_cone(d, limit.projections)
    mediating = mediating_map(limit, limit.projections)
    assert mediating.phi.table == tuple(range(limit.full.right.n))

def test_object_on_another_base_is_rejected():
    X, Z = discrete_space(["x"]), discrete_space(["z"])
    Y = discrete_space(["y"])
    s = glue_one_sided(Z, Y, make_admissible(Z, Y, [0b1]))
    with pytest.raises(DiagramError):
        make_diagram(X, {"c0": s}, {})

def test_arrow_to_unknown_object_is_rejected():
    X, Y = discrete_space(["x"]), discrete_space(["y"])
    s = glue_one_sided(X, Y, make_admissible(X, Y, [0b1]))
    with pytest.raises(DiagramError):
        make_diagram(X, {"c0": s}, {("c0", "c9"): SpaceMap(Y, Y, (0,))})

def test_arrow_must_be_continuous_between_glueings():
    X = discrete_space(["x"])
    Y1, Y2 = discrete_space(["y"]), discrete_space(["w1", "w2"])
    s1 = glue_one_sided(X, Y1, make_admissible(X, Y1, [0b1]))
    s2 = glue_one_sided(X, Y2, make_admissible(X, Y2, [0b01]))
    with pytest.raises(DiagramError):
        make_diagram(X, {"c0": s1, "c1": s2}, {("c0", "c1"): SpaceMap(Y1, Y2, (1,))})

# ---------- shape ----------

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_generated_tree_diagrams_are_codirected(seed):
    d = gen_codirected_diagram(SplitMix64(seed))
    assert least_object(d) == "c0"
    assert is_codirected(d)

def test_free_diagram_has_no_least_object():
    d = gen_free_diagram(SplitMix64(5), objects=2)
    assert least_object(d) is None
    assert not is_codirected(d)

# ---------- inverse systems ----------

def test_stabilization_from_the_start():
    s = InverseSystem(tuple((0, 1) for _ in range(5)), tuple((0, 1) for _ in range(4)))
    assert detect_stabilization(s, window=3) == 0

def test_stabilization_after_a_merge():
    stages = ((0,), (0, 1), (0, 1), (0, 1), (0, 1))
    bonds = ((0, 0), (0, 1), (0, 1), (0, 1))
    s = InverseSystem(stages, bonds)
    assert detect_stabilization(s, window=3) == 1
    assert detect_stabilization(s, window=4) is None

def test_stage_reports():
    s = InverseSystem(((0,), (0, 1), (0, 1)), ((0, 0), (1, 0)))
    reports = system_stages(s, 3)
    assert [r.size for r in reports] == [1, 2, 2]
    assert reports[0].bond_surjective and not reports[0].bond_injective
    assert reports[1].bond_injective and reports[1].bond_surjective
    assert reports[2].bond_injective is None
    with pytest.raises(PreconditionError):
        system_stages(s, 4)

def test_bond_out_of_range_is_rejected():
    with pytest.raises(PreconditionError):
        InverseSystem(((0,), (0,)), ((3,),))
