# tests/test_coarse.py
import pytest
from hypothesis import given, settings, strategies as st

import services.coarse as coarse
from services.coarse import (
    CoarseMap, Relation, are_close, bounded_classes, build_structure, controlled, diagonal, full_structure,
    identity_coarse, is_bounded, is_coarse_map, is_connected, is_quasi_inverse, metric_structure, preceq,
    pullback_coarse, sections, sim, structure_report, trivial_structure,
)
from services.errors import NotCoarseError, PreconditionError, SaturationOverflow, SpaceMismatch
from services.harness import SplitMix64, gen_relation, gen_structure, generative_controlled


def _blocks():
    """Six points over three base points, with base points 1 and 2 declared close."""
    zeta = build_structure([1, 2, 3], [[(1, 2)]])
    ground = ("e0", "e1", "e2", "e3", "e4", "e5")
    table = (0, 0, 1, 1, 2, 2)
    return ground, table, zeta

# ---------- controlled sets ----------

def test_diagonal_is_always_controlled():
    cs = trivial_structure(["a", "b"])
    assert controlled(cs, Relation.of(cs.ground, [("a", "a"), ("b", "b")]))
    assert not controlled(cs, Relation.of(cs.ground, [("a", "b")]))

def test_generators_close_under_inverse_and_composition():
    cs = build_structure(["a", "b", "c"], [[("a", "b")], [("b", "c")]])
    assert controlled(cs, cs.relation([("c", "a")]))
    assert is_connected(cs)

def test_relation_on_other_ground_is_rejected():
    cs = trivial_structure(["a"])
    with pytest.raises(SpaceMismatch):
        controlled(cs, Relation.of(["b"], [("b", "b")]))

def test_pair_outside_ground_is_rejected():
    with pytest.raises(PreconditionError):
        build_structure(["a"], [[("a", "z")]])

def test_saturation_cap(monkeypatch):
    monkeypatch.setattr(coarse, "SATURATION_CAP", 0)
    with pytest.raises(SaturationOverflow):
        trivial_structure(["a", "b"])

# ---------- bounded sets ----------

def test_bounded_sets():
    cs = trivial_structure(["a", "b"])
    assert is_bounded(cs, 0)
    assert is_bounded(cs, 0b01)
    assert not is_bounded(cs, 0b11)
    assert is_bounded(full_structure(["a", "b"]), 0b11)

def test_preceq_and_sim():
    cs = trivial_structure(["a", "b"])
    assert preceq(cs, 0b01, 0b11)
    assert not preceq(cs, 0b01, 0b10)
    full = full_structure(["a", "b"])
    assert sim(full, 0b01, 0b10)

def test_bounded_classes_of_blocks():
    _, _, zeta = _blocks()
    assert bounded_classes(zeta) == [0b011, 0b100]

def test_metric_structure_is_one_class():
    cs = metric_structure([0, 1, 2, 3], lambda a, b: abs(a - b), [1])
    assert bounded_classes(cs) == [0b1111]

def test_structure_report():
    _, _, zeta = _blocks()
    report = structure_report(zeta)
    assert report["ground"] == ["1", "2", "3"]
    assert report["classes"] == [["1", "2"], ["3"]]

# ---------- maps ----------

def test_identity_is_coarse():
    cs = build_structure(["a", "b", "c"], [[("a", "b")]])
    assert is_coarse_map(identity_coarse(cs))

def test_collapse_needs_bounded_source():
    point = full_structure(["*"])
    assert not is_coarse_map(CoarseMap(trivial_structure(["a", "b"]), point, (0, 0)))
    assert is_coarse_map(CoarseMap(full_structure(["a", "b"]), point, (0, 0)))

def test_quasi_inverse_of_collapse():
    src, point = full_structure(["a", "b"]), full_structure(["*"])
    f = CoarseMap(src, point, (0, 0))
    g = CoarseMap(point, src, (0,))
    assert is_quasi_inverse(f, g)

def test_quasi_inverse_needs_coarse_maps():
    src, point = trivial_structure(["a", "b"]), full_structure(["*"])
    with pytest.raises(NotCoarseError):
        is_quasi_inverse(CoarseMap(src, point, (0, 0)), CoarseMap(point, src, (0,)))

def test_close_maps():
    cs = full_structure(["a", "b"])
    assert are_close(identity_coarse(cs), CoarseMap(cs, cs, (1, 0)))
    triv = trivial_structure(["a", "b"])
    assert not are_close(identity_coarse(triv), CoarseMap(triv, triv, (1, 0)))

# ---------- coproduct pullback ----------

def test_sections_count():
    _, table, _ = _blocks()
    assert len(sections(table, 3)) == 8

def test_sections_need_surjection():
    with pytest.raises(PreconditionError):
        sections((0, 0), 2)

def test_pulled_structure_projects_coarsely():
    ground, table, zeta = _blocks()
    eps = pullback_coarse(ground, table, zeta)
    proj = CoarseMap(eps, zeta, table)
    assert is_coarse_map(proj)
    for sec in sections(table, 3):
        s = CoarseMap(zeta, eps, sec)
        assert is_coarse_map(s)
        assert is_quasi_inverse(proj, s)

@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_pulled_structure_controls_exactly_the_preimages(seed):
    ground, table, zeta = _blocks()
    eps = pullback_coarse(ground, table, zeta)
    proj = CoarseMap(eps, zeta, table)
    e = gen_relation(SplitMix64(seed), 6)
    assert coarse._controlled(eps, e) == coarse._controlled(zeta, proj.image_relation(e))

# ---------- generative oracle ----------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_saturation_agrees_with_generative_closure(seed):
    rng = SplitMix64(seed)
    cs = gen_structure(rng, 1 + rng.below(3))
    e = gen_relation(rng, cs.n) | diagonal(cs.n)
    assert coarse._controlled(cs, e) == generative_controlled(cs, e)
