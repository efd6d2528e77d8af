# services/laws.py
# Law registry: one list of seeded, shrinkable checks per suite.

from __future__ import annotations
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Any, Dict, Iterator, List, Optional, Tuple

import networkx as nx

from services.codec import space_to_doc, sum_to_doc
from services.coarse import (
    CoarseMap, CoarseStructure, _controlled, bounded_classes, compose, diagonal, inverse, is_bounded, is_coarse_map,
    is_connected, is_quasi_inverse, preceq, pullback_coarse, sections, sim, structure_report,
)
from services.ends import (
    EndSetDescription, GraphMap, LazyGraph, bonding, end_count, end_system, explore, f_K_eval, finite_graph,
    graph_from_spec, naturality_holds, stage_components, stage_space, vertex_key,
)
from services.errors import AdmissibleError, UnknownSuite
from services.glueing import (
    AdmissibleMap, SumSpace, admissible_leq, closed_in_glueing, decompose, glue, glue_one_sided,
    hausdorff_criterion, is_dense_left, is_dense_right, make_admissible, split_space,
)
from services.harness import (
    EXHAUSTIVE_POINTS, Law, SplitMix64, all_admissible, all_continuous, all_diagrams, all_discrete_glued, all_glued,
    all_one_sided, all_spaces, drop_one, gen_admissible, gen_block_structure,
    gen_closed_inclusion, gen_codirected_diagram, gen_finite_graph, gen_free_diagram, gen_glued, gen_inverse_system,
    gen_map, gen_point_map, gen_quotient, gen_relation, gen_space, gen_structure, gen_sum_map, gen_table,
    generative_family, shrink_glued,
)
from services.limits import (
    InverseSystem, SumDiagram, detect_stabilization, find_isomorphism, is_cone, least_object, make_diagram,
    mediating_map, sum_limit, system_stages, terminal_map, terminal_object,
)
from services.spaces import (
    FiniteSpace, SpaceMap, Subset, bits, compose_maps, connected_components, discrete_space, enumerate_closed_sets,
    identity_map, is_continuous, is_open_set, label_text, product, project_left, project_right, restrict_mask,
    subspace,
)
from services.transport import (
    SumMap, compose_through, cube_premises, diagram_continuity, identity_sum_map, pullback, pullback_functor,
    pullback_glueing, pushforward, pushforward_glueing, total_map,
)

SUITES = ("space", "glueing", "transport", "limits", "ends", "coarse")

# the oracle bundle walks every subset of each total, so it sweeps smaller halves
BUNDLE_POINTS = 2
# the pullback sweep multiplies the space counts of four halves
PULLBACK_POINTS = 2


def _size(rng: SplitMix64, hi: int) -> int:
    return 1 + rng.below(hi)


def _closed(X: FiniteSpace) -> List[Subset]:
    return enumerate_closed_sets(X)


def _labels_of(X: FiniteSpace, mask: Subset) -> List[str]:
    return sorted(label_text(p) for p in X.labels_of(mask))


def _map_doc(m: SpaceMap) -> Dict[str, str]:
    return {label_text(k): label_text(v) for k, v in m.as_labels().items()}


def _admissible_doc(f: AdmissibleMap) -> Dict[str, Any]:
    return {"source": space_to_doc(f.source), "target": space_to_doc(f.target), "gen": f.table()}


# ---------- space ----------
@dataclass(frozen=True)
class SpaceCase:
    space: FiniteSpace
    a: Subset = 0
    b: Subset = 0


def _draw_space_case(rng: SplitMix64) -> SpaceCase:
    X = gen_space(rng, _size(rng, 6))
    return SpaceCase(X, rng.subset(X.n), rng.subset(X.n))


def _shrink_space_case(c: SpaceCase) -> Iterator[SpaceCase]:
    for keep in drop_one(c.space.n):
        yield SpaceCase(subspace(c.space, keep), restrict_mask(c.a, keep), restrict_mask(c.b, keep))


def _describe_space_case(c: SpaceCase) -> Dict[str, Any]:
    return {"space": space_to_doc(c.space), "a": _labels_of(c.space, c.a), "b": _labels_of(c.space, c.b)}


def _unions_of_closures(X: FiniteSpace) -> List[Subset]:
    seen = {0}
    frontier = [0]
    while frontier:
        fresh = []
        for s in frontier:
            for x in range(X.n):
                t = s | X.down[x]
                if t not in seen:
                    seen.add(t)
                    fresh.append(t)
        frontier = fresh
    return sorted(seen)


def _closed_sets_agree(c: SpaceCase) -> bool:
    X = c.space
    fixed = [a for a in range(1 << X.n) if X.closure(a) == a]
    return sorted(_closed(X)) == fixed == _unions_of_closures(X)


def _closure_axioms(c: SpaceCase) -> bool:
    X, a, b = c.space, c.a, c.b
    cl = X.closure
    smallest = X.full
    for C in _closed(X):
        if not a & ~C:
            smallest &= C
    return (not a & ~cl(a) and cl(cl(a)) == cl(a) and cl(a | b) == cl(a) | cl(b)
            and cl(0) == 0 and not cl(a) & ~cl(a | b) and cl(a) == smallest)


def _subspace_traces(c: SpaceCase) -> bool:
    if not c.a:
        return True
    sub = subspace(c.space, c.a)
    return sorted(_closed(sub)) == sorted({restrict_mask(C, c.a) for C in _closed(c.space)})


def _components_partition(c: SpaceCase) -> bool:
    X = c.space
    comps = connected_components(X)
    union = 0
    for comp in comps:
        if comp & union:
            return False
        union |= comp
        if not X.is_closed(comp) or not X.is_closed(X.full & ~comp):
            return False
        reach, todo = comp & -comp, [next(bits(comp))]
        while todo:
            i = todo.pop()
            for j in bits(comp):
                if not (reach >> j) & 1 and (X.below(i, j) or X.below(j, i)):
                    reach |= 1 << j
                    todo.append(j)
        if reach != comp:
            return False
    return union == X.full and [c & -c for c in comps] == sorted(c & -c for c in comps)


@dataclass(frozen=True)
class MapCase:
    m: SpaceMap


def _draw_map_case(rng: SplitMix64) -> MapCase:
    X, Y = gen_space(rng, _size(rng, 4), "x"), gen_space(rng, _size(rng, 4), "y")
    return MapCase(gen_map(rng, X, Y) if rng.below(2) else gen_point_map(rng, X, Y))


def _shrink_map_case(c: MapCase) -> Iterator[MapCase]:
    for keep in drop_one(c.m.domain.n):
        sub = subspace(c.m.domain, keep)
        yield MapCase(SpaceMap(sub, c.m.codomain, tuple(c.m.table[i] for i in bits(keep))))


def _describe_map_case(c: MapCase) -> Dict[str, Any]:
    return {"domain": space_to_doc(c.m.domain), "codomain": space_to_doc(c.m.codomain), "map": _map_doc(c.m)}


def _continuity_oracle(c: MapCase) -> bool:
    m = c.m
    verdict = is_continuous(m)
    by_preimage = all(m.domain.is_closed(m.preimage(C)) for C in _closed(m.codomain))
    by_generators = all(not m.image(m.domain.down[x]) & ~m.codomain.down[m.table[x]] for x in range(m.domain.n))
    return verdict == by_preimage == by_generators


@dataclass(frozen=True)
class ProductCase:
    a: FiniteSpace
    b: FiniteSpace


def _draw_product_case(rng: SplitMix64) -> ProductCase:
    return ProductCase(gen_space(rng, _size(rng, 3), "a"), gen_space(rng, _size(rng, 3), "b"))


def _shrink_product_case(c: ProductCase) -> Iterator[ProductCase]:
    for keep in drop_one(c.a.n):
        yield ProductCase(subspace(c.a, keep), c.b)
    for keep in drop_one(c.b.n):
        yield ProductCase(c.a, subspace(c.b, keep))


def _product_specialization(c: ProductCase) -> bool:
    P, m = product(c.a, c.b), c.b.n
    for k in range(P.n):
        for l in range(P.n):
            if P.below(k, l) != (c.a.below(k // m, l // m) and c.b.below(k % m, l % m)):
                return False
    return is_continuous(project_left(P, c.a, c.b)) and is_continuous(project_right(P, c.a, c.b))


SPACE_LAWS = [
    Law("space.closed_sets_oracle", "space", _draw_space_case, _closed_sets_agree, _shrink_space_case, _describe_space_case),
    Law("space.closure_axioms", "space", _draw_space_case, _closure_axioms, _shrink_space_case, _describe_space_case),
    Law("space.subspace_traces", "space", _draw_space_case, _subspace_traces, _shrink_space_case, _describe_space_case),
    Law("space.components", "space", _draw_space_case, _components_partition, _shrink_space_case, _describe_space_case),
    Law("space.continuity_oracle", "space", _draw_map_case, _continuity_oracle, _shrink_map_case, _describe_map_case),
    Law("space.product", "space", _draw_product_case, _product_specialization, _shrink_product_case,
        lambda c: {"a": space_to_doc(c.a), "b": space_to_doc(c.b)}),
]


# ---------- glueing ----------
def _draw_glued(rng: SplitMix64) -> SumSpace:
    return gen_glued(rng, _size(rng, 3), _size(rng, 3))


def _tau_axioms(s: SumSpace) -> bool:
    N = s.total.n
    family = [d for d in range(1 << N) if closed_in_glueing(s, d)]
    members = set(family)
    if 0 not in members or s.total.full not in members:
        return False
    if any(a | b not in members or a & b not in members for a in family for b in family):
        return False
    return sorted(_closed(s.total)) == family


def _closure_formula(s: SumSpace) -> bool:
    for A in _closed(s.left):
        if s.total.closure(s.join(A, 0)) != s.join(A, s.f.apply(A)):
            return False
    for B in _closed(s.right):
        if s.total.closure(s.join(0, B)) != s.join(s.g.apply(B), B):
            return False
    return True


def _embedding(s: SumSpace) -> bool:
    return (subspace(s.total, s.left_mask).down == s.left.down
            and subspace(s.total, s.right_mask).down == s.right.down
            and is_continuous(s.embed_left) and is_continuous(s.embed_right))


def _round_trip(s: SumSpace) -> bool:
    pair = split_space(s.total, s.left_mask)
    if pair.f.gen != s.f.gen or pair.g.gen != s.g.gen:
        return False
    if is_open_set(s.total, s.left_mask):
        opened = decompose(s.total, s.left_mask)
        return opened.f.gen == s.f.gen and opened.g.gen == s.g.gen
    return True


def _density(s: SumSpace) -> bool:
    whole = s.total.full
    return (is_dense_left(s) == (s.total.closure(s.left_mask) == whole)
            and is_dense_right(s) == (s.total.closure(s.right_mask) == whole))


def _one_sided_right_closed(s: SumSpace) -> bool:
    return not s.g.is_empty() or s.total.is_closed(s.right_mask)


def _union_preserving(s: SumSpace) -> bool:
    closed = _closed(s.left)
    return s.f.apply(0) == 0 and all(s.f.apply(a | b) == s.f.apply(a) | s.f.apply(b) for a in closed for b in closed)


def _glueing_bundle(s: SumSpace) -> bool:
    return (_tau_axioms(s) and _closure_formula(s) and _embedding(s) and _round_trip(s) and _density(s)
            and _one_sided_right_closed(s))


@dataclass(frozen=True)
class TableCase:
    source: FiniteSpace
    target: FiniteSpace
    table: Tuple[Subset, ...]


def _draw_table_case(rng: SplitMix64) -> TableCase:
    X, Y = gen_space(rng, _size(rng, 4), "x"), gen_space(rng, _size(rng, 3), "y")
    table = gen_admissible(rng, X, Y).gen if rng.below(3) == 0 else gen_table(rng, X, Y)
    return TableCase(X, Y, tuple(table))


def _shrink_table_case(c: TableCase) -> Iterator[TableCase]:
    for keep in drop_one(c.source.n):
        yield TableCase(subspace(c.source, keep), c.target, tuple(c.table[i] for i in bits(keep)))
    for keep in drop_one(c.target.n):
        yield TableCase(c.source, subspace(c.target, keep), tuple(restrict_mask(t, keep) for t in c.table))


def _admissible_readback(c: TableCase) -> bool:
    X, table = c.source, c.table
    lawful = True
    for x in range(X.n):
        union = 0
        for z in bits(X.down[x]):
            union |= table[z]
        lawful = lawful and union == table[x]
    try:
        f = make_admissible(X, c.target, list(table))
    except AdmissibleError:
        return not lawful
    return lawful and all(f.apply(X.down[x]) == table[x] for x in range(X.n))


def _describe_table_case(c: TableCase) -> Dict[str, Any]:
    return {"source": space_to_doc(c.source), "target": space_to_doc(c.target),
            "table": {label_text(p): _labels_of(c.target, c.table[i]) for i, p in enumerate(c.source.points)}}


@dataclass(frozen=True)
class SplitCase:
    space: FiniteSpace
    xs: Subset


def _draw_split_case(rng: SplitMix64) -> SplitCase:
    Z = gen_space(rng, 2 + rng.below(4))
    xs = rng.subset(Z.n) | 1
    if xs == Z.full:
        xs &= ~(1 << (Z.n - 1))
    return SplitCase(Z, xs)


def _shrink_split_case(c: SplitCase) -> Iterator[SplitCase]:
    for keep in drop_one(c.space.n):
        xs = restrict_mask(c.xs, keep)
        if xs and xs != (1 << bin(keep).count("1")) - 1:
            yield SplitCase(subspace(c.space, keep), xs)


def _glue_of_split(c: SplitCase) -> bool:
    Z, xs = c.space, c.xs
    pair = split_space(Z, xs)
    total = glue(pair.f.source, pair.f.target, pair).total
    where = list(bits(xs)) + list(bits(Z.full & ~xs))
    return all(total.below(i, j) == Z.below(where[i], where[j]) for i in range(Z.n) for j in range(Z.n))


def _draw_discrete_glued(rng: SplitMix64) -> SumSpace:
    X = discrete_space(tuple(f"x{i}" for i in range(_size(rng, 3))))
    Y = discrete_space(tuple(f"y{i}" for i in range(_size(rng, 3))))
    f = gen_admissible(rng, X, Y) if rng.below(2) else make_admissible(X, Y, [0] * X.n)
    return glue_one_sided(X, Y, f)


def _hausdorff_agrees(s: SumSpace) -> bool:
    discrete = all(d == 1 << i for i, d in enumerate(s.total.down))
    return hausdorff_criterion(s.left, s.right, s.f) == discrete


def _glueing_law(law_id: str, holds, draw=_draw_glued) -> Law:
    return Law(law_id, "glueing", draw, holds, shrink_glued, sum_to_doc)


GLUEING_LAWS = [
    Law("glueing.admissible_readback", "glueing", _draw_table_case, _admissible_readback, _shrink_table_case,
        _describe_table_case),
    _glueing_law("glueing.tau_axioms", _tau_axioms),
    _glueing_law("glueing.closure_formula", _closure_formula),
    _glueing_law("glueing.embedding", _embedding),
    _glueing_law("glueing.round_trip", _round_trip),
    Law("glueing.round_trip_exhaustive", "glueing", _draw_glued, _round_trip, shrink_glued, sum_to_doc,
        enumerate=lambda: all_glued(EXHAUSTIVE_POINTS)),
    _glueing_law("glueing.density", _density),
    _glueing_law("glueing.right_closed", _one_sided_right_closed),
    _glueing_law("glueing.union_preserving", _union_preserving),
    _glueing_law("glueing.hausdorff", _hausdorff_agrees, _draw_discrete_glued),
    Law("glueing.hausdorff_exhaustive", "glueing", _draw_discrete_glued, _hausdorff_agrees, shrink_glued, sum_to_doc,
        enumerate=lambda: all_discrete_glued(EXHAUSTIVE_POINTS)),
    Law("glueing.glue_of_split", "glueing", _draw_split_case, _glue_of_split, _shrink_split_case,
        lambda c: {"space": space_to_doc(c.space), "left": _labels_of(c.space, c.xs)}),
    Law("glueing.exhaustive", "glueing", _draw_glued, _glueing_bundle, shrink_glued, sum_to_doc,
        enumerate=lambda: all_glued(BUNDLE_POINTS)),
]


# ---------- transport ----------
def _sum_map_doc(m: SumMap) -> Dict[str, Any]:
    return {"source": sum_to_doc(m.source), "target": sum_to_doc(m.target), "psi": _map_doc(m.psi), "phi": _map_doc(m.phi)}


def _continuity_criterion(m: SumMap) -> bool:
    t = total_map(m)
    oracle = all(m.source.total.is_closed(t.preimage(C)) for C in _closed(m.target.total))
    return diagram_continuity(m) == oracle


@dataclass(frozen=True)
class ChainCase:
    sigma: AdmissibleMap
    f: AdmissibleMap
    pi: AdmissibleMap


def _draw_chain(rng: SplitMix64) -> ChainCase:
    Y, X = gen_space(rng, _size(rng, 3), "y"), gen_space(rng, _size(rng, 3), "x")
    W, Z = gen_space(rng, _size(rng, 3), "w"), gen_space(rng, _size(rng, 3), "z")
    return ChainCase(gen_admissible(rng, W, Z), gen_admissible(rng, X, W), gen_admissible(rng, Y, X))


def _composes(c: ChainCase) -> bool:
    r = compose_through(c.sigma, c.f, c.pi)
    return all(r.apply(A) == c.sigma.apply(c.f.apply(c.pi.apply(A))) for A in _closed(c.pi.source))


@dataclass(frozen=True)
class TransportCase:
    """f: X -> W with point maps pi and varpi (their direction depends on the law); other is a competitor."""
    f: AdmissibleMap
    pi: SpaceMap
    varpi: SpaceMap
    other: Optional[AdmissibleMap] = None


def _describe_transport(c: TransportCase) -> Dict[str, Any]:
    out = {"f": _admissible_doc(c.f), "pi": _map_doc(c.pi), "varpi": _map_doc(c.varpi),
           "pi_domain": space_to_doc(c.pi.domain), "varpi_domain": space_to_doc(c.varpi.domain)}
    if c.other is not None:
        out["other"] = _admissible_doc(c.other)
    return out


def _base_f(rng: SplitMix64) -> AdmissibleMap:
    X, W = gen_space(rng, _size(rng, 3), "x"), gen_space(rng, _size(rng, 3), "w")
    return gen_admissible(rng, X, W)


def _draw_pull(rng: SplitMix64) -> TransportCase:
    f = _base_f(rng)
    Y, Z = gen_space(rng, _size(rng, 3), "y"), gen_space(rng, _size(rng, 3), "z")
    pi, varpi = gen_map(rng, Y, f.source), gen_map(rng, Z, f.target)
    return TransportCase(f, pi, varpi)


def _draw_push(rng: SplitMix64) -> TransportCase:
    f = _base_f(rng)
    Y, Z = gen_space(rng, _size(rng, 3), "y"), gen_space(rng, _size(rng, 3), "z")
    return TransportCase(f, gen_map(rng, f.source, Y), gen_map(rng, f.target, Z), gen_admissible(rng, Y, Z))


def _draw_push_closed(rng: SplitMix64) -> TransportCase:
    X, Z = gen_space(rng, _size(rng, 3), "x"), gen_space(rng, _size(rng, 3), "z")
    varpi = gen_closed_inclusion(rng, Z)
    Y = gen_space(rng, _size(rng, 3), "y")
    f = gen_admissible(rng, X, varpi.domain)
    return TransportCase(f, gen_map(rng, X, Y), varpi, gen_admissible(rng, Y, Z))


def _draw_pull_surjective(rng: SplitMix64) -> TransportCase:
    Y, Z = gen_space(rng, _size(rng, 4), "y"), gen_space(rng, _size(rng, 4), "z")
    X, pi = gen_quotient(rng, Y, "x")
    W, varpi = gen_quotient(rng, Z, "w")
    return TransportCase(gen_admissible(rng, X, W), pi, varpi)


def _pullback_continuous(c: TransportCase) -> bool:
    _, m = pullback_glueing(glue_one_sided(c.f.source, c.f.target, c.f), c.pi, c.varpi)
    return diagram_continuity(m) and is_continuous(total_map(m))


def _pullback_coarsest(c: TransportCase) -> bool:
    # pi+varpi out of Y +_{f'} Z is continuous exactly for the f' below f*
    s = glue_one_sided(c.f.source, c.f.target, c.f)
    pulled = pullback(c.f, c.pi, c.varpi)
    Y, Z = c.pi.domain, c.varpi.domain
    for other in all_admissible(Y, Z):
        m = SumMap(glue_one_sided(Y, Z, other), s, c.pi, c.varpi)
        if diagram_continuity(m) != admissible_leq(other, pulled):
            return False
    return True


def _spaces_upto(k: int, prefix: str) -> List[FiniteSpace]:
    return [S for n in range(1, k + 1) for S in all_spaces(n, prefix)]


def _all_pull_cases() -> Iterator[TransportCase]:
    sources, targets = _spaces_upto(PULLBACK_POINTS, "y"), _spaces_upto(PULLBACK_POINTS, "z")
    for X in _spaces_upto(PULLBACK_POINTS, "x"):
        for W in _spaces_upto(PULLBACK_POINTS, "w"):
            for f in all_admissible(X, W):
                for Y in sources:
                    for pi in all_continuous(Y, X):
                        for Z in targets:
                            for varpi in all_continuous(Z, W):
                                yield TransportCase(f, pi, varpi)


def _pushforward_continuous(c: TransportCase) -> bool:
    _, m = pushforward_glueing(glue_one_sided(c.f.source, c.f.target, c.f), c.pi, c.varpi)
    return diagram_continuity(m) and is_continuous(total_map(m))


def _pushforward_finest(c: TransportCase) -> bool:
    s = glue_one_sided(c.f.source, c.f.target, c.f)
    m = SumMap(s, glue_one_sided(c.pi.codomain, c.varpi.codomain, c.other), c.pi, c.varpi)
    return not diagram_continuity(m) or admissible_leq(pushforward(c.f, c.pi, c.varpi), c.other)


def _push_of_pull_exact(c: TransportCase) -> bool:
    return pushforward(pullback(c.f, c.pi, c.varpi), c.pi, c.varpi).gen == c.f.gen


def _push_of_pull_below(c: TransportCase) -> bool:
    return admissible_leq(pushforward(pullback(c.f, c.pi, c.varpi), c.pi, c.varpi), c.f)


def _pull_of_push_above(c: TransportCase) -> bool:
    return admissible_leq(c.f, pullback(pushforward(c.f, c.pi, c.varpi), c.pi, c.varpi))


def _complete_transfer(c: TransportCase) -> bool:
    # make f complete by adding the closure of one fixed point everywhere
    W = c.f.target
    f = AdmissibleMap(c.f.source, W, tuple(g | W.down[0] for g in c.f.gen))
    return all(pullback(f, c.pi, c.varpi).gen)


@dataclass(frozen=True)
class DoublePullCase:
    f: AdmissibleMap
    pi1: SpaceMap
    varpi1: SpaceMap
    pi2: SpaceMap
    varpi2: SpaceMap


def _draw_double_pull(rng: SplitMix64) -> DoublePullCase:
    f = _base_f(rng)
    Y, Z = gen_space(rng, _size(rng, 3), "y"), gen_space(rng, _size(rng, 3), "z")
    Y2, Z2 = gen_space(rng, _size(rng, 3), "u"), gen_space(rng, _size(rng, 3), "v")
    return DoublePullCase(f, gen_point_map(rng, Y, f.source), gen_point_map(rng, Z, f.target),
                          gen_point_map(rng, Y2, Y), gen_point_map(rng, Z2, Z))


def _double_pullback(c: DoublePullCase) -> bool:
    along_composite = pullback(c.f, compose_maps(c.pi1, c.pi2), compose_maps(c.varpi1, c.varpi2))
    stepwise = pullback(pullback(c.f, c.pi1, c.varpi1), c.pi2, c.varpi2)
    return admissible_leq(along_composite, stepwise)


@dataclass(frozen=True)
class CubeCase:
    f1: AdmissibleMap
    f2: AdmissibleMap
    pi1: AdmissibleMap
    pi2: AdmissibleMap
    sigma1: AdmissibleMap
    sigma2: AdmissibleMap
    mu: SpaceMap
    nu: SpaceMap
    psi: SpaceMap
    phi: SpaceMap


def _draw_cube(rng: SplitMix64) -> CubeCase:
    X2, W2 = gen_space(rng, _size(rng, 3), "x"), gen_space(rng, _size(rng, 3), "w")
    Y2, Z2 = gen_space(rng, _size(rng, 3), "y"), gen_space(rng, _size(rng, 3), "z")
    f2, pi2, sigma2 = gen_admissible(rng, X2, W2), gen_admissible(rng, Y2, X2), gen_admissible(rng, W2, Z2)
    X1, W1 = gen_space(rng, _size(rng, 3), "a"), gen_space(rng, _size(rng, 3), "b")
    Y1, Z1 = gen_space(rng, _size(rng, 3), "c"), gen_space(rng, _size(rng, 3), "d")
    mu, nu, psi, phi = gen_map(rng, X1, X2), gen_map(rng, W1, W2), gen_map(rng, Y1, Y2), gen_map(rng, Z1, Z2)
    f1 = pullback(f2, mu, nu)
    noise_pi, noise_sigma = gen_admissible(rng, Y1, X1), gen_admissible(rng, W1, Z1)
    pi1 = make_admissible(Y1, X1, [mu.preimage(pi2.apply(Y2.down[psi.table[y]])) & noise_pi.gen[y] for y in range(Y1.n)])
    sigma1 = make_admissible(W1, Z1, [phi.preimage(sigma2.apply(W2.down[nu.table[w]])) & noise_sigma.gen[w] for w in range(W1.n)])
    return CubeCase(f1, f2, pi1, pi2, sigma1, sigma2, mu, nu, psi, phi)


def _cube_lemma(c: CubeCase) -> bool:
    top = SumMap(glue_one_sided(c.mu.domain, c.nu.domain, c.f1), glue_one_sided(c.mu.codomain, c.nu.codomain, c.f2),
                 c.mu, c.nu)
    if not cube_premises(c.pi1, c.pi2, c.sigma1, c.sigma2, c.mu, c.nu, c.psi, c.phi) or not diagram_continuity(top):
        return False
    h1 = compose_through(c.sigma1, c.f1, c.pi1)
    h2 = compose_through(c.sigma2, c.f2, c.pi2)
    bottom = SumMap(glue_one_sided(c.psi.domain, c.phi.domain, h1), glue_one_sided(c.psi.codomain, c.phi.codomain, h2),
                    c.psi, c.phi)
    return diagram_continuity(bottom)


@dataclass(frozen=True)
class FunctorCase:
    pi: SpaceMap
    first: SumMap
    second: SumMap


def _draw_functor(rng: SplitMix64) -> FunctorCase:
    Y, Z = gen_space(rng, _size(rng, 3), "y"), gen_space(rng, _size(rng, 3), "z")
    f = gen_admissible(rng, Y, Z)
    W, w1 = gen_quotient(rng, Z, "w")
    g = pushforward(f, identity_map(Y), w1)
    V, w2 = gen_quotient(rng, W, "v")
    h = pushforward(g, identity_map(Y), w2)
    sf, sg, sh = glue_one_sided(Y, Z, f), glue_one_sided(Y, W, g), glue_one_sided(Y, V, h)
    X = gen_space(rng, _size(rng, 3), "x")
    return FunctorCase(gen_map(rng, X, Y), SumMap(sf, sg, identity_map(Y), w1), SumMap(sg, sh, identity_map(Y), w2))


def _functor_laws(c: FunctorCase) -> bool:
    source = c.first.source
    ident = pullback_functor(c.pi, identity_sum_map(source, source))
    if ident.source != ident.target or ident.phi.table != tuple(range(source.right.n)):
        return False
    p1, p2 = pullback_functor(c.pi, c.first), pullback_functor(c.pi, c.second)
    both = SumMap(c.first.source, c.second.target, c.first.psi, compose_maps(c.second.phi, c.first.phi))
    p12 = pullback_functor(c.pi, both)
    return (p1.target == p2.source and p12.source == p1.source and p12.target == p2.target
            and p12.phi.table == compose_maps(p2.phi, p1.phi).table
            and diagram_continuity(p1) and diagram_continuity(p2))


TRANSPORT_LAWS = [
    Law("transport.continuity_criterion", "transport", gen_sum_map, _continuity_criterion, describe=_sum_map_doc),
    Law("transport.compose_through", "transport", _draw_chain, _composes,
        describe=lambda c: {"sigma": _admissible_doc(c.sigma), "f": _admissible_doc(c.f), "pi": _admissible_doc(c.pi)}),
    Law("transport.pullback_continuous", "transport", _draw_pull, _pullback_continuous, describe=_describe_transport),
    Law("transport.pullback_coarsest", "transport", _draw_pull, _pullback_coarsest, describe=_describe_transport),
    Law("transport.pullback_coarsest_exhaustive", "transport", _draw_pull, _pullback_coarsest,
        describe=_describe_transport, enumerate=_all_pull_cases),
    Law("transport.pushforward_continuous", "transport", _draw_push, _pushforward_continuous, describe=_describe_transport),
    Law("transport.pushforward_finest", "transport", _draw_push_closed, _pushforward_finest, describe=_describe_transport),
    Law("transport.double_pullback", "transport", _draw_double_pull, _double_pullback,
        describe=lambda c: {"f": _admissible_doc(c.f)}),
    Law("transport.push_of_pull_surjective", "transport", _draw_pull_surjective, _push_of_pull_exact,
        describe=_describe_transport),
    Law("transport.push_of_pull", "transport", _draw_pull, _push_of_pull_below, describe=_describe_transport),
    Law("transport.pull_of_push", "transport", _draw_push, _pull_of_push_above, describe=_describe_transport),
    Law("transport.complete_transfer", "transport", _draw_pull_surjective, _complete_transfer, describe=_describe_transport),
    Law("transport.cube_lemma", "transport", _draw_cube, _cube_lemma,
        describe=lambda c: {"f1": _admissible_doc(c.f1), "f2": _admissible_doc(c.f2)}),
    Law("transport.pullback_functor", "transport", _draw_functor, _functor_laws,
        describe=lambda c: {"pi": _map_doc(c.pi), "first": _sum_map_doc(c.first), "second": _sum_map_doc(c.second)}),
]


# ---------- limits ----------
def _diagram_doc(d: SumDiagram) -> Dict[str, Any]:
    return {"base": space_to_doc(d.base), "objects": {c: sum_to_doc(o) for c, o in d.objects.items()},
            "arrows": {f"{a}->{b}": _map_doc(phi) for (a, b), phi in sorted(d.arrows.items())}}


def _draw_single(rng: SplitMix64) -> SumDiagram:
    return gen_free_diagram(rng, base_n=_size(rng, 2), objects=1)


def _draw_codirected(rng: SplitMix64) -> SumDiagram:
    return gen_codirected_diagram(rng, base_n=_size(rng, 2))


def _draw_any_diagram(rng: SplitMix64) -> SumDiagram:
    return _draw_codirected(rng) if rng.below(2) else gen_free_diagram(rng, base_n=_size(rng, 2), objects=1 + rng.below(3))


def _single_object(d: SumDiagram) -> bool:
    (name,) = d.names()
    return find_isomorphism(sum_limit(d).full, d.objects[name]) is not None


def _least_object_limit(d: SumDiagram) -> bool:
    least = least_object(d)
    return least is not None and find_isomorphism(sum_limit(d).full, d.objects[least]) is not None


def _projections_form_cone(d: SumDiagram) -> bool:
    return is_cone(d, sum_limit(d).projections)


def _families_match(d: SumDiagram) -> bool:
    names = d.names()
    pos = {c: k for k, c in enumerate(names)}
    brute = [fam for fam in cartesian(*(range(d.objects[c].right.n) for c in names))
             if all(phi.table[fam[pos[a]]] == fam[pos[b]] for (a, b), phi in d.arrows.items())]
    return list(sum_limit(d).families) == brute


def _cone_factors(d: SumDiagram) -> bool:
    least = least_object(d)
    apex = d.objects[least]
    cone = {c: d.arrow(least, c) if c != least else identity_sum_map(apex, apex) for c in d.names()}
    if not is_cone(d, cone):
        return False
    limit = sum_limit(d)
    m = mediating_map(limit, cone)
    return diagram_continuity(m) and all(
        compose_maps(limit.projections[c].phi, m.phi).table == cone[c].phi.table for c in cone)


def _every_cone_factors(d: SumDiagram) -> bool:
    """Each cone from an apex as small as the objects factors through the full limit by exactly one map."""
    limit = sum_limit(d)
    names = d.names()
    proj = {c: limit.projections[c].phi.table for c in names}
    for apex in all_one_sided(d.base, max(1, EXHAUSTIVE_POINTS - d.base.n), "v"):
        legs = {c: [m for m in (SumMap(apex, d.objects[c], identity_map(d.base), phi)
                                for phi in all_continuous(apex.right, d.objects[c].right))
                    if diagram_continuity(m)]
                for c in names}
        for choice in cartesian(*(legs[c] for c in names)):
            cone = dict(zip(names, choice))
            commutes = all(compose_maps(phi, cone[a].phi).table == cone[b].phi.table
                           for (a, b), phi in d.arrows.items())
            if is_cone(d, cone) != commutes:
                return False
            if not commutes:
                continue
            m = mediating_map(limit, cone)
            if not diagram_continuity(m):
                return False
            factoring = [t for t in cartesian(range(limit.full.right.n), repeat=apex.right.n)
                         if all(tuple(proj[c][i] for i in t) == cone[c].phi.table for c in names)]
            if factoring != [m.phi.table]:
                return False
    return True


def _draw_one_sided(rng: SplitMix64) -> SumSpace:
    X, Y = gen_space(rng, _size(rng, 3), "x"), gen_space(rng, _size(rng, 3), "y")
    return glue_one_sided(X, Y, gen_admissible(rng, X, Y))


def _terminal(s: SumSpace) -> bool:
    empty = sum_limit(make_diagram(s.left, {}, {}))
    return diagram_continuity(terminal_map(s)) and empty.full == terminal_object(s.left)


def _draw_system(rng: SplitMix64) -> InverseSystem:
    return gen_inverse_system(rng, stages=2 + rng.below(7), max_size=3)


def _plateau(s: InverseSystem, window: int) -> Optional[int]:
    for n in range(len(s.bonds) - window + 1):
        if all(s.bijective(k) for k in range(n, n + window)):
            return n
    return None


def _stabilization(s: InverseSystem) -> bool:
    seen: List[Optional[int]] = []
    for window in (1, 2, 3):
        found = detect_stabilization(s, window)
        if found != _plateau(s, window):
            return False
        seen.append(found)
    for short, long in zip(seen, seen[1:]):
        if long is not None and (short is None or short > long):
            return False
    sizes = [r.size for r in system_stages(s, len(s.stages))]
    return sizes == [len(stage) for stage in s.stages]


def _non_density_diagram() -> SumDiagram:
    X = discrete_space(("x1", "x2"))
    objects = {}
    for name, lo, hi in (("a", "a-", "a+"), ("b", "b-", "b+")):
        Y = discrete_space((lo, hi))
        objects[name] = glue_one_sided(X, Y, make_admissible(X, Y, [0b01, 0b10]))
    return make_diagram(X, objects, {})


def _non_density(d: SumDiagram) -> bool:
    limit = sum_limit(d)
    if limit.full.right.n != 4 or limit.dense is None:
        return False
    return set(limit.dense.right.points) == {("a-", "b-"), ("a+", "b+")}


def _limits_law(law_id: str, draw, holds) -> Law:
    return Law(law_id, "limits", draw, holds, describe=_diagram_doc)


LIMITS_LAWS = [
    _limits_law("limits.single_object", _draw_single, _single_object),
    _limits_law("limits.least_object", _draw_codirected, _least_object_limit),
    _limits_law("limits.projections_cone", _draw_any_diagram, _projections_form_cone),
    _limits_law("limits.matching_families", _draw_any_diagram, _families_match),
    Law("limits.matching_families_exhaustive", "limits", _draw_any_diagram, _families_match, describe=_diagram_doc,
        enumerate=lambda: all_diagrams(EXHAUSTIVE_POINTS)),
    _limits_law("limits.cone_factors", _draw_codirected, _cone_factors),
    Law("limits.cone_universal_exhaustive", "limits", _draw_any_diagram, _every_cone_factors, describe=_diagram_doc,
        enumerate=lambda: all_diagrams(EXHAUSTIVE_POINTS)),
    Law("limits.terminal", "limits", _draw_one_sided, _terminal, shrink_glued, sum_to_doc),
    Law("limits.stabilization", "limits", _draw_system, _stabilization,
        describe=lambda s: {"stages": [len(x) for x in s.stages], "bonds": [list(b) for b in s.bonds]}),
    Law("limits.non_density", "limits", lambda rng: _non_density_diagram(), _non_density, describe=_diagram_doc,
        enumerate=lambda: [_non_density_diagram()]),
]


# ---------- ends ----------
@dataclass(frozen=True)
class GraphCase:
    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    radius: int = 0
    horizon: int = 1

    def graph(self) -> LazyGraph:
        return finite_graph("sample", self.vertices, self.edges, 0)


def _draw_graph_case(rng: SplitMix64) -> GraphCase:
    vertices, edges = gen_finite_graph(rng, 2 + rng.below(7))
    horizon = 1 + rng.below(len(vertices) + 1)
    return GraphCase(vertices, edges, rng.below(horizon), horizon)


def _shrink_graph_case(c: GraphCase) -> Iterator[GraphCase]:
    for v in c.vertices[1:]:
        kept = tuple(u for u in c.vertices if u != v)
        yield GraphCase(kept, tuple(e for e in c.edges if v not in e), c.radius, c.horizon)


def _describe_graph_case(c: GraphCase) -> Dict[str, Any]:
    return {"vertices": list(c.vertices), "edges": [list(e) for e in c.edges], "basepoint": 0,
            "radius": c.radius, "horizon": c.horizon}


def _stage_partition(c: GraphCase) -> bool:
    g = c.graph()
    stage = stage_components(g, c.radius, c.horizon)
    dist = explore(g, c.horizon)
    outside = {v for v, d in dist.items() if d > c.radius}
    G = nx.Graph()
    G.add_nodes_from(outside)
    G.add_edges_from((u, v) for u, v in c.edges if u in outside and v in outside)
    expected = {frozenset(comp) for comp in nx.connected_components(G)}
    if {comp.members for comp in stage.components} != expected:
        return False
    return all(comp.id == min(comp.members) and comp.escapes == any(dist[v] == c.horizon for v in comp.members)
               for comp in stage.components)


def _beyond_diameter(c: GraphCase) -> bool:
    # no vertex sits at distance len(vertices) or more, so nothing can escape
    horizon = len(c.vertices) + 1
    return stage_components(c.graph(), min(c.radius, horizon - 1), horizon).escaping() == ()


@dataclass(frozen=True)
class BuiltinCase:
    spec: str
    radii: Tuple[int, ...]
    horizon: int


TREE_DEPTH = 7
_BOND_SPECS = ("line", "ray", "grid2", "tree2", "ladder", "star:2", "star:3", "star:5")


def _draw_radii(rng: SplitMix64) -> BuiltinCase:
    spec = _BOND_SPECS[rng.below(len(_BOND_SPECS))]
    horizon = 3 + rng.below(5)
    return BuiltinCase(spec, tuple(sorted(rng.below(horizon) for _ in range(3))), horizon)


def _describe_builtin(c: BuiltinCase) -> Dict[str, Any]:
    return {"graph": c.spec, "radii": list(c.radii), "horizon": c.horizon}


def _bond_functorial(c: BuiltinCase) -> bool:
    g = graph_from_spec(c.spec)
    s1, s2, s3 = (stage_components(g, r, c.horizon) for r in c.radii)
    b12, b23, b13 = bonding(s1, s2), bonding(s2, s3), bonding(s1, s3)
    return b13 == {u: b12[b23[u]] for u in b23}


def _all_radius_triples(top: int = 8) -> Iterator[BuiltinCase]:
    for spec in _BOND_SPECS:
        for a in range(top + 1):
            for b in range(a, top + 1):
                for c in range(b, top + 1):
                    yield BuiltinCase(spec, (a, b, c), top + 1)


def _bond_surjective(c: BuiltinCase) -> bool:
    g = graph_from_spec(c.spec)
    coarse, fine = (stage_components(g, r, c.horizon) for r in (c.radii[0], c.radii[2]))
    return set(bonding(coarse, fine).values()) == set(coarse.escaping_ids())


def _draw_tree_stage(rng: SplitMix64) -> BuiltinCase:
    n = rng.below(TREE_DEPTH + 1)
    return BuiltinCase("tree2", (n,), n + 1 + rng.below(3))


def _tree_growth(c: BuiltinCase) -> bool:
    (n,) = c.radii
    return len(stage_components(graph_from_spec("tree2"), n, c.horizon).escaping()) == 2 ** (n + 1)


def _tree_never_settles(c: BuiltinCase) -> bool:
    system = end_system(graph_from_spec(c.spec), c.radii, c.horizon)
    sizes = [len(stage) for stage in system.stages]
    return (all(a < b for a, b in zip(sizes, sizes[1:]))
            and all(detect_stabilization(system, w) is None for w in range(1, len(c.radii))))


_COUNT_SPECS = ("line", "ray", "ladder", "grid2", "star:1", "star:2", "star:3", "star:4", "star:5", "star:6")


def _draw_count(rng: SplitMix64) -> BuiltinCase:
    spec = _COUNT_SPECS[rng.below(len(_COUNT_SPECS))]
    # ladders only split once the rung at the basepoint is removed; grid annuli need width two
    depth = 1 + rng.below(4)
    return BuiltinCase(spec, (depth,), depth + 2 + rng.below(3))


def _builtin_count(c: BuiltinCase) -> bool:
    g = graph_from_spec(c.spec)
    result = end_count(g, c.radii[0], c.horizon)
    return result.count == g.exact_ends and result.certified


def _fixture_counts() -> List[BuiltinCase]:
    return [BuiltinCase(spec, (5,), 25) for spec in _COUNT_SPECS]


@dataclass(frozen=True)
class EndSetCase:
    spec: str
    radius: int
    horizon: int
    first: EndSetDescription
    second: EndSetDescription


def _draw_description(rng: SplitMix64, g: LazyGraph, horizon: int) -> EndSetDescription:
    ball = sorted(explore(g, horizon), key=vertex_key)
    vertices = frozenset(ball[rng.below(len(ball))] for _ in range(rng.below(3)))
    comps = set()
    for _ in range(rng.below(3)):
        r = rng.below(horizon)
        stage = stage_components(g, r, horizon)
        if stage.components:
            comps.add((r, stage.components[rng.below(len(stage.components))].id))
    return EndSetDescription(vertices, frozenset(comps))


def _draw_end_sets(rng: SplitMix64) -> EndSetCase:
    spec = ("line", "ray", "tree2", "star:3", "ladder")[rng.below(5)]
    g = graph_from_spec(spec)
    horizon = 3 + rng.below(4)
    return EndSetCase(spec, rng.below(horizon), horizon,
                      _draw_description(rng, g, horizon), _draw_description(rng, g, horizon))


def _describe_end_sets(c: EndSetCase) -> Dict[str, Any]:
    def _doc(F: EndSetDescription) -> Dict[str, Any]:
        return {"vertices": sorted(label_text(v) for v in F.vertices),
                "components": sorted([r, label_text(cid)] for r, cid in F.components)}
    return {"graph": c.spec, "radius": c.radius, "horizon": c.horizon, "first": _doc(c.first), "second": _doc(c.second)}


def _f_K_additive(c: EndSetCase) -> bool:
    g = graph_from_spec(c.spec)

    def _f(F: EndSetDescription):
        return f_K_eval(g, c.radius, F, c.horizon)
    explicit = EndSetDescription(c.first.vertices | c.second.vertices)
    return (_f(EndSetDescription()) == frozenset() and _f(explicit) == frozenset()
            and _f(c.first.union(c.second)) == _f(c.first) | _f(c.second))


def _stage_complete(c: BuiltinCase) -> bool:
    g = graph_from_spec(c.spec)
    r = c.radii[0]
    s = stage_space(g, r, c.horizon)
    ends = stage_components(g, r, c.horizon).escaping()
    if not ends:
        return s.f.is_empty()
    return all((s.f.apply(s.left.mask_of(U.members)) >> k) & 1 for k, U in enumerate(ends))


_MAPS = ("identity", "fold", "inclusion")


def _graph_map(kind: str) -> GraphMap:
    line, ray = graph_from_spec("line"), graph_from_spec("ray")
    if kind == "identity":
        return GraphMap(line, line, lambda v: v)
    if kind == "fold":
        return GraphMap(line, ray, abs)
    return GraphMap(ray, line, lambda v: v)


def _draw_natural(rng: SplitMix64) -> BuiltinCase:
    horizon = 4 + rng.below(6)
    a, b = rng.below(horizon), rng.below(horizon)
    return BuiltinCase(_MAPS[rng.below(len(_MAPS))], (min(a, b), max(a, b)), horizon)


def _natural(c: BuiltinCase) -> bool:
    return naturality_holds(_graph_map(c.spec), c.radii[0], c.radii[1], c.horizon)


def _ends_law(law_id: str, draw, holds, describe=_describe_builtin) -> Law:
    return Law(law_id, "ends", draw, holds, describe=describe)


ENDS_LAWS = [
    Law("ends.partition", "ends", _draw_graph_case, _stage_partition, _shrink_graph_case, _describe_graph_case),
    Law("ends.finite_graph_no_ends", "ends", _draw_graph_case, _beyond_diameter, _shrink_graph_case, _describe_graph_case),
    _ends_law("ends.bond_functoriality", _draw_radii, _bond_functorial),
    Law("ends.bond_functoriality_exhaustive", "ends", _draw_radii, _bond_functorial, describe=_describe_builtin,
        enumerate=_all_radius_triples),
    _ends_law("ends.bond_surjective", _draw_radii, _bond_surjective),
    _ends_law("ends.tree_growth", _draw_tree_stage, _tree_growth),
    Law("ends.tree_growth_exhaustive", "ends", _draw_tree_stage, _tree_growth, describe=_describe_builtin,
        enumerate=lambda: [BuiltinCase("tree2", (n,), n + 1) for n in range(TREE_DEPTH + 1)]),
    Law("ends.tree_never_settles", "ends", _draw_tree_stage, _tree_never_settles, describe=_describe_builtin,
        enumerate=lambda: [BuiltinCase("tree2", tuple(range(TREE_DEPTH + 1)), TREE_DEPTH + 2)]),
    _ends_law("ends.builtin_counts", _draw_count, _builtin_count),
    Law("ends.fixture_counts", "ends", _draw_count, _builtin_count, describe=_describe_builtin,
        enumerate=_fixture_counts),
    _ends_law("ends.f_K_additivity", _draw_end_sets, _f_K_additive, _describe_end_sets),
    _ends_law("ends.stage_completeness", _draw_radii, _stage_complete),
    _ends_law("ends.naturality", _draw_natural, _natural),
]


# ---------- coarse ----------
@dataclass(frozen=True)
class CoarseCase:
    cs: CoarseStructure
    e1: int = 0
    e2: int = 0
    a: int = 0
    b: int = 0
    c: int = 0


def _describe_coarse(c: CoarseCase) -> Dict[str, Any]:
    n = c.cs.n

    def _pairs(rel: int) -> List[List[str]]:
        return [[label_text(c.cs.ground[k // n]), label_text(c.cs.ground[k % n])] for k in bits(rel)]

    def _set(mask: int) -> List[str]:
        return [label_text(c.cs.ground[i]) for i in bits(mask)]
    return {"structure": structure_report(c.cs), "generators": [_pairs(g) for g in c.cs.generators],
            "e1": _pairs(c.e1), "e2": _pairs(c.e2), "a": _set(c.a), "b": _set(c.b), "c": _set(c.c)}


def _draw_coarse(rng: SplitMix64) -> CoarseCase:
    n = _size(rng, 5)
    cs = gen_structure(rng, n)

    def pick() -> int:
        return cs.maxima[rng.below(len(cs.maxima))] & gen_relation(rng, n, 1, 2)
    return CoarseCase(cs, pick(), pick(), rng.subset(n), rng.subset(n), rng.subset(n))


def _axioms(c: CoarseCase) -> bool:
    cs, n = c.cs, c.cs.n
    members = (diagonal(n), c.e1, c.e2, c.e1 | c.e2, inverse(c.e1, n), compose(c.e1, c.e2, n), c.e1 & c.e2)
    return all(_controlled(cs, e) for e in members)


def _preorder(c: CoarseCase) -> bool:
    cs, a, b, d = c.cs, c.a, c.b, c.c
    if not preceq(cs, a, a) or not preceq(cs, a & b, b):
        return False
    if preceq(cs, a, b) and preceq(cs, b, d) and not preceq(cs, a, d):
        return False
    return sim(cs, a, b) == sim(cs, b, a)


@dataclass(frozen=True)
class CoarseMapCase:
    f: CoarseMap
    a: int
    b: int


def _draw_coarse_map(rng: SplitMix64) -> CoarseMapCase:
    if rng.below(2):
        ground, table, zeta = gen_block_structure(rng, _size(rng, 6), _size(rng, 3))
        f = CoarseMap(pullback_coarse(ground, table, zeta), zeta, table)
    else:
        source, target = gen_structure(rng, _size(rng, 4), "s"), gen_structure(rng, _size(rng, 4), "t")
        f = CoarseMap(source, target, tuple(rng.below(target.n) for _ in range(source.n)))
    return CoarseMapCase(f, rng.subset(f.source.n), rng.subset(f.source.n))


def _image_monotone(c: CoarseMapCase) -> bool:
    f = c.f
    if not is_coarse_map(f) or not preceq(f.source, c.a, c.b):
        return True
    return preceq(f.target, f.image(c.a), f.image(c.b))


@dataclass(frozen=True)
class BlockCase:
    ground: Tuple[str, ...]
    table: Tuple[int, ...]
    zeta: CoarseStructure
    a: int


def _draw_block(rng: SplitMix64) -> BlockCase:
    ground, table, zeta = gen_block_structure(rng, _size(rng, 7), _size(rng, 3))
    return BlockCase(ground, table, zeta, rng.subset(len(ground)))


def _coproduct(c: BlockCase) -> bool:
    eps = pullback_coarse(c.ground, c.table, c.zeta)
    pi = CoarseMap(eps, c.zeta, c.table)
    if not is_coarse_map(pi):
        return False
    for section in sections(c.table, c.zeta.n):
        iota = CoarseMap(c.zeta, eps, section)
        if not is_coarse_map(iota) or not is_quasi_inverse(pi, iota):
            return False
    if is_connected(c.zeta) and not is_connected(eps):
        return False
    return is_bounded(eps, c.a) == is_bounded(c.zeta, pi.image(c.a))


def _draw_small_structure(rng: SplitMix64) -> CoarseCase:
    return CoarseCase(gen_structure(rng, _size(rng, 3)))


def _generative_agrees(c: CoarseCase) -> bool:
    cs = c.cs
    family = generative_family(cs)
    return all(_controlled(cs, e) == any(not (e & ~s) for s in family) for e in range(1 << (cs.n * cs.n)))


def _classes(c: CoarseCase) -> bool:
    cs = c.cs
    classes = bounded_classes(cs)
    union = 0
    for k, cls in enumerate(classes):
        if cls & union or not is_bounded(cs, cls):
            return False
        union |= cls
        if any(is_bounded(cs, cls | other) for other in classes[k + 1:]):
            return False
    return union == (1 << cs.n) - 1 and all(is_bounded(cs, 1 << i) for i in range(cs.n))


def _coarse_law(law_id: str, draw, holds, describe=_describe_coarse) -> Law:
    return Law(law_id, "coarse", draw, holds, describe=describe)


COARSE_LAWS = [
    _coarse_law("coarse.axioms", _draw_coarse, _axioms),
    _coarse_law("coarse.preceq_preorder", _draw_coarse, _preorder),
    _coarse_law("coarse.image_monotone", _draw_coarse_map, _image_monotone,
                lambda c: {"source": structure_report(c.f.source), "target": structure_report(c.f.target),
                           "table": list(c.f.table), "a": list(bits(c.a)), "b": list(bits(c.b))}),
    _coarse_law("coarse.coproduct", _draw_block, _coproduct,
                lambda c: {"ground": list(c.ground), "table": list(c.table), "base": structure_report(c.zeta)}),
    _coarse_law("coarse.generative_oracle", _draw_small_structure, _generative_agrees),
    _coarse_law("coarse.bounded_classes", _draw_coarse, _classes),
]


# ---------- registry ----------
REGISTRY: Dict[str, List[Law]] = {
    "space": SPACE_LAWS,
    "glueing": GLUEING_LAWS,
    "transport": TRANSPORT_LAWS,
    "limits": LIMITS_LAWS,
    "ends": ENDS_LAWS,
    "coarse": COARSE_LAWS,
}


def suite_laws(suite: str) -> List[Law]:
    if suite == "all":
        return [law for name in SUITES for law in REGISTRY[name]]
    if suite not in REGISTRY:
        raise UnknownSuite(f"unknown suite {suite!r}", {"known": list(SUITES) + ["all"]})
    return list(REGISTRY[suite])


def find_law(law_id: str) -> Law:
    for name in SUITES:
        for law in REGISTRY[name]:
            if law.law_id == law_id:
                return law
    raise UnknownSuite(f"unknown law {law_id!r}")
