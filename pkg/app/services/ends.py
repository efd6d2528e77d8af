# services/ends.py
# End spaces of locally finite graphs, approximated through the inverse
# system of escaping complement components of metric balls.

from __future__ import annotations
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple
import json, logging

from services.errors import PreconditionError, PresentationError, ProperMapError, InvariantViolation
from services.glueing import AdmissibleMap, SumSpace, glue_one_sided
from services.limits import STABILIZATION_WINDOW, InverseSystem
from services.spaces import discrete_space, label_text

Vertex = Hashable
END_TAG = "end:"


@dataclass(frozen=True)
class LazyGraph:
    name: str
    basepoint: Vertex
    neighbors: Callable[[Vertex], Sequence[Vertex]]
    exact_ends: Optional[int] = None


def vertex_key(v: Vertex):
    """Canonical order: ints, then strings, then tuples (elementwise)."""
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    if isinstance(v, tuple):
        return (2, tuple(vertex_key(x) for x in v))
    return (3, repr(v))


# ---------- built-in graphs ----------
def line_graph() -> LazyGraph:
    return LazyGraph("line", 0, lambda v: (v - 1, v + 1), exact_ends=2)


def ray_graph() -> LazyGraph:
    return LazyGraph("ray", 0, lambda v: (v + 1,) if v == 0 else (v - 1, v + 1), exact_ends=1)


def grid2_graph() -> LazyGraph:
    return LazyGraph("grid2", (0, 0),
                     lambda v: ((v[0] - 1, v[1]), (v[0] + 1, v[1]), (v[0], v[1] - 1), (v[0], v[1] + 1)),
                     exact_ends=1)


def tree2_graph() -> LazyGraph:
    def _nb(v: Tuple[int, ...]):
        kids = (v + (0,), v + (1,))
        return kids if not v else (v[:-1],) + kids
    return LazyGraph("tree2", (), _nb, exact_ends=None)


def star_graph(k: int) -> LazyGraph:
    if k < 1:
        raise PreconditionError("a star needs at least one ray")

    def _nb(v: Tuple[int, int]):
        ray, d = v
        if d == 0:
            return tuple((i, 1) for i in range(1, k + 1))
        return ((0, 0) if d == 1 else (ray, d - 1), (ray, d + 1))
    return LazyGraph(f"star:{k}", (0, 0), _nb, exact_ends=k)


def ladder_graph() -> LazyGraph:
    return LazyGraph("ladder", (0, 0),
                     lambda v: ((v[0] - 1, v[1]), (v[0] + 1, v[1]), (v[0], 1 - v[1])),
                     exact_ends=2)


def finite_graph(name: str, vertices: Iterable[Vertex], edges: Iterable[Tuple[Vertex, Vertex]],
                 basepoint: Optional[Vertex] = None) -> LazyGraph:
    adj: Dict[Vertex, List[Vertex]] = {v: [] for v in vertices}
    if not adj:
        raise PreconditionError("a graph needs at least one vertex")
    for u, v in edges:
        if u not in adj or v not in adj:
            raise PresentationError(f"edge ({label_text(u)},{label_text(v)}) names an unknown vertex")
        if v not in adj[u]:
            adj[u].append(v)
        if u not in adj[v]:
            adj[v].append(u)
    frozen = {v: tuple(sorted(ns, key=vertex_key)) for v, ns in adj.items()}
    base = basepoint if basepoint is not None else min(frozen, key=vertex_key)
    if base not in frozen:
        raise PresentationError(f"basepoint {label_text(base)} is not a vertex")

    def _nb(v: Vertex):
        try:
            return frozen[v]
        except KeyError:
            raise PresentationError(f"vertex {label_text(v)} is not part of {name}")
    return LazyGraph(name, base, _nb, exact_ends=0)


BUILTINS: Dict[str, Callable[[], LazyGraph]] = {
    "line": line_graph,
    "ray": ray_graph,
    "grid2": grid2_graph,
    "tree2": tree2_graph,
    "ladder": ladder_graph,
}


def graph_from_spec(spec: str) -> LazyGraph:
    """'line', 'ray', 'grid2', 'tree2', 'ladder', 'star:k' or 'file:<path>'."""
    if spec.startswith("file:"):
        from services.codec import load_graph_doc
        path = spec.split(":", 1)[1]
        doc = load_graph_doc(path)
        return finite_graph(path, doc.vertex_list(), doc.edge_list(), doc.base())
    return _builtin_graph(spec)


@lru_cache(maxsize=64)
def _builtin_graph(spec: str) -> LazyGraph:
    # one instance per spec string: explore() caches on the graph object
    if spec in BUILTINS:
        return BUILTINS[spec]()
    if spec.startswith("star:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise PreconditionError(f"bad star spec {spec!r}")
        return star_graph(k)
    raise PreconditionError(f"unknown graph spec {spec!r}", {"known": sorted(BUILTINS) + ["star:k", "file:<path>"]})


# ---------- exploration ----------
class UnionFind:
    """Union-find over 0..size-1 with path compression."""

    def __init__(self, size: int):
        self.parents = list(range(size))

    def find(self, elem: int) -> int:
        p = elem
        while p != self.parents[p]:
            p = self.parents[p]
        while elem != p:
            self.parents[elem], elem = p, self.parents[elem]
        return p

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parents[rb] = ra

    def groups(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i in range(len(self.parents)):
            out.setdefault(self.find(i), []).append(i)
        return out


@lru_cache(maxsize=64)
def explore(g: LazyGraph, horizon: int) -> Dict[Vertex, int]:
    """Breadth-first distances from the basepoint up to horizon (returned dict is shared; do not mutate)."""
    dist = {g.basepoint: 0}
    queue = deque([g.basepoint])
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if v not in g.neighbors(u):
                raise PresentationError(
                    f"neighbor function of {g.name} is not symmetric: {label_text(u)} lists no edge back to {label_text(v)}",
                    {"vertices": [label_text(v), label_text(u)]},
                )
            if u not in dist and dist[v] < horizon:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


@dataclass(frozen=True)
class Component:
    id: Vertex
    members: FrozenSet[Vertex]
    escapes: bool


@dataclass(frozen=True)
class ComponentStage:
    graph: str
    radius: Optional[int]
    horizon: int
    removed: FrozenSet[Vertex]
    components: Tuple[Component, ...]

    def escaping(self) -> Tuple[Component, ...]:
        return tuple(c for c in self.components if c.escapes)

    def escaping_ids(self) -> Tuple[Vertex, ...]:
        return tuple(c.id for c in self.components if c.escapes)

    def component_of(self, v: Vertex) -> Optional[Component]:
        for c in self.components:
            if v in c.members:
                return c
        return None

    def by_id(self, cid: Vertex) -> Optional[Component]:
        for c in self.components:
            if c.id == cid:
                return c
        return None


def _escapes(members: FrozenSet[Vertex], dist: Mapping[Vertex, int], horizon: int) -> bool:
    return any(dist[v] == horizon for v in members)


def _components_outside(g: LazyGraph, dist: Mapping[Vertex, int], removed: FrozenSet[Vertex],
                        horizon: int, radius: Optional[int]) -> ComponentStage:
    verts = sorted((v for v in dist if v not in removed), key=vertex_key)
    where = {v: i for i, v in enumerate(verts)}
    uf = UnionFind(len(verts))
    for v in verts:
        for u in g.neighbors(v):
            if u in where:
                uf.union(where[v], where[u])
    comps = []
    for idxs in uf.groups().values():
        members = frozenset(verts[i] for i in idxs)
        comps.append(Component(verts[min(idxs)], members, _escapes(members, dist, horizon)))
    comps.sort(key=lambda c: vertex_key(c.id))
    return ComponentStage(g.name, radius, horizon, removed, tuple(comps))


def stage_components(g: LazyGraph, n: int, horizon: int) -> ComponentStage:
    if not 0 <= n < horizon:
        raise PreconditionError("stage needs 0 <= radius < horizon", {"radius": n, "horizon": horizon})
    dist = explore(g, horizon)
    removed = frozenset(v for v, d in dist.items() if d <= n)
    stage = _components_outside(g, dist, removed, horizon, n)
    logging.debug(json.dumps({"event": "ends.stage", "graph": g.name, "radius": n, "horizon": horizon,
                              "components": len(stage.components), "escaping": len(stage.escaping())}))
    return stage


def bonding(coarse: ComponentStage, fine: ComponentStage) -> Dict[Vertex, Vertex]:
    """Send each escaping fine component to the escaping coarse component containing it."""
    if coarse.graph != fine.graph or coarse.horizon != fine.horizon:
        raise PreconditionError("bonding needs stages of one graph at one horizon")
    if not coarse.removed <= fine.removed:
        raise PreconditionError("the fine stage must remove at least what the coarse stage removes")
    out: Dict[Vertex, Vertex] = {}
    for comp in fine.escaping():
        host = coarse.component_of(next(iter(comp.members)))
        if host is None or not comp.members <= host.members:
            raise InvariantViolation(f"component {label_text(comp.id)} is not contained in a coarse component",
                                     {"component": label_text(comp.id)})
        if not host.escapes:
            raise InvariantViolation(f"escaping component {label_text(comp.id)} sits in a non-escaping one",
                                     {"component": label_text(comp.id)})
        out[comp.id] = host.id
    return out


# ---------- inverse system of stages ----------
@dataclass(frozen=True)
class EndApproximation:
    stages: Tuple[ComponentStage, ...]
    bonds: Tuple[Dict[Vertex, Vertex], ...]  # bonds[k]: stage k+1 -> stage k

    def system(self) -> InverseSystem:
        ids = [s.escaping_ids() for s in self.stages]
        tables = []
        for k, bond in enumerate(self.bonds):
            where = {cid: i for i, cid in enumerate(ids[k])}
            tables.append(tuple(where[bond[cid]] for cid in ids[k + 1]))
        return InverseSystem(tuple(ids), tuple(tables))


def end_approximation(g: LazyGraph, radii: Sequence[int], horizon: int) -> EndApproximation:
    radii = sorted(set(radii))
    stages = tuple(stage_components(g, r, horizon) for r in radii)
    bonds = tuple(bonding(stages[k], stages[k + 1]) for k in range(len(stages) - 1))
    return EndApproximation(stages, bonds)


def end_system(g: LazyGraph, radii: Sequence[int], horizon: int) -> InverseSystem:
    return end_approximation(g, radii, horizon).system()


@dataclass(frozen=True)
class EndCount:
    graph: str
    depth: int
    horizon: int
    count: int
    certified: bool
    stage_sizes: Tuple[int, ...]

    def line(self) -> str:
        return f"ends: {self.count} ({'certified' if self.certified else 'uncertified'})"


def end_count(g: LazyGraph, depth: int, horizon: int, window: int = STABILIZATION_WINDOW) -> EndCount:
    if not horizon > depth >= 0:
        raise PreconditionError("end_count needs horizon > depth >= 0")
    approx = end_approximation(g, range(max(0, depth - window), depth + 1), horizon)
    sizes = tuple(len(s.escaping()) for s in approx.stages)
    count = sizes[-1]
    system = approx.system()
    stable = len(system.bonds) >= window and all(system.bijective(k) for k in range(len(system.bonds) - window, len(system.bonds)))
    certified = stable or (g.exact_ends is not None and g.exact_ends == count)
    return EndCount(g.name, depth, horizon, count, certified, sizes)


# ---------- f_K ----------
@dataclass(frozen=True)
class EndSetDescription:
    """A finite explicit vertex set plus stage components named by (radius, component id)."""
    vertices: FrozenSet[Vertex] = frozenset()
    components: FrozenSet[Tuple[int, Vertex]] = frozenset()

    def union(self, other: "EndSetDescription") -> "EndSetDescription":
        return EndSetDescription(self.vertices | other.vertices, self.components | other.components)


def _described_mass(g: LazyGraph, F: EndSetDescription, horizon: int) -> FrozenSet[Vertex]:
    mass = set()
    for radius, cid in sorted(F.components, key=lambda rc: (rc[0], vertex_key(rc[1]))):
        comp = stage_components(g, radius, horizon).by_id(cid)
        if comp is None:
            raise PreconditionError(f"no component {label_text(cid)} at radius {radius}",
                                    {"radius": radius, "component": label_text(cid)})
        mass |= comp.members
    return frozenset(mass)


def f_K_eval(g: LazyGraph, n: int, F: EndSetDescription, horizon: int) -> FrozenSet[Vertex]:
    """Escaping components U at radius n whose trace U ∩ F still reaches the horizon.

    Explicit vertices are bounded and never contribute.
    """
    stage = stage_components(g, n, horizon)
    dist = explore(g, horizon)
    mass = _described_mass(g, F, horizon)
    return frozenset(U.id for U in stage.escaping() if _escapes(U.members & mass, dist, horizon))


def stage_space(g: LazyGraph, n: int, horizon: int) -> SumSpace:
    """Discrete ball B_N glued to the escaping ids; horizon vertices stand for their unexplored tails."""
    stage = stage_components(g, n, horizon)
    dist = explore(g, horizon)
    ball = sorted(dist, key=vertex_key)
    ends = stage.escaping()
    X = discrete_space(tuple(ball))
    if not ends:
        # nothing escapes: the model is the ball with a single detached marker point
        Y = discrete_space((END_TAG + "none",))
        return glue_one_sided(X, Y, AdmissibleMap(X, Y, tuple(0 for _ in ball)))
    Y = discrete_space(tuple(END_TAG + label_text(U.id) for U in ends))
    gen = []
    for v in ball:
        m = 0
        if dist[v] == horizon:
            for k, U in enumerate(ends):
                if v in U.members:
                    m |= 1 << k
        gen.append(m)
    return glue_one_sided(X, Y, AdmissibleMap(X, Y, tuple(gen)))


# ---------- proper maps ----------
@dataclass(frozen=True)
class GraphMap:
    source: LazyGraph
    target: LazyGraph
    image: Callable[[Vertex], Vertex]


@dataclass(frozen=True)
class ExtendedMap:
    source_stage: ComponentStage
    target_stage: ComponentStage
    table: Dict[Vertex, Vertex]


def extend_proper_map(j: GraphMap, n: int, horizon: int) -> ExtendedMap:
    """j_K on escaping components of source − j⁻¹(B_n), evaluated within the horizon."""
    target = stage_components(j.target, n, horizon)
    src_dist = explore(j.source, horizon)
    pre = frozenset(v for v in src_dist if j.image(v) in target.removed)
    late = sorted((v for v in pre if src_dist[v] >= horizon), key=vertex_key)
    if late:
        raise ProperMapError(f"preimage of the radius-{n} ball reaches the horizon at {label_text(late[0])}",
                             {"vertex": label_text(late[0])})
    source = _components_outside(j.source, src_dist, pre, horizon, None)
    table: Dict[Vertex, Vertex] = {}
    for U in source.escaping():
        hits = {c.id for c in (target.component_of(j.image(v)) for v in U.members) if c is not None}
        if len(hits) != 1:
            raise PresentationError(f"image of component {label_text(U.id)} meets {len(hits)} target components",
                                    {"component": label_text(U.id), "hits": sorted(label_text(h) for h in hits)})
        hit = target.by_id(next(iter(hits)))
        if not hit.escapes:
            raise PresentationError(f"image of component {label_text(U.id)} lands in a bounded component",
                                    {"component": label_text(U.id)})
        table[U.id] = hit.id
    return ExtendedMap(source, target, table)


def naturality_holds(j: GraphMap, n1: int, n2: int, horizon: int) -> bool:
    """j_{n1} ∘ bond_source == bond_target ∘ j_{n2}."""
    small, big = extend_proper_map(j, n1, horizon), extend_proper_map(j, n2, horizon)
    down_source = bonding(small.source_stage, big.source_stage)
    down_target = bonding(small.target_stage, big.target_stage)
    return all(small.table[down_source[u]] == down_target[big.table[u]] for u in big.table)


# ---------- DOT export ----------
def components_dot(approx: EndApproximation) -> str:
    lines = ["digraph ends {", "  rankdir=TB;"]

    def _node(k: int, cid: Vertex) -> str:
        return json.dumps(f"s{k}:{label_text(cid)}")

    for k, stage in enumerate(approx.stages):
        lines.append(f"  subgraph stage_{k} {{")
        lines.append("    rank=same;")
        for cid in stage.escaping_ids():
            lines.append(f"    {_node(k, cid)} [label={json.dumps(label_text(cid))}];")
        lines.append("  }")
    for k, bond in enumerate(approx.bonds):
        for fine, coarse in sorted(bond.items(), key=lambda kv: vertex_key(kv[0])):
            lines.append(f"  {_node(k + 1, fine)} -> {_node(k, coarse)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
