# services/coarse.py
# Finitely generated coarse structures on finite ground sets.
# Relations are int bitmasks: bit i*n + j <-> (ground[i], ground[j]).

from __future__ import annotations
from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple
import json, logging, os

from services.errors import InvariantViolation, NotCoarseError, PreconditionError, SaturationOverflow, SpaceMismatch
from services.spaces import bits, label_text

SATURATION_CAP = int(os.getenv("GLUE_SATURATION_CAP", "10000"))
COARSE_SUBSET_CAP = int(os.getenv("GLUE_COARSE_SUBSET_CAP", "8"))
SECTION_CAP = 4096


# ---------- relation arithmetic ----------
def diagonal(n: int) -> int:
    return sum(1 << (i * n + i) for i in range(n))


def full_relation(n: int) -> int:
    return (1 << (n * n)) - 1


def square(a: int, n: int) -> int:
    out = 0
    for i in bits(a):
        out |= a << (i * n)
    return out


def row(rel: int, i: int, n: int) -> int:
    return (rel >> (i * n)) & ((1 << n) - 1)


def inverse(rel: int, n: int) -> int:
    out = 0
    for k in bits(rel):
        i, j = divmod(k, n)
        out |= 1 << (j * n + i)
    return out


def compose(a: int, b: int, n: int) -> int:
    """{(x, z) : (x, y) in a and (y, z) in b}."""
    out = 0
    for x in range(n):
        r = 0
        for y in bits(row(a, x, n)):
            r |= row(b, y, n)
        out |= r << (x * n)
    return out


def neighbourhood(b: int, rel: int, n: int) -> int:
    """Points x with (x, y) in rel for some y in b."""
    return sum(1 << x for x in range(n) if row(rel, x, n) & b)


@dataclass(frozen=True)
class Relation:
    ground: Tuple[Hashable, ...]
    pairs: int

    @classmethod
    def of(cls, ground: Sequence[Hashable], pairs: Iterable[Tuple[Hashable, Hashable]]) -> "Relation":
        where = {p: i for i, p in enumerate(ground)}
        n = len(ground)
        mask = 0
        for a, b in pairs:
            if a not in where or b not in where:
                raise PreconditionError(f"pair ({label_text(a)},{label_text(b)}) leaves the ground set")
            mask |= 1 << (where[a] * n + where[b])
        return cls(tuple(ground), mask)

    def pair_list(self) -> List[Tuple[Hashable, Hashable]]:
        n = len(self.ground)
        return [(self.ground[k // n], self.ground[k % n]) for k in bits(self.pairs)]


# ---------- structures ----------
@dataclass(frozen=True)
class CoarseStructure:
    ground: Tuple[Hashable, ...]
    generators: Tuple[int, ...]
    maxima: Tuple[int, ...]
    index: Dict[Hashable, int] = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {p: i for i, p in enumerate(self.ground)})

    @property
    def n(self) -> int:
        return len(self.ground)

    def mask_of(self, labels: Iterable[Hashable]) -> int:
        m = 0
        for p in labels:
            if p not in self.index:
                raise PreconditionError(f"unknown ground point {label_text(p)}")
            m |= 1 << self.index[p]
        return m

    def relation(self, pairs: Iterable[Tuple[Hashable, Hashable]]) -> Relation:
        return Relation.of(self.ground, pairs)


def saturate(n: int, generators: Sequence[int]) -> Tuple[int, ...]:
    """Maximal elements of the ∪/∘/⁻¹ closure of generators and the diagonal."""
    antichain: List[int] = []
    work = deque(list(generators) + [diagonal(n)])
    insertions = 0
    while work:
        e = work.popleft()
        if any(not (e & ~s) for s in antichain):
            continue
        antichain = [s for s in antichain if s & ~e]
        antichain.append(e)
        insertions += 1
        if insertions > SATURATION_CAP:
            raise SaturationOverflow(f"saturation overflow after {SATURATION_CAP} insertions", {"ground": n})
        for s in antichain:
            work.extend((e | s, compose(e, s, n), compose(s, e, n)))
        work.append(inverse(e, n))
    return tuple(sorted(antichain))


def build_structure(ground: Sequence[Hashable], generators: Iterable[Iterable[Tuple[Hashable, Hashable]]]) -> CoarseStructure:
    ground = tuple(ground)
    if len(set(ground)) != len(ground):
        raise PreconditionError("ground points must be distinct")
    gens = tuple(Relation.of(ground, g).pairs for g in generators)
    return from_masks(ground, gens)


def from_masks(ground: Tuple[Hashable, ...], gens: Tuple[int, ...]) -> CoarseStructure:
    maxima = saturate(len(ground), gens)
    logging.debug(json.dumps({"event": "coarse.saturated", "ground": len(ground), "generators": len(gens),
                              "maxima": len(maxima)}))
    return CoarseStructure(ground, gens, maxima)


def trivial_structure(ground: Sequence[Hashable]) -> CoarseStructure:
    return build_structure(ground, [])


def full_structure(ground: Sequence[Hashable]) -> CoarseStructure:
    ground = tuple(ground)
    return from_masks(ground, (full_relation(len(ground)),))


def metric_structure(points: Sequence[Hashable], distance: Callable[[Hashable, Hashable], float],
                     radii: Iterable[float]) -> CoarseStructure:
    """Bounded coarse structure generated by the pairs at distance <= r for each radius r."""
    points = tuple(points)
    gens = [[(a, b) for a in points for b in points if distance(a, b) <= r] for r in radii]
    return build_structure(points, gens)


# public:
def controlled(cs: CoarseStructure, e: Relation) -> bool:
    if e.ground != cs.ground:
        raise SpaceMismatch("relation lives on a different ground set")
    return _controlled(cs, e.pairs)


def _controlled(cs: CoarseStructure, rel: int) -> bool:
    return any(not (rel & ~s) for s in cs.maxima)


def is_bounded(cs: CoarseStructure, a: int) -> bool:
    return _controlled(cs, square(a, cs.n))


def preceq(cs: CoarseStructure, a: int, b: int) -> bool:
    return any(not (a & ~neighbourhood(b, s, cs.n)) for s in cs.maxima)


def sim(cs: CoarseStructure, a: int, b: int) -> bool:
    return preceq(cs, a, b) and preceq(cs, b, a)


def is_connected(cs: CoarseStructure) -> bool:
    return _controlled(cs, full_relation(cs.n))


def bounded_classes(cs: CoarseStructure) -> List[int]:
    """Maximal bounded sets; the saturated maximum is an equivalence relation, so these are its classes."""
    if len(cs.maxima) != 1:
        raise InvariantViolation(f"saturation left {len(cs.maxima)} maximal relations")
    top, n = cs.maxima[0], cs.n
    if not (diagonal(n) & ~top == 0 and inverse(top, n) == top and compose(top, top, n) & ~top == 0):
        raise InvariantViolation("saturated maximum is not an equivalence relation")
    return sorted({row(top, i, n) for i in range(n)}, key=lambda c: c & -c)


# ---------- maps ----------
@dataclass(frozen=True)
class CoarseMap:
    source: CoarseStructure
    target: CoarseStructure
    table: Tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source.n or any(t < 0 or t >= self.target.n for t in self.table):
            raise PreconditionError("point map must send every source point into the target")

    @classmethod
    def from_labels(cls, source: CoarseStructure, target: CoarseStructure, mapping: Dict[Hashable, Hashable]) -> "CoarseMap":
        return cls(source, target, tuple(target.index[mapping[p]] for p in source.ground))

    def image_relation(self, rel: int) -> int:
        n, m = self.source.n, self.target.n
        out = 0
        for k in bits(rel):
            i, j = divmod(k, n)
            out |= 1 << (self.table[i] * m + self.table[j])
        return out

    def image(self, a: int) -> int:
        return sum(1 << self.table[i] for i in bits(a))

    def preimage(self, b: int) -> int:
        return sum(1 << i for i, t in enumerate(self.table) if (b >> t) & 1)


def identity_coarse(cs: CoarseStructure) -> CoarseMap:
    return CoarseMap(cs, cs, tuple(range(cs.n)))


def compose_coarse(second: CoarseMap, first: CoarseMap) -> CoarseMap:
    if first.target != second.source:
        raise SpaceMismatch("coarse maps do not compose")
    return CoarseMap(first.source, second.target, tuple(second.table[t] for t in first.table))


def is_coarse_map(f: CoarseMap) -> bool:
    if not all(_controlled(f.target, f.image_relation(s)) for s in f.source.maxima):
        return False
    if f.target.n <= COARSE_SUBSET_CAP:
        witnesses: Iterable[int] = (b for b in range(1, 1 << f.target.n) if is_bounded(f.target, b))
    else:
        witnesses = bounded_classes(f.target)
    return all(is_bounded(f.source, f.preimage(b)) for b in witnesses)


def are_close(f: CoarseMap, g: CoarseMap) -> bool:
    if f.target != g.target or f.source.ground != g.source.ground:
        raise SpaceMismatch("closeness compares maps with one domain and one target")
    m = f.target.n
    graph = sum(1 << (a * m + b) for a, b in zip(f.table, g.table))
    return _controlled(f.target, graph)


def is_quasi_inverse(f: CoarseMap, g: CoarseMap) -> bool:
    if f.source != g.target or f.target != g.source:
        raise SpaceMismatch("quasi-inverses run in opposite directions")
    for name, m in (("f", f), ("g", g)):
        if not is_coarse_map(m):
            raise NotCoarseError(f"{name} is not a coarse map", {"map": name})
    return (are_close(compose_coarse(f, g), identity_coarse(f.target))
            and are_close(compose_coarse(g, f), identity_coarse(f.source)))


# ---------- coproduct pullback ----------
def pullback_coarse(ground: Sequence[Hashable], table: Sequence[int], zeta: CoarseStructure) -> CoarseStructure:
    """ε on ground: e is controlled iff e ⊆ π⁻¹(s) for some controlled s of ζ."""
    ground = tuple(ground)
    n, m = len(ground), zeta.n
    if len(table) != n or any(t < 0 or t >= m for t in table):
        raise PreconditionError("projection must send every point into the base ground")
    gens = []
    for s in zeta.maxima:
        gens.append(sum(1 << (a * n + b) for a in range(n) for b in range(n) if (s >> (table[a] * m + table[b])) & 1))
    return from_masks(ground, tuple(gens))


def sections(table: Sequence[int], m: int) -> List[Tuple[int, ...]]:
    """Every section of a surjective point map onto m points."""
    fibers = [[a for a, t in enumerate(table) if t == b] for b in range(m)]
    if any(not f for f in fibers):
        raise PreconditionError("sections need a surjective projection")
    count = 1
    for f in fibers:
        count *= len(f)
    if count > SECTION_CAP:
        raise PreconditionError(f"{count} sections exceeds cap {SECTION_CAP}")
    return [tuple(choice) for choice in cartesian(*fibers)]


def structure_report(cs: CoarseStructure) -> Dict[str, object]:
    n = cs.n
    out: Dict[str, object] = {
        "ground": [label_text(p) for p in cs.ground],
        "maxima": [sorted([label_text(cs.ground[k // n]), label_text(cs.ground[k % n])] for k in bits(s)) for s in cs.maxima],
    }
    try:
        out["classes"] = [sorted(label_text(cs.ground[i]) for i in bits(c)) for c in bounded_classes(cs)]
    except InvariantViolation:
        out["classes"] = None
    return out
