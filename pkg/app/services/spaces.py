# services/spaces.py
# Finite topological spaces stored as specialization preorders.
# Subsets are int bitmasks over point indices; bit i <-> points[i].

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, Iterator, List, Mapping, Sequence, Tuple
import os

import networkx as nx
import numpy as np

from services.errors import CapacityError, OracleRefusal, PreconditionError, SpaceMismatch, SpaceValidationError

Subset = int

SPACE_CAPACITY = int(os.getenv("GLUE_SPACE_CAPACITY", "64"))
ORACLE_CAP = int(os.getenv("GLUE_ORACLE_CAP", "16"))


# ---------- mask helpers ----------
def bits(mask: Subset) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def full_mask(n: int) -> Subset:
    return (1 << n) - 1


def label_text(p: Any) -> str:
    """Stable text form of a point label (tuples from products render as '(a,b)')."""
    if isinstance(p, str):
        return p
    if isinstance(p, tuple):
        return "(" + ",".join(label_text(q) for q in p) + ")"
    return str(p)


def _check_preorder(points: Sequence[Any], down: Sequence[int]) -> None:
    n = len(points)
    for j in range(n):
        if not (down[j] >> j) & 1:
            raise SpaceValidationError(
                "reflexivity", f"{label_text(points[j])} is not in its own closure",
                {"points": [label_text(points[j])]},
            )
    for j in range(n):
        for i in bits(down[j]):
            extra = down[i] & ~down[j]
            if extra:
                k = next(bits(extra))
                raise SpaceValidationError(
                    "transitivity",
                    f"{label_text(points[k])} below {label_text(points[i])} below "
                    f"{label_text(points[j])} but {label_text(points[k])} is not below {label_text(points[j])}",
                    {"points": [label_text(points[k]), label_text(points[i]), label_text(points[j])]},
                )


@dataclass(frozen=True)
class FiniteSpace:
    points: Tuple[Hashable, ...]
    down: Tuple[int, ...]
    index: Dict[Hashable, int] = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        n = len(self.points)
        if n == 0:
            raise SpaceValidationError("nonempty", "a space needs at least one point")
        if n > SPACE_CAPACITY:
            raise CapacityError(f"{n} points exceeds capacity {SPACE_CAPACITY}", {"points": n})
        if len(self.down) != n:
            raise SpaceValidationError("square", "closure table does not cover the point list")
        idx: Dict[Hashable, int] = {}
        for i, p in enumerate(self.points):
            if p in idx:
                raise SpaceValidationError("distinct", f"duplicate point {label_text(p)}", {"points": [label_text(p)]})
            idx[p] = i
        if any(d >> n for d in self.down):
            raise SpaceValidationError("membership", "closure mentions a point outside the space")
        _check_preorder(self.points, self.down)
        object.__setattr__(self, "index", idx)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> Subset:
        return full_mask(len(self.points))

    def below(self, i: int, j: int) -> bool:
        """points[i] lies in the closure of points[j]."""
        return bool((self.down[j] >> i) & 1)

    def point_index(self, label: Hashable) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise PreconditionError(f"unknown point {label_text(label)}", {"point": label_text(label)})

    def mask_of(self, labels: Iterable[Hashable]) -> Subset:
        m = 0
        for p in labels:
            m |= 1 << self.point_index(p)
        return m

    def labels_of(self, mask: Subset) -> List[Hashable]:
        return [self.points[i] for i in bits(mask)]

    def closure(self, mask: Subset) -> Subset:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def is_closed(self, mask: Subset) -> bool:
        return all(not (self.down[i] & ~mask) for i in bits(mask))

    def closure_table(self) -> Dict[str, List[str]]:
        return {label_text(p): sorted(label_text(q) for q in self.labels_of(self.down[i])) for i, p in enumerate(self.points)}


@dataclass(frozen=True)
class SpaceMap:
    domain: FiniteSpace
    codomain: FiniteSpace
    table: Tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.domain.n:
            raise PreconditionError("map table must cover every domain point")
        if any(t < 0 or t >= self.codomain.n for t in self.table):
            raise PreconditionError("map table points outside the codomain")

    @classmethod
    def from_labels(cls, domain: FiniteSpace, codomain: FiniteSpace, mapping: Mapping[Hashable, Hashable]) -> "SpaceMap":
        missing = [label_text(p) for p in domain.points if p not in mapping]
        if missing:
            raise PreconditionError("map is not total", {"points": missing})
        return cls(domain, codomain, tuple(codomain.point_index(mapping[p]) for p in domain.points))

    def image(self, mask: Subset) -> Subset:
        out = 0
        for i in bits(mask):
            out |= 1 << self.table[i]
        return out

    def preimage(self, mask: Subset) -> Subset:
        out = 0
        for i, t in enumerate(self.table):
            if (mask >> t) & 1:
                out |= 1 << i
        return out

    def as_labels(self) -> Dict[Hashable, Hashable]:
        return {p: self.codomain.points[self.table[i]] for i, p in enumerate(self.domain.points)}


# ---------- constructors ----------
def validate_space(points: Sequence[Hashable], below: Any) -> FiniteSpace:
    """Build a space from a point list and a below matrix (below[x][y] <=> x in Cl{y})."""
    pts = list(points)
    if not pts:
        raise SpaceValidationError("nonempty", "a space needs at least one point")
    if len(pts) > SPACE_CAPACITY:
        raise CapacityError(f"{len(pts)} points exceeds capacity {SPACE_CAPACITY}", {"points": len(pts)})
    n = len(pts)
    mat = np.asarray(below, dtype=bool)
    if mat.shape != (n, n):
        raise SpaceValidationError("square", f"below matrix has shape {mat.shape}, expected {(n, n)}")

    missing = np.flatnonzero(~np.diag(mat))
    if missing.size:
        p = pts[int(missing[0])]
        raise SpaceValidationError("reflexivity", f"{label_text(p)} is not below itself", {"points": [label_text(p)]})

    m = mat.astype(np.int64)
    bad = np.argwhere(((m @ m) > 0) & ~mat)
    if bad.size:
        a, c = int(bad[0][0]), int(bad[0][1])
        b = int(np.flatnonzero(mat[a] & mat[:, c])[0])
        raise SpaceValidationError(
            "transitivity",
            f"{label_text(pts[a])} below {label_text(pts[b])} below {label_text(pts[c])} "
            f"but {label_text(pts[a])} is not below {label_text(pts[c])}",
            {"points": [label_text(pts[a]), label_text(pts[b]), label_text(pts[c])]},
        )

    down = tuple(sum(1 << int(i) for i in np.flatnonzero(mat[:, j])) for j in range(n))
    return FiniteSpace(tuple(pts), down)


def from_closures(points: Sequence[Hashable], closure: Mapping[Hashable, Iterable[Hashable]]) -> FiniteSpace:
    pts = list(points)
    where = {p: i for i, p in enumerate(pts)}
    below = [[False] * len(pts) for _ in pts]
    for j, p in enumerate(pts):
        for q in closure.get(p, [p]):
            if q not in where:
                raise SpaceValidationError(
                    "membership", f"closure of {label_text(p)} mentions unknown point {label_text(q)}",
                    {"points": [label_text(p), label_text(q)]},
                )
            below[where[q]][j] = True
    return validate_space(pts, below)


def discrete_space(points: Sequence[Hashable]) -> FiniteSpace:
    return FiniteSpace(tuple(points), tuple(1 << i for i in range(len(points))))


def indiscrete_space(points: Sequence[Hashable]) -> FiniteSpace:
    n = len(points)
    return FiniteSpace(tuple(points), tuple(full_mask(n) for _ in range(n)))


def sierpinski(low: Hashable = "s0", high: Hashable = "s1") -> FiniteSpace:
    return FiniteSpace((low, high), (0b01, 0b11))


# public:
def closure(space: FiniteSpace, a: Subset) -> Subset:
    if a >> space.n:
        raise PreconditionError("subset mentions points outside the space")
    return space.closure(a)


def interior(space: FiniteSpace, a: Subset) -> Subset:
    return space.full & ~space.closure(space.full & ~a)


def is_closed_set(space: FiniteSpace, a: Subset) -> bool:
    return not a >> space.n and space.is_closed(a)


def is_open_set(space: FiniteSpace, a: Subset) -> bool:
    return space.is_closed(space.full & ~a)


def enumerate_closed_sets(space: FiniteSpace) -> List[Subset]:
    """Every down-set, found by brute force over all subsets."""
    if space.n > ORACLE_CAP:
        raise OracleRefusal(f"closed-set oracle refuses {space.n} points (cap {ORACLE_CAP})", {"points": space.n})
    out = []
    for a in range(1 << space.n):
        if all(not (space.down[y] & ~a) for y in bits(a)):
            out.append(a)
    return out


def is_continuous(m: SpaceMap) -> bool:
    dom, cod = m.domain, m.codomain
    for x in range(dom.n):
        if m.image(dom.down[x]) & ~cod.down[m.table[x]]:
            return False
    return True


def is_homeomorphism(m: SpaceMap) -> bool:
    if m.domain.n != m.codomain.n or len(set(m.table)) != m.domain.n:
        return False
    inverse = [0] * m.domain.n
    for i, t in enumerate(m.table):
        inverse[t] = i
    return is_continuous(m) and is_continuous(SpaceMap(m.codomain, m.domain, tuple(inverse)))


def is_closed_map(m: SpaceMap) -> bool:
    # images preserve unions, so point closures suffice
    return all(m.codomain.is_closed(m.image(d)) for d in m.domain.down)


def is_surjective(m: SpaceMap) -> bool:
    return len(set(m.table)) == m.codomain.n


def is_injective(m: SpaceMap) -> bool:
    return len(set(m.table)) == m.domain.n


def identity_map(space: FiniteSpace) -> SpaceMap:
    return SpaceMap(space, space, tuple(range(space.n)))


def constant_map(domain: FiniteSpace, codomain: FiniteSpace, target: int = 0) -> SpaceMap:
    return SpaceMap(domain, codomain, tuple(target for _ in range(domain.n)))


def compose_maps(second: SpaceMap, first: SpaceMap) -> SpaceMap:
    """second after first."""
    if first.codomain != second.domain:
        raise SpaceMismatch("maps do not compose: codomain and domain differ")
    return SpaceMap(first.domain, second.codomain, tuple(second.table[t] for t in first.table))


def _positions(mask: Subset) -> Dict[int, int]:
    return {old: new for new, old in enumerate(bits(mask))}


def _compress(mask: Subset, where: Mapping[int, int]) -> Subset:
    out = 0
    for i in bits(mask):
        if i in where:
            out |= 1 << where[i]
    return out


def restrict_mask(mask: Subset, keep: Subset) -> Subset:
    """Re-index mask & keep onto the positions of keep (the subspace indexing)."""
    return _compress(mask & keep, _positions(keep))


def subspace(space: FiniteSpace, a: Subset) -> FiniteSpace:
    a &= space.full
    if not a:
        raise PreconditionError("subspace of the empty set is excluded")
    where = _positions(a)
    return FiniteSpace(
        tuple(space.points[i] for i in bits(a)),
        tuple(_compress(space.down[i] & a, where) for i in bits(a)),
    )


def inclusion_map(space: FiniteSpace, a: Subset) -> SpaceMap:
    sub = subspace(space, a)
    return SpaceMap(sub, space, tuple(bits(a & space.full)))


def product(a: FiniteSpace, b: FiniteSpace) -> FiniteSpace:
    if a.n * b.n > SPACE_CAPACITY:
        raise CapacityError(f"product of {a.n} and {b.n} points exceeds capacity {SPACE_CAPACITY}")
    m = b.n
    points = tuple((p, q) for p in a.points for q in b.points)
    down = []
    for i in range(a.n):
        for j in range(m):
            d = 0
            for i2 in bits(a.down[i]):
                for j2 in bits(b.down[j]):
                    d |= 1 << (i2 * m + j2)
            down.append(d)
    return FiniteSpace(points, tuple(down))


def project_left(prod: FiniteSpace, a: FiniteSpace, b: FiniteSpace) -> SpaceMap:
    return SpaceMap(prod, a, tuple(k // b.n for k in range(prod.n)))


def project_right(prod: FiniteSpace, a: FiniteSpace, b: FiniteSpace) -> SpaceMap:
    return SpaceMap(prod, b, tuple(k % b.n for k in range(prod.n)))


def connected_components(space: FiniteSpace) -> List[Subset]:
    """Components of the comparability graph, ordered by their least point index."""
    g = nx.Graph()
    g.add_nodes_from(range(space.n))
    g.add_edges_from((i, j) for j in range(space.n) for i in bits(space.down[j]) if i != j)
    comps = [sum(1 << i for i in c) for c in nx.connected_components(g)]
    return sorted(comps, key=lambda c: c & -c)


def same_topology(a: FiniteSpace, b: FiniteSpace) -> bool:
    """Equal point sets with equal specialization, ignoring point order."""
    if set(a.points) != set(b.points) or a.n != b.n:
        return False
    where = [b.index[p] for p in a.points]
    return all(a.below(i, j) == b.below(where[i], where[j]) for i in range(a.n) for j in range(a.n))
