# services/limits.py
# Limits of finite diagrams of glueings over a shared base, and staged
# inverse systems with plateau detection.

from __future__ import annotations
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Hashable, List, Mapping, Optional, Tuple
import json, logging, os

from services.errors import CapacityError, DiagramError, InvariantViolation, OracleRefusal, PreconditionError
from services.glueing import (
    AdmissibleMap, SumSpace, check_pair, glue, glue_one_sided,
)
from services.spaces import (
    SPACE_CAPACITY, FiniteSpace, SpaceMap, bits, compose_maps, constant_map, identity_map, is_continuous,
)
from services.transport import SumMap, diagram_continuity, total_map

STABILIZATION_WINDOW = int(os.getenv("GLUE_STABILIZATION_WINDOW", "3"))
ISO_SEARCH_CAP = 8
TERMINAL_POINT = "inf"

Arrow = Tuple[str, str]


@dataclass(frozen=True)
class SumDiagram:
    """Glueings over one base with arrows id+phi, at most one per ordered pair."""
    base: FiniteSpace
    objects: Dict[str, SumSpace]
    arrows: Dict[Arrow, SpaceMap] = field(default_factory=dict)

    def names(self) -> List[str]:
        return sorted(self.objects)

    def arrow(self, a: str, b: str) -> SumMap:
        return SumMap(self.objects[a], self.objects[b], identity_map(self.base), self.arrows[(a, b)])


def make_diagram(base: FiniteSpace, objects: Mapping[str, SumSpace], arrows: Mapping[Arrow, SpaceMap]) -> SumDiagram:
    for name, obj in objects.items():
        if obj.left != base:
            raise DiagramError(f"object {name} is not glued onto the shared base", {"object": name})
    for (a, b), phi in arrows.items():
        if a not in objects or b not in objects:
            raise DiagramError(f"arrow {a}->{b} names an unknown object", {"arrow": [a, b]})
        if phi.domain != objects[a].right or phi.codomain != objects[b].right:
            raise DiagramError(f"arrow {a}->{b} does not run between the remainders", {"arrow": [a, b]})
        if a == b and phi.table != tuple(range(phi.domain.n)):
            raise DiagramError(f"arrow {a}->{a} must be the identity", {"arrow": [a, b]})
        if not is_continuous(phi):
            raise DiagramError(f"arrow {a}->{b} is not continuous on the remainders", {"arrow": [a, b]})
        if not diagram_continuity(SumMap(objects[a], objects[b], identity_map(base), phi)):
            raise DiagramError(f"arrow {a}->{b} is not continuous between the glueings", {"arrow": [a, b]})
    for (a, b), first in arrows.items():
        for (b2, c), second in arrows.items():
            if b2 != b or (a, c) not in arrows:
                continue
            if compose_maps(second, first).table != arrows[(a, c)].table:
                raise DiagramError(f"arrows {a}->{b}->{c} do not compose to {a}->{c}", {"arrows": [a, b, c]})
    return SumDiagram(base, dict(objects), dict(arrows))


def least_object(d: SumDiagram) -> Optional[str]:
    for c in d.names():
        if all(c == o or (c, o) in d.arrows for o in d.objects):
            return c
    return None


def is_codirected(d: SumDiagram) -> bool:
    def _reaches(c: str, o: str) -> bool:
        return c == o or (c, o) in d.arrows
    names = d.names()
    return all(any(_reaches(c, a) and _reaches(c, b) for c in names) for a in names for b in names)


# ---------- terminal object ----------
def terminal_object(base: FiniteSpace) -> SumSpace:
    """base +_{f∞} {inf}, with f∞(A) = {inf} for every nonempty closed A."""
    point = FiniteSpace((TERMINAL_POINT,), (1,))
    return glue_one_sided(base, point, AdmissibleMap(base, point, tuple(1 for _ in range(base.n))))


def terminal_map(s: SumSpace) -> SumMap:
    term = terminal_object(s.left)
    return SumMap(s, term, identity_map(s.left), constant_map(s.right, term.right))


# ---------- limits ----------
@dataclass(frozen=True)
class LimitResult:
    full: SumSpace
    projections: Dict[str, SumMap]
    families: Tuple[Tuple[int, ...], ...]
    dense: Optional[SumSpace]
    dense_projections: Dict[str, SumMap]


def _matching_families(d: SumDiagram, names: List[str], room: int) -> List[Tuple[int, ...]]:
    pos = {c: k for k, c in enumerate(names)}
    checks: Dict[int, List[Tuple[int, SpaceMap, int]]] = {k: [] for k in range(len(names))}
    for (a, b), phi in d.arrows.items():
        # test each arrow once both of its ends are assigned
        late = max(pos[a], pos[b])
        checks[late].append((pos[a], phi, pos[b]))
    out: List[Tuple[int, ...]] = []
    fam: List[int] = []

    def _walk(k: int) -> None:
        if k == len(names):
            out.append(tuple(fam))
            if len(out) > room:
                raise CapacityError(f"limit remainder exceeds {room} points")
            return
        for r in range(d.objects[names[k]].right.n):
            fam.append(r)
            if all(phi.table[fam[src]] == fam[dst] for src, phi, dst in checks[k]):
                _walk(k + 1)
            fam.pop()

    _walk(0)
    return out


def _limit_right(d: SumDiagram, names: List[str], families: List[Tuple[int, ...]]) -> FiniteSpace:
    if len(names) == 1:
        labels = tuple(d.objects[names[0]].right.points[fam[0]] for fam in families)
    else:
        labels = tuple(tuple(d.objects[c].right.points[fam[k]] for k, c in enumerate(names)) for fam in families)
    down = []
    for q in families:
        m = 0
        for i, p in enumerate(families):
            if all(d.objects[c].right.below(p[k], q[k]) for k, c in enumerate(names)):
                m |= 1 << i
        down.append(m)
    return FiniteSpace(labels, tuple(down))


def sum_limit(d: SumDiagram) -> LimitResult:
    """Matching families over the diagonal copy of the base, with product specialization."""
    names = d.names()
    base = d.base
    if not names:
        term = terminal_object(base)
        return LimitResult(term, {}, ((0,),), term, {})

    families = _matching_families(d, names, SPACE_CAPACITY - base.n)
    if not families:
        raise DiagramError("the diagram has no matching family of remainder points")
    right = _limit_right(d, names, families)

    # family p lies in Cl{x} iff each coordinate lies in f_c(Cl{x})
    f_gen = tuple(
        sum(1 << i for i, p in enumerate(families)
            if all((d.objects[c].f.gen[x] >> p[k]) & 1 for k, c in enumerate(names)))
        for x in range(base.n)
    )
    g_gen = tuple(_meet_left(d, names, p) for p in families)
    full = glue(base, right, check_pair(AdmissibleMap(base, right, f_gen), AdmissibleMap(right, base, g_gen)))
    _assert_product_topology(d, names, families, full)

    projections = {
        c: SumMap(full, d.objects[c], identity_map(base), SpaceMap(right, d.objects[c].right, tuple(p[k] for p in families)))
        for k, c in enumerate(names)
    }

    dense, dense_projections = None, {}
    reach = full.f.apply(base.full)
    if reach:
        inc = sorted(bits(reach))
        sub_right = FiniteSpace(
            tuple(right.points[i] for i in inc),
            tuple(_restrict(right.down[i], inc) for i in inc),
        )
        pair = check_pair(
            AdmissibleMap(base, sub_right, tuple(_restrict(m, inc) for m in full.f.gen)),
            AdmissibleMap(sub_right, base, tuple(full.g.gen[i] for i in inc)),
        )
        dense = glue(base, sub_right, pair)
        dense_projections = {
            c: SumMap(dense, d.objects[c], identity_map(base),
                      SpaceMap(sub_right, d.objects[c].right, tuple(families[i][k] for i in inc)))
            for k, c in enumerate(names)
        }

    logging.info(json.dumps({"event": "limit.built", "objects": len(names), "arrows": len(d.arrows),
                             "remainder": right.n, "dense_remainder": 0 if dense is None else dense.right.n}))
    return LimitResult(full, projections, tuple(families), dense, dense_projections)


def _meet_left(d: SumDiagram, names: List[str], fam: Tuple[int, ...]) -> int:
    out = d.base.full
    for k, c in enumerate(names):
        out &= d.objects[c].g.gen[fam[k]]
    return out


def _restrict(mask: int, keep: List[int]) -> int:
    return sum(1 << new for new, old in enumerate(keep) if (mask >> old) & 1)


def _assert_product_topology(d: SumDiagram, names: List[str], families: List[Tuple[int, ...]], full: SumSpace) -> None:
    n = d.base.n
    coords = [[x for _ in names] for x in range(n)] + [[n + p[k] for k in range(len(names))] for p in families]
    for j, cj in enumerate(coords):
        for i, ci in enumerate(coords):
            expect = all(d.objects[c].total.below(ci[k], cj[k]) for k, c in enumerate(names))
            if full.total.below(i, j) != expect:
                raise InvariantViolation("limit topology differs from the product specialization",
                                         {"points": [str(full.total.points[i]), str(full.total.points[j])]})


def is_cone(d: SumDiagram, cone: Mapping[str, SumMap]) -> bool:
    if set(cone) != set(d.objects):
        return False
    apex = next(iter(cone.values())).source
    if any(m.source != apex for m in cone.values()):
        return False
    for c, m in cone.items():
        if m.target != d.objects[c] or m.psi.table != tuple(range(d.base.n)):
            return False
        if not is_continuous(m.phi) or not diagram_continuity(m):
            return False
    for (a, b), phi in d.arrows.items():
        if compose_maps(phi, cone[a].phi).table != cone[b].phi.table:
            return False
    return True


def mediating_map(limit: LimitResult, cone: Mapping[str, SumMap]) -> SumMap:
    """The unique id+phi from the cone's apex into the full limit."""
    names = sorted(cone)
    apex = cone[names[0]].source
    where = {fam: i for i, fam in enumerate(limit.families)}
    table = []
    for w in range(apex.right.n):
        fam = tuple(cone[c].phi.table[w] for c in names)
        if fam not in where:
            raise DiagramError("cone images do not form a matching family", {"point": str(apex.right.points[w])})
        table.append(where[fam])
    return SumMap(apex, limit.full, identity_map(apex.left), SpaceMap(apex.right, limit.full.right, tuple(table)))


def find_isomorphism(a: SumSpace, b: SumSpace) -> Optional[SpaceMap]:
    """A remainder bijection making identity + phi a homeomorphism of totals."""
    if a.left != b.left or a.right.n != b.right.n:
        return None
    if a.right.n > ISO_SEARCH_CAP:
        raise OracleRefusal(f"isomorphism search refuses {a.right.n} remainder points (cap {ISO_SEARCH_CAP})")
    n = a.left.n
    for perm in permutations(range(b.right.n)):
        phi = SpaceMap(a.right, b.right, tuple(perm))
        t = total_map(SumMap(a, b, identity_map(a.left), phi))
        if all(a.total.below(i, j) == b.total.below(t.table[i], t.table[j])
               for i in range(n + a.right.n) for j in range(n + a.right.n)):
            return phi
    return None


# ---------- inverse systems ----------
@dataclass(frozen=True)
class InverseSystem:
    stages: Tuple[Tuple[Hashable, ...], ...]
    bonds: Tuple[Tuple[int, ...], ...]  # bonds[k]: stage k+1 -> stage k

    def __post_init__(self):
        if len(self.bonds) != max(len(self.stages) - 1, 0):
            raise PreconditionError("an inverse system needs one bond between consecutive stages")
        for k, bond in enumerate(self.bonds):
            if len(bond) != len(self.stages[k + 1]) or any(t < 0 or t >= len(self.stages[k]) for t in bond):
                raise PreconditionError(f"bond {k + 1}->{k} is not a map between the stages", {"bond": k})

    def bijective(self, k: int) -> bool:
        bond = self.bonds[k]
        return len(bond) == len(self.stages[k]) and len(set(bond)) == len(bond)


@dataclass(frozen=True)
class StageReport:
    index: int
    size: int
    bond_injective: Optional[bool]
    bond_surjective: Optional[bool]


def system_stages(s: InverseSystem, depth: int) -> List[StageReport]:
    """Per-stage size plus flags for the bond from the next stage down onto this one."""
    if depth > len(s.stages):
        raise PreconditionError(f"depth {depth} exceeds the {len(s.stages)} available stages")
    out = []
    for k in range(depth):
        if k < len(s.bonds):
            bond = s.bonds[k]
            out.append(StageReport(k, len(s.stages[k]), len(set(bond)) == len(bond), len(set(bond)) == len(s.stages[k])))
        else:
            out.append(StageReport(k, len(s.stages[k]), None, None))
    return out


def detect_stabilization(s: InverseSystem, window: int = STABILIZATION_WINDOW) -> Optional[int]:
    """Least n with bonds n..n+window-1 all bijective; None when no such plateau is visible."""
    if window < 1:
        raise PreconditionError("window must be at least 1")
    for n in range(len(s.bonds) - window + 1):
        if all(s.bijective(k) for k in range(n, n + window)):
            return n
    return None
