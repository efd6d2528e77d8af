# services/glueing.py
# Admissible maps and pairs, the glued space X +_{f,g} Y and its decomposition.

from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import json, logging

from services.errors import AdmissibleError, PairError, PreconditionError, SpaceMismatch
from services.spaces import (
    FiniteSpace, SpaceMap, Subset, bits, full_mask, is_open_set, label_text, subspace,
)

LEFT_TAG = "L:"
RIGHT_TAG = "R:"

GenTable = Union[Sequence[Subset], Mapping[Hashable, Iterable[Hashable]]]


@dataclass(frozen=True)
class AdmissibleMap:
    """Union- and empty-preserving map Closed(source) -> Closed(target), kept on point closures."""
    source: FiniteSpace
    target: FiniteSpace
    gen: Tuple[Subset, ...]

    def apply(self, a: Subset) -> Subset:
        out = 0
        for i in bits(a):
            out |= self.gen[i]
        return out

    def table(self) -> Dict[str, List[str]]:
        return {
            label_text(p): sorted(label_text(q) for q in self.target.labels_of(self.gen[i]))
            for i, p in enumerate(self.source.points)
        }

    def is_empty(self) -> bool:
        return not any(self.gen)


@dataclass(frozen=True)
class AdmissiblePair:
    f: AdmissibleMap
    g: AdmissibleMap


# ---------- validation ----------
def _gen_masks(X: FiniteSpace, Y: FiniteSpace, gen: GenTable) -> Tuple[Subset, ...]:
    if isinstance(gen, Mapping):
        missing = [label_text(p) for p in X.points if p not in gen]
        if missing:
            raise AdmissibleError("generator table is not total", {"points": missing})
        return tuple(Y.mask_of(gen[p]) for p in X.points)
    masks = tuple(int(m) for m in gen)
    if len(masks) != X.n:
        raise AdmissibleError(f"generator table has {len(masks)} entries for {X.n} points")
    if any(m >> Y.n for m in masks):
        raise AdmissibleError("generator value mentions points outside the target")
    return masks


def _monotone_witness(X: FiniteSpace, gen: Sequence[Subset]) -> Optional[Tuple[int, int]]:
    for hi in range(X.n):
        for lo in bits(X.down[hi]):
            if gen[lo] & ~gen[hi]:
                return lo, hi
    return None


def make_admissible(X: FiniteSpace, Y: FiniteSpace, gen: GenTable) -> AdmissibleMap:
    masks = _gen_masks(X, Y, gen)
    for i, m in enumerate(masks):
        if not Y.is_closed(m):
            raise AdmissibleError(
                f"value at {label_text(X.points[i])} is not closed in the target",
                {"points": [label_text(X.points[i])], "value": sorted(label_text(q) for q in Y.labels_of(m))},
            )
    w = _monotone_witness(X, masks)
    if w is not None:
        lo, hi = w
        raise AdmissibleError(
            f"not monotone: {label_text(X.points[lo])} is below {label_text(X.points[hi])} "
            f"but its value is not contained in the value at {label_text(X.points[hi])}",
            {"points": [label_text(X.points[lo]), label_text(X.points[hi])]},
        )
    return AdmissibleMap(X, Y, masks)


def apply_admissible(f: AdmissibleMap, a: Subset) -> Subset:
    if not f.source.is_closed(a):
        raise PreconditionError("admissible maps only take closed sets", {"subset": [label_text(p) for p in f.source.labels_of(a)]})
    return f.apply(a)


def empty_map(X: FiniteSpace, Y: FiniteSpace) -> AdmissibleMap:
    return AdmissibleMap(X, Y, tuple(0 for _ in range(X.n)))


def full_map(X: FiniteSpace, Y: FiniteSpace) -> AdmissibleMap:
    return AdmissibleMap(X, Y, tuple(Y.full for _ in range(X.n)))


def identity_admissible(X: FiniteSpace) -> AdmissibleMap:
    return AdmissibleMap(X, X, X.down)


def admissible_leq(f: AdmissibleMap, f2: AdmissibleMap) -> bool:
    """f(A) ⊆ f2(A) for every closed A (generators suffice)."""
    return all(not (a & ~b) for a, b in zip(f.gen, f2.gen))


def is_complete(f: AdmissibleMap) -> bool:
    # every nonempty closed set contains a point closure
    return all(f.gen)


def check_pair(f: AdmissibleMap, g: AdmissibleMap) -> AdmissiblePair:
    if f.source != g.target or f.target != g.source:
        raise SpaceMismatch("f and g must run in opposite directions between the same two spaces")
    X, Y = f.source, f.target
    for x in range(X.n):
        if g.apply(f.gen[x]) & ~X.down[x]:
            raise PairError(f"g(f(Cl{{{label_text(X.points[x])}}})) leaves Cl{{{label_text(X.points[x])}}}",
                            {"points": [label_text(X.points[x])], "side": "left"})
    for y in range(Y.n):
        if f.apply(g.gen[y]) & ~Y.down[y]:
            raise PairError(f"f(g(Cl{{{label_text(Y.points[y])}}})) leaves Cl{{{label_text(Y.points[y])}}}",
                            {"points": [label_text(Y.points[y])], "side": "right"})
    return AdmissiblePair(f, g)


def one_sided(f: AdmissibleMap) -> AdmissiblePair:
    """The pair (f, ∅), admissible for every f."""
    return AdmissiblePair(f, empty_map(f.target, f.source))


# ---------- glued spaces ----------
@dataclass(frozen=True)
class SumSpace:
    left: FiniteSpace
    right: FiniteSpace
    pair: AdmissiblePair
    total: FiniteSpace
    embed_left: SpaceMap
    embed_right: SpaceMap

    @property
    def f(self) -> AdmissibleMap:
        return self.pair.f

    @property
    def g(self) -> AdmissibleMap:
        return self.pair.g

    @property
    def left_mask(self) -> Subset:
        return full_mask(self.left.n)

    @property
    def right_mask(self) -> Subset:
        return full_mask(self.right.n) << self.left.n

    def split(self, mask: Subset) -> Tuple[Subset, Subset]:
        return mask & self.left_mask, mask >> self.left.n

    def join(self, a: Subset, b: Subset) -> Subset:
        return a | (b << self.left.n)

    def strip_labels(self) -> FiniteSpace:
        return FiniteSpace(self.left.points + self.right.points, self.total.down)


def _close_up(X: FiniteSpace, Y: FiniteSpace, pair: AdmissiblePair, mask: Subset,
              forward: bool = True, backward: bool = True) -> Subset:
    """Smallest D ⊇ mask with D∩X, D∩Y closed, f(D∩X) ⊆ D and g(D∩Y) ⊆ D."""
    n = X.n
    while True:
        a = X.closure(mask & full_mask(n))
        b = Y.closure(mask >> n)
        if forward:
            b = Y.closure(b | pair.f.apply(a))
        if backward:
            a = X.closure(a | pair.g.apply(b))
        grown = a | (b << n)
        if grown == mask:
            return mask
        mask = grown


def glue(X: FiniteSpace, Y: FiniteSpace, pair: AdmissiblePair) -> SumSpace:
    if pair.f.source != X or pair.f.target != Y:
        raise SpaceMismatch("pair does not run between the given spaces")
    clash = {label_text(p) for p in X.points} & {label_text(q) for q in Y.points}
    if clash:
        raise PreconditionError("point labels collide between the halves", {"points": sorted(clash)})

    n = X.n
    down = [_close_up(X, Y, pair, 1 << i) for i in range(n)]
    down += [_close_up(X, Y, pair, 1 << (n + j)) for j in range(Y.n)]
    labels = tuple(LEFT_TAG + label_text(p) for p in X.points) + tuple(RIGHT_TAG + label_text(q) for q in Y.points)
    total = FiniteSpace(labels, tuple(down))

    logging.debug(json.dumps({"event": "glue.built", "left": X.n, "right": Y.n,
                              "f_empty": pair.f.is_empty(), "g_empty": pair.g.is_empty()}))
    return SumSpace(
        left=X, right=Y, pair=pair, total=total,
        embed_left=SpaceMap(X, total, tuple(range(n))),
        embed_right=SpaceMap(Y, total, tuple(n + j for j in range(Y.n))),
    )


def glue_one_sided(X: FiniteSpace, Y: FiniteSpace, f: AdmissibleMap) -> SumSpace:
    return glue(X, Y, one_sided(f))


def coproduct(X: FiniteSpace, Y: FiniteSpace) -> SumSpace:
    return glue(X, Y, AdmissiblePair(empty_map(X, Y), empty_map(Y, X)))


def closed_in_glueing(s: SumSpace, d: Subset) -> bool:
    """The four closedness conditions read directly off the pair."""
    a, b = s.split(d)
    return (s.left.is_closed(a) and s.right.is_closed(b)
            and not (s.f.apply(a) & ~b) and not (s.g.apply(b) & ~a))


def decompose(Z: FiniteSpace, xs: Subset) -> AdmissiblePair:
    """Recover (f, g) over subspace(Z, xs) and subspace(Z, rest) for an open xs."""
    xs &= Z.full
    if xs and xs != Z.full and not is_open_set(Z, xs):
        raise PreconditionError("the left half must be open", {"subset": [label_text(p) for p in Z.labels_of(xs)]})
    return split_space(Z, xs)


def split_space(Z: FiniteSpace, xs: Subset) -> AdmissiblePair:
    """f(A) = Cl_Z(A) ∩ Y and g(B) = Cl_Z(B) ∩ X; glueing them back gives Z for any split."""
    xs &= Z.full
    ys = Z.full & ~xs
    if not xs or not ys:
        raise PreconditionError("both halves of a decomposition must be nonempty")
    X, Y = subspace(Z, xs), subspace(Z, ys)
    x_where = {old: new for new, old in enumerate(bits(xs))}
    y_where = {old: new for new, old in enumerate(bits(ys))}

    def _onto(mask: Subset, where: Dict[int, int]) -> Subset:
        return sum(1 << where[i] for i in bits(mask) if i in where)

    f = AdmissibleMap(X, Y, tuple(_onto(Z.down[i] & ys, y_where) for i in bits(xs)))
    g = AdmissibleMap(Y, X, tuple(_onto(Z.down[j] & xs, x_where) for j in bits(ys)))
    return check_pair(f, g)


def is_dense_left(s: SumSpace) -> bool:
    return s.f.apply(s.left.full) == s.right.full


def is_dense_right(s: SumSpace) -> bool:
    return s.g.apply(s.right.full) == s.left.full


def _is_discrete(space: FiniteSpace) -> bool:
    return all(d == 1 << i for i, d in enumerate(space.down))


def hausdorff_criterion(X: FiniteSpace, Y: FiniteSpace, f: AdmissibleMap) -> bool:
    """Separation criterion for X +_f Y over discrete halves.

    Every finite closed set is compact, so the compact clause asks f to vanish
    everywhere. Once f is empty the separation clause holds for any two points
    of Y, which leaves f = ∅ as the whole verdict.
    """
    if not _is_discrete(X) or not _is_discrete(Y):
        raise PreconditionError("hausdorff_criterion needs discrete halves")
    return f.is_empty()


def compactness_criterion(s: SumSpace) -> bool:
    """Always true on finite spaces: every closed set is compact, so the non-compact clause never applies."""
    return True
