# services/harness.py
# Seeded generation of spaces, maps, glueings, diagrams, structures and graphs,
# exhaustive small-instance enumerators, and the law runner with greedy shrinking.

from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple
import hashlib, json, logging, os

import networkx as nx

from services.coarse import CoarseStructure, compose, diagonal, from_masks, inverse
from services.errors import DiagramError, GlueError, OracleRefusal, PreconditionError
from services.glueing import (
    AdmissibleMap, AdmissiblePair, SumSpace, check_pair, glue, glue_one_sided, make_admissible, one_sided, split_space,
)
from services.limits import InverseSystem, SumDiagram, make_diagram
from services.spaces import (
    SPACE_CAPACITY, FiniteSpace, SpaceMap, Subset, bits, compose_maps, constant_map, discrete_space,
    enumerate_closed_sets, full_mask, identity_map, is_continuous, restrict_mask, subspace, validate_space,
)
from services.transport import SumMap, pushforward

MAX_SHRINK_STEPS = int(os.getenv("GLUE_MAX_SHRINK_STEPS", "200"))
EXHAUSTIVE_POINTS = int(os.getenv("GLUE_EXHAUSTIVE_POINTS", "3"))
FAILURES_PER_LAW = 3
GENERATIVE_CAP = 4096

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


# ---------- random source ----------
def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64: state += golden gamma, output = mix(state). Reports stay portable across implementations."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.state = self.seed

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return _mix64(self.state)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise PreconditionError("below() needs a positive bound")
        limit = ((1 << 64) // n) * n
        while True:
            r = self.next()
            if r < limit:
                return r % n

    def chance(self, num: int, den: int) -> bool:
        return self.below(den) < num

    def subset(self, n: int, num: int = 1, den: int = 2) -> Subset:
        return sum(1 << i for i in range(n) if self.chance(num, den))

    def split(self, i: int) -> "SplitMix64":
        """Independent child stream; does not advance this one."""
        return SplitMix64(_mix64((self.seed + (i + 1) * GAMMA) & MASK64) ^ _mix64(self.seed))


def _salt(law_id: str) -> int:
    return int(hashlib.sha256(law_id.encode("utf-8")).hexdigest()[:16], 16)


def trial_seed(seed: int, law_id: str, trial: int) -> int:
    return SplitMix64(seed ^ _salt(law_id)).split(trial).seed


# ---------- spaces and maps ----------
def _labels(n: int, prefix: str) -> List[str]:
    return [f"{prefix}{i}" for i in range(n)]


def gen_space(rng: SplitMix64, n: int, prefix: str = "p", labels: Optional[Sequence[str]] = None) -> FiniteSpace:
    """Random blocks of equivalent points ordered by the reachability closure of a random DAG."""
    if not 1 <= n <= SPACE_CAPACITY:
        raise PreconditionError(f"gen_space needs 1 <= n <= {SPACE_CAPACITY}", {"n": n})
    k = 1 + rng.below(n)
    block = [rng.below(k) for _ in range(n)]
    dag = nx.DiGraph()
    dag.add_nodes_from(range(k))
    for a in range(k):
        for b in range(a + 1, k):
            if rng.below(3) == 0:
                dag.add_edge(b, a)  # block a sits below block b
    reach = nx.transitive_closure(dag, reflexive=True)
    below = [[reach.has_edge(block[y], block[x]) for y in range(n)] for x in range(n)]
    return validate_space(list(labels) if labels is not None else _labels(n, prefix), below)


def _by_closure(X: FiniteSpace) -> List[int]:
    """Distinct point closures, smallest first, so strict lower closures come earlier."""
    return sorted(set(X.down), key=lambda d: (bin(d).count("1"), d))


def gen_table(rng: SplitMix64, X: FiniteSpace, Y: FiniteSpace) -> Tuple[Subset, ...]:
    """Closed values per point with no monotonicity promise."""
    return tuple(Y.closure(rng.subset(Y.n, 1, 3)) if rng.below(4) else 0 for _ in range(X.n))


def gen_admissible(rng: SplitMix64, X: FiniteSpace, Y: FiniteSpace) -> AdmissibleMap:
    values: Dict[int, Subset] = {}
    for d in _by_closure(X):
        base = 0
        for z in bits(d):
            if X.down[z] != d:
                base |= values[X.down[z]]
        extra = rng.subset(Y.n, 1, 3) if rng.below(4) else 0
        values[d] = Y.closure(base | extra)
    return make_admissible(X, Y, [values[d] for d in X.down])


def gen_point_map(rng: SplitMix64, X: FiniteSpace, Y: FiniteSpace) -> SpaceMap:
    return SpaceMap(X, Y, tuple(rng.below(Y.n) for _ in range(X.n)))


def gen_map(rng: SplitMix64, X: FiniteSpace, Y: FiniteSpace) -> SpaceMap:
    """Random continuous map, built along the specialization; falls back to a constant."""
    table = [0] * X.n
    for d in _by_closure(X):
        need = 0
        for z in bits(d):
            if X.down[z] != d:
                need |= 1 << table[z]
        options = [t for t in range(Y.n) if not need & ~Y.down[t]]
        if not options:
            return constant_map(X, Y, rng.below(Y.n))
        t = options[rng.below(len(options))]
        for x in range(X.n):
            if X.down[x] == d:
                table[x] = t
    return SpaceMap(X, Y, tuple(table))


def gen_quotient(rng: SplitMix64, Y: FiniteSpace, prefix: str = "q") -> Tuple[FiniteSpace, SpaceMap]:
    """A random quotient Q of Y with its continuous surjection Y -> Q."""
    m = 1 + rng.below(Y.n)
    raw = [rng.below(m) for _ in range(Y.n)]
    used = {b: i for i, b in enumerate(sorted(set(raw)))}
    block = [used[b] for b in raw]
    k = len(used)
    g = nx.DiGraph()
    g.add_nodes_from(range(k))
    for j in range(Y.n):
        for i in bits(Y.down[j]):
            g.add_edge(block[j], block[i])
    reach = nx.transitive_closure(g, reflexive=True)
    Q = validate_space(_labels(k, prefix), [[reach.has_edge(b, a) for b in range(k)] for a in range(k)])
    return Q, SpaceMap(Y, Q, tuple(block))


def gen_closed_inclusion(rng: SplitMix64, Z: FiniteSpace) -> SpaceMap:
    """Inclusion of a nonempty closed subspace: injective, continuous and closed."""
    c = Z.closure(1 << rng.below(Z.n)) | Z.closure(rng.subset(Z.n, 1, 4))
    sub = subspace(Z, c)
    return SpaceMap(sub, Z, tuple(bits(c)))


def gen_glued(rng: SplitMix64, n: int, m: int, lp: str = "x", rp: str = "y") -> SumSpace:
    """One-sided glueings half the time, otherwise the split of a random space on n + m points."""
    if rng.below(2):
        X, Y = gen_space(rng, n, lp), gen_space(rng, m, rp)
        return glue(X, Y, one_sided(gen_admissible(rng, X, Y)))
    Z = gen_space(rng, n + m, labels=_labels(n, lp) + _labels(m, rp))
    pair = split_space(Z, full_mask(n))
    return glue(pair.f.source, pair.f.target, pair)


def gen_sum_map(rng: SplitMix64, max_half: int = 3) -> SumMap:
    s = gen_glued(rng, 1 + rng.below(max_half), 1 + rng.below(max_half), "x", "y")
    t = gen_glued(rng, 1 + rng.below(max_half), 1 + rng.below(max_half), "z", "w")
    return SumMap(s, t, gen_map(rng, s.left, t.left), gen_map(rng, s.right, t.right))


# ---------- restriction (shrinking support) ----------
def restrict_admissible(f: AdmissibleMap, X: FiniteSpace, keep_x: Subset, Y: FiniteSpace, keep_y: Subset) -> AdmissibleMap:
    """f on subspaces: traces of closed sets stay closed and monotonicity survives."""
    return AdmissibleMap(X, Y, tuple(restrict_mask(f.gen[i], keep_y) for i in bits(keep_x)))


def restrict_glued(s: SumSpace, keep_x: Subset, keep_y: Subset) -> SumSpace:
    X, Y = subspace(s.left, keep_x), subspace(s.right, keep_y)
    f = restrict_admissible(s.f, X, keep_x, Y, keep_y)
    g = restrict_admissible(s.g, Y, keep_y, X, keep_x)
    return glue(X, Y, check_pair(f, g))


def drop_one(n: int) -> Iterator[Subset]:
    """Every mask of n points with a single point removed (nothing when n == 1)."""
    if n > 1:
        for i in range(n):
            yield full_mask(n) & ~(1 << i)


def shrink_glued(s: SumSpace) -> Iterator[SumSpace]:
    for keep in drop_one(s.left.n):
        yield restrict_glued(s, keep, s.right.full)
    for keep in drop_one(s.right.n):
        yield restrict_glued(s, s.left.full, keep)


# ---------- diagrams and systems ----------
def gen_codirected_diagram(rng: SplitMix64, base_n: int = 2, max_objects: int = 4) -> SumDiagram:
    """A tree of pushforwards along random quotients, rooted at the least object c0."""
    X = gen_space(rng, base_n, "x")
    Y0 = gen_space(rng, 1 + rng.below(4), "a")
    objects = {"c0": glue_one_sided(X, Y0, gen_admissible(rng, X, Y0))}
    arrows: Dict[Tuple[str, str], SpaceMap] = {}
    for k in range(1, 1 + rng.below(max_objects)):
        name = f"c{k}"
        parent = f"c{rng.below(k)}"
        Q, q = gen_quotient(rng, objects[parent].right, prefix=f"q{k}_")
        objects[name] = glue_one_sided(X, Q, pushforward(objects[parent].f, identity_map(X), q))
        for (a, b), bond in list(arrows.items()):
            if b == parent:
                arrows[(a, name)] = compose_maps(q, bond)
        arrows[(parent, name)] = q
    return make_diagram(X, objects, arrows)


def gen_free_diagram(rng: SplitMix64, base_n: int = 1, objects: int = 2) -> SumDiagram:
    """Independent one-sided glueings over one base, no arrows."""
    X = gen_space(rng, base_n, "x")
    out = {}
    for k in range(objects):
        Y = gen_space(rng, 1 + rng.below(3), f"r{k}_")
        out[f"c{k}"] = glue_one_sided(X, Y, gen_admissible(rng, X, Y))
    return make_diagram(X, out, {})


def gen_inverse_system(rng: SplitMix64, stages: int = 6, max_size: int = 4) -> InverseSystem:
    sizes = [1 + rng.below(max_size) for _ in range(stages)]
    bonds = []
    for k in range(stages - 1):
        if rng.below(2) and sizes[k + 1] == sizes[k]:
            bonds.append(tuple(range(sizes[k])))
        else:
            bonds.append(tuple(rng.below(sizes[k]) for _ in range(sizes[k + 1])))
    return InverseSystem(tuple(tuple(range(s)) for s in sizes), tuple(bonds))


# ---------- coarse and graphs ----------
def gen_relation(rng: SplitMix64, n: int, num: int = 1, den: int = 4) -> int:
    return rng.subset(n * n, num, den)


def gen_structure(rng: SplitMix64, n: int, prefix: str = "g") -> CoarseStructure:
    ground = tuple(_labels(n, prefix))
    gens = tuple(gen_relation(rng, n, 1, n + 2) for _ in range(rng.below(3)))
    return from_masks(ground, gens)


def gen_block_structure(rng: SplitMix64, n: int, m: int) -> Tuple[Tuple[str, ...], Tuple[int, ...], CoarseStructure]:
    """Ground of n points over m blocks (surjective projection) and a random structure on the blocks."""
    m = max(1, min(m, n))
    table = tuple(list(range(m)) + [rng.below(m) for _ in range(n - m)])
    return tuple(_labels(n, "e")), table, gen_structure(rng, m, "b")


def gen_finite_graph(rng: SplitMix64, n: int) -> Tuple[Tuple[int, ...], Tuple[Tuple[int, int], ...]]:
    """A random spanning tree on 0..n-1 plus a few chords; 0 is the basepoint."""
    edges = {(rng.below(v), v) for v in range(1, n)}
    for _ in range(rng.below(n)):
        u, v = rng.below(n), rng.below(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return tuple(range(n)), tuple(sorted(edges))


# ---------- exhaustive enumerators ----------
def all_spaces(n: int, prefix: str = "p") -> List[FiniteSpace]:
    """Every topology on n labeled points."""
    labels = tuple(_labels(n, prefix))
    choices = [[m for m in range(1 << n) if (m >> j) & 1] for j in range(n)]
    out = []
    for down in cartesian(*choices):
        if all(not (down[i] & ~down[j]) for j in range(n) for i in bits(down[j])):
            out.append(FiniteSpace(labels, tuple(down)))
    return out


def _is_monotone(X: FiniteSpace, gen: Sequence[Subset]) -> bool:
    return all(not (gen[lo] & ~gen[hi]) for hi in range(X.n) for lo in bits(X.down[hi]))


def all_admissible(X: FiniteSpace, Y: FiniteSpace) -> Iterator[AdmissibleMap]:
    closed = enumerate_closed_sets(Y)
    for gen in cartesian(closed, repeat=X.n):
        if _is_monotone(X, gen):
            yield AdmissibleMap(X, Y, tuple(gen))


def all_pairs(X: FiniteSpace, Y: FiniteSpace) -> Iterator[AdmissiblePair]:
    """Every admissible pair on (X, Y).

    Both composite conditions bound g one generator at a time: g(Cl y) must sit
    inside Cl x whenever y is in f(Cl x), and may only hold points x with
    f(Cl x) inside Cl y. Enumerating g under those bounds never meets a
    rejected candidate.
    """
    closed_x = enumerate_closed_sets(X)
    for f in all_admissible(X, Y):
        allowed = []
        for y in range(Y.n):
            w = X.full
            for x in range(X.n):
                if (f.gen[x] >> y) & 1:
                    w &= X.down[x]
                if f.gen[x] & ~Y.down[y]:
                    w &= ~(1 << x)
            allowed.append([c for c in closed_x if not c & ~w])
        for gen in cartesian(*allowed):
            if _is_monotone(Y, gen):
                yield AdmissiblePair(f, AdmissibleMap(Y, X, tuple(gen)))


def all_glued(max_points: int = EXHAUSTIVE_POINTS) -> Iterator[SumSpace]:
    for n in range(1, max_points + 1):
        for m in range(1, max_points + 1):
            for X in all_spaces(n, "x"):
                for Y in all_spaces(m, "y"):
                    for pair in all_pairs(X, Y):
                        yield glue(X, Y, pair)


def all_continuous(X: FiniteSpace, Y: FiniteSpace) -> Iterator[SpaceMap]:
    for table in cartesian(range(Y.n), repeat=X.n):
        m = SpaceMap(X, Y, tuple(table))
        if is_continuous(m):
            yield m


def all_one_sided(X: FiniteSpace, max_right: int, prefix: str = "y") -> Iterator[SumSpace]:
    for m in range(1, max_right + 1):
        for Y in all_spaces(m, prefix):
            for f in all_admissible(X, Y):
                yield glue_one_sided(X, Y, f)


def all_discrete_glued(max_points: int = EXHAUSTIVE_POINTS) -> Iterator[SumSpace]:
    """Discrete halves of up to max_points points each, every f, g = ∅."""
    for n in range(1, max_points + 1):
        X = discrete_space(_labels(n, "x"))
        for m in range(1, max_points + 1):
            Y = discrete_space(_labels(m, "y"))
            for f in all_admissible(X, Y):
                yield glue_one_sided(X, Y, f)


def all_diagrams(max_points: int = EXHAUSTIVE_POINTS) -> Iterator[SumDiagram]:
    """One- and two-object diagrams of one-sided glueings whose totals have at most max_points points.

    Two-object diagrams come without arrows and with every continuous a -> b
    the diagram accepts.
    """
    for n in range(1, max_points):
        for X in all_spaces(n, "x"):
            firsts = list(all_one_sided(X, max_points - n, "a"))
            seconds = list(all_one_sided(X, max_points - n, "b"))
            for A in firsts:
                yield make_diagram(X, {"a": A}, {})
            for A in firsts:
                for B in seconds:
                    yield make_diagram(X, {"a": A, "b": B}, {})
                    for phi in all_continuous(A.right, B.right):
                        try:
                            d = make_diagram(X, {"a": A, "b": B}, {("a", "b"): phi})
                        except DiagramError:
                            continue
                        yield d


def generative_family(cs: CoarseStructure, cap: int = GENERATIVE_CAP) -> Set[int]:
    """Every relation reachable from the generators and the diagonal under ∪, ∘ and ⁻¹."""
    n = cs.n
    seen = set(cs.generators) | {diagonal(n)}
    frontier = list(seen)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(seen):
                for c in (a | b, compose(a, b, n), compose(b, a, n), inverse(a, n)):
                    if c not in seen:
                        seen.add(c)
                        fresh.append(c)
                        if len(seen) > cap:
                            raise OracleRefusal(f"generative closure exceeds {cap} relations")
        frontier = fresh
    return seen


def generative_controlled(cs: CoarseStructure, e: int, cap: int = GENERATIVE_CAP) -> bool:
    """Membership read straight off the definition, no antichain involved."""
    return any(not (e & ~s) for s in generative_family(cs, cap))


# ---------- law runner ----------
def _no_shrink(case: Any) -> Iterable[Any]:
    return ()


def _plain(case: Any) -> Dict[str, Any]:
    return {"case": repr(case)}


@dataclass(frozen=True)
class Law:
    law_id: str
    suite: str
    draw: Callable[[SplitMix64], Any]
    holds: Callable[[Any], bool]
    shrink: Callable[[Any], Iterable[Any]] = _no_shrink
    describe: Callable[[Any], Dict[str, Any]] = _plain
    enumerate: Optional[Callable[[], Iterable[Any]]] = None


@dataclass(frozen=True)
class Failure:
    law_id: str
    seed: Optional[int]
    index: int
    counterexample: Dict[str, Any]
    shrink_steps: int
    error: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {"law": self.law_id, "seed": self.seed, "index": self.index,
               "counterexample": self.counterexample, "shrink_steps": self.shrink_steps}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class LawReport:
    suite: str
    trials: int
    seed: int
    laws: List[str] = field(default_factory=list)
    cases: int = 0
    failures: List[Failure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {"suite": self.suite, "trials": self.trials, "seed": self.seed, "laws": self.laws,
                "cases": self.cases, "passed": self.passed, "failures": [f.to_dict() for f in self.failures]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _verdict(law: Law, case: Any) -> Tuple[bool, Optional[Dict[str, Any]]]:
    """(fails, error report); an engine error while checking counts as a failure."""
    try:
        return (not law.holds(case)), None
    except GlueError as e:
        return True, e.report()


def minimize(law: Law, case: Any) -> Tuple[Any, int]:
    """Greedy shrink: take the first smaller candidate that still fails, until none does."""
    steps = 0
    progress = True
    while progress and steps < MAX_SHRINK_STEPS:
        progress = False
        for smaller in law.shrink(case):
            steps += 1
            if _verdict(law, smaller)[0]:
                case, progress = smaller, True
                break
            if steps >= MAX_SHRINK_STEPS:
                break
    return case, steps


def replay(law: Law, seed: int) -> Any:
    return law.draw(SplitMix64(seed))


def _scan_trial(law: Law, seed: int, trial: int) -> Optional[Tuple[int, int, Any]]:
    s = trial_seed(seed, law.law_id, trial)
    case = replay(law, s)
    return (trial, s, case) if _verdict(law, case)[0] else None


def _scan_enumeration(law: Law) -> List[Tuple[int, Optional[int], Any]]:
    out = []
    for k, case in enumerate(law.enumerate()):
        if _verdict(law, case)[0]:
            out.append((k, None, case))
            if len(out) >= FAILURES_PER_LAW:
                break
    return out


def _settle(law: Law, hit: Tuple[int, Optional[int], Any]) -> Failure:
    index, s, case = hit
    small, steps = minimize(law, case)
    _, error = _verdict(law, small)
    failure = Failure(law.law_id, s, index, law.describe(small), steps, error)
    logging.info(json.dumps({"event": "laws.trial.failed", "law": law.law_id, "seed": s, "index": index,
                             "shrink_steps": steps}))
    return failure


def run_laws(suite: str, trials: int, seed: int, jobs: int = 1) -> LawReport:
    """Run every law of the suite; equal (suite, trials, seed) give byte-identical reports whatever jobs is."""
    from services.laws import suite_laws

    laws = suite_laws(suite)
    report = LawReport(suite, trials, seed & MASK64, [law.law_id for law in laws])
    if trials <= 0:
        return report

    random_laws = [law for law in laws if law.enumerate is None]
    tasks = [(law, t) for law in random_laws for t in range(trials)]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        scanned = list(pool.map(lambda lt: _scan_trial(lt[0], report.seed, lt[1]), tasks))
        enumerated = list(pool.map(_scan_enumeration, [law for law in laws if law.enumerate is not None]))

    hits: Dict[str, List[Tuple[int, Optional[int], Any]]] = {law.law_id: [] for law in laws}
    for (law, _), hit in zip(tasks, scanned):
        if hit is not None and len(hits[law.law_id]) < FAILURES_PER_LAW:
            hits[law.law_id].append(hit)
    for law, found in zip([law for law in laws if law.enumerate is not None], enumerated):
        hits[law.law_id] = found

    report.cases = len(tasks) + sum(1 for law in laws if law.enumerate is not None)
    by_id = {law.law_id: law for law in laws}
    pending = [(by_id[lid], hit) for lid in sorted(hits) for hit in hits[lid]]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        report.failures = list(pool.map(lambda lh: _settle(lh[0], lh[1]), pending))

    logging.info(json.dumps({"event": "laws.report", "suite": suite, "trials": trials, "seed": report.seed,
                             "laws": len(laws), "failures": len(report.failures)}))
    return report
