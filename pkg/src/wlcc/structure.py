"""Structure of configurations with fibers of size at most 4.

Cells and interspaces are tagged by the finite taxonomy of small coherent
configurations.  On top of that sit determined matchings, direct/skewed
connections, the fiber graph and the hypergraph of direct connections.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, List, Tuple

from .core import CoherentConfiguration, InternalError, PreconditionError, restrict


class CellTag(str, Enum):
    TRIVIAL1 = "Trivial1"
    PAIR2 = "Pair2"
    K3 = "K3"
    DIRC3 = "DirC3"
    K4 = "K4"
    F4 = "F4"
    C4 = "C4"
    DIRC4 = "DirC4"


class InterspaceTag(str, Enum):
    UNIFORM = "Uniform"
    MATCH2X2 = "Match2x2"
    TWO_OF_3X3_A = "TwoOf3x3a"  # matching plus its complement
    TWO_OF_3X3_B = "TwoOf3x3b"  # three matchings
    TWO_K12 = "TwoK12"
    FOUR_K11 = "FourK11"
    TWO_K22 = "TwoK22"
    C8 = "C8"
    THREE_4X4_A = "Three4x4a"  # valency-2 class is two 4-cycles
    THREE_4X4_B = "Three4x4b"  # valency-2 class is an 8-cycle
    FOUR_4X4_A = "Four4x4a"  # every two matchings span two 4-cycles
    FOUR_4X4_B = "Four4x4b"  # some two matchings span an 8-cycle


@dataclass(frozen=True)
class InterspaceClass:
    tag: InterspaceTag
    contains_matching: bool


@dataclass(frozen=True)
class MatchingRef:
    fiber: int
    cls: int


class Connection(str, Enum):
    DIRECT = "Direct"
    SKEWED = "Skewed"


class Reason(str, Enum):
    IRREDUNDANT = "irredundant"
    EMPTY = "empty"
    FIBER_SIZE_1 = "fiber size 1"
    FIBER_SIZE_2 = "fiber size 2"
    FIBER_SIZE_3 = "fiber size 3"
    MATCHING = "matching interspace"
    C8 = "C8 interspace"
    DECOMPOSABLE = "decomposable"


@dataclass(frozen=True)
class FiberGraph:
    nfibers: int
    edges: Tuple[Tuple[int, int], ...]  # x < y, sorted

    def neighbors(self, x: int) -> List[int]:
        return sorted([b for a, b in self.edges if a == x] + [a for a, b in self.edges if b == x])

    def components(self) -> List[List[int]]:
        parent = list(range(self.nfibers))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        comps: Dict[int, List[int]] = {}
        for x in range(self.nfibers):
            comps.setdefault(find(x), []).append(x)
        return sorted(comps.values())


@dataclass(frozen=True)
class DccHypergraph:
    hyperedges: Tuple[Tuple[int, ...], ...]
    incidence: Tuple[Tuple[Tuple[int, int], ...], ...]  # fiber -> ((hyperedge, matching class), ...)
    edge_owner: Dict[Tuple[int, int], int]

    def degree(self, x: int) -> int:
        return len(self.incidence[x])


def _components_of(points, pairs) -> int:
    parent = {p: p for p in points}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(p) for p in points})


def classify_cell(c: CoherentConfiguration, x: int) -> CellTag:
    size = c.fiber_size(x)
    if size > 4:
        raise PreconditionError(f"fiber of size {size} is outside the taxonomy")
    rels = [r for r in c.cell(x) if not c.reflexive[r]]
    symmetric = all(c.transpose[r] == r for r in rels)
    if size == 1:
        return CellTag.TRIVIAL1
    if size == 2:
        return CellTag.PAIR2
    if size == 3:
        return CellTag.K3 if len(rels) == 1 else CellTag.DIRC3
    if len(rels) == 1:
        return CellTag.K4
    if len(rels) == 2:
        return CellTag.C4
    if len(rels) == 3:
        return CellTag.F4 if symmetric else CellTag.DIRC4
    raise InternalError(f"unexpected 4-point cell with {len(rels)} irreflexive classes")


def _class_components(c: CoherentConfiguration, rels) -> int:
    pts = set()
    pairs = []
    for r in rels:
        for u, v in c.pairs(r):
            pts.add(u)
            pts.add(v)
            pairs.append((u, v))
    return _components_of(pts, pairs)


def classify_interspace(c: CoherentConfiguration, x: int, y: int) -> InterspaceClass:
    if x == y:
        raise PreconditionError("interspace needs two distinct fibers")
    key = ("interspace", x, y)
    hit = c._cache.get(key)
    if hit is not None:
        return hit
    out = _classify_interspace(c, x, y)
    c._cache[key] = out
    return out


def _classify_interspace(c: CoherentConfiguration, x: int, y: int) -> InterspaceClass:
    a, b = c.fiber_size(x), c.fiber_size(y)
    if a > 4 or b > 4:
        raise PreconditionError("fiber larger than 4 points")
    rels = c.block(x, y)
    val = c.valency
    tr = c.transpose
    has_matching = any(val[r] == 1 and val[tr[r]] == 1 for r in rels)
    T = InterspaceTag
    if len(rels) == 1:
        return InterspaceClass(T.UNIFORM, has_matching)
    sizes = tuple(sorted((a, b)))
    nrel = len(rels)
    if sizes == (2, 2) and nrel == 2:
        return InterspaceClass(T.MATCH2X2, has_matching)
    if sizes == (3, 3):
        if nrel == 2:
            return InterspaceClass(T.TWO_OF_3X3_A, has_matching)
        if nrel == 3:
            return InterspaceClass(T.TWO_OF_3X3_B, has_matching)
    if sizes == (2, 4) and nrel == 2:
        return InterspaceClass(T.TWO_K12, has_matching)
    if sizes == (4, 4):
        vals = sorted(int(val[r]) for r in rels)
        if vals == [1, 3]:
            return InterspaceClass(T.FOUR_K11, has_matching)
        if vals == [2, 2]:
            comps = _class_components(c, [rels[0]])
            if comps == 2:
                return InterspaceClass(T.TWO_K22, has_matching)
            if comps == 1:
                return InterspaceClass(T.C8, has_matching)
        if vals == [1, 1, 2]:
            two = [r for r in rels if val[r] == 2][0]
            comps = _class_components(c, [two])
            return InterspaceClass(T.THREE_4X4_A if comps == 2 else T.THREE_4X4_B, has_matching)
        if vals == [1, 1, 1, 1]:
            eight = any(_class_components(c, [r, s]) == 1 for r, s in combinations(rels, 2))
            return InterspaceClass(T.FOUR_4X4_B if eight else T.FOUR_4X4_A, has_matching)
    raise InternalError(f"interspace {x},{y} of sizes {a}x{b} with {nrel} classes is outside the taxonomy")


_DETERMINING = (InterspaceTag.TWO_K12, InterspaceTag.TWO_K22, InterspaceTag.C8)


def determined_matching(c: CoherentConfiguration, r: int) -> MatchingRef:
    """The matching that the interspace of class r determines at r's target fiber."""
    x, y = int(c.rel_src[r]), int(c.rel_dst[r])
    if x == y:
        raise PreconditionError("class lies inside a cell")
    tag = classify_interspace(c, x, y).tag
    if tag not in _DETERMINING or c.fiber_size(y) != 4:
        raise PreconditionError(f"interspace of type {tag.value} determines no matching at this side")
    col = c.colors
    ys = c.fibers[y]
    nb = {v: frozenset(u for u in c.fibers[x] if col[u, v] == r) for v in ys}
    if tag is InterspaceTag.C8:
        pairs = [(v, w) for v, w in combinations(ys, 2) if not (nb[v] & nb[w])]
    else:
        pairs = [(v, w) for v, w in combinations(ys, 2) if nb[v] == nb[w]]
    classes = {int(col[v, w]) for v, w in pairs} | {int(col[w, v]) for v, w in pairs}
    if len(pairs) != 2 or len(classes) != 1:
        raise InternalError("determined pairs do not form a matching class")
    m = classes.pop()
    if c.transpose[m] != m or c.valency[m] != 1:
        raise InternalError("determined class is not a matching")
    return MatchingRef(y, m)


def matching_at(c: CoherentConfiguration, x: int, y: int) -> MatchingRef:
    """Matching at fiber y determined by the interspace between x and y."""
    key = ("matching_at", x, y)
    hit = c._cache.get(key)
    if hit is None:
        hit = determined_matching(c, c.block(x, y)[0])
        c._cache[key] = hit
    return hit


def connection_kind(c: CoherentConfiguration, x: int, y: int, z: int) -> Connection:
    m1 = matching_at(c, x, y)
    m2 = matching_at(c, z, y)
    return Connection.DIRECT if m1 == m2 else Connection.SKEWED


def fiber_graph(c: CoherentConfiguration) -> FiberGraph:
    hit = c._cache.get("fiber_graph")
    if hit is None:
        f = c.nfibers
        edges = tuple((x, y) for x in range(f) for y in range(x + 1, f) if len(c.block(x, y)) > 1)
        hit = FiberGraph(f, edges)
        c._cache["fiber_graph"] = hit
    return hit


def decompose_direct_sum(c: CoherentConfiguration) -> List[CoherentConfiguration]:
    comps = fiber_graph(c).components()
    if len(comps) == 1:
        return [c]
    return [restrict(c, comp) for comp in comps]


def is_irredundant(c: CoherentConfiguration) -> Tuple[bool, Reason]:
    if c.nfibers == 0:
        return False, Reason.EMPTY
    for x in range(c.nfibers):
        s = c.fiber_size(x)
        if s < 4:
            return False, Reason("fiber size %d" % s)
        if s > 4:
            raise PreconditionError(f"fiber of size {s}")
    fg = fiber_graph(c)
    tags = [classify_interspace(c, x, y) for x, y in fg.edges]
    if any(t.contains_matching for t in tags):
        return False, Reason.MATCHING
    if any(t.tag is InterspaceTag.C8 for t in tags):
        return False, Reason.C8
    if len(fg.components()) > 1:
        return False, Reason.DECOMPOSABLE
    if any(t.tag is not InterspaceTag.TWO_K22 for t in tags):
        raise InternalError("unexpected interspace type in matching-free 4-fiber configuration")
    return True, Reason.IRREDUNDANT


def require_irredundant(c: CoherentConfiguration) -> None:
    ok, why = is_irredundant(c)
    if not ok:
        raise PreconditionError(f"configuration is not irredundant: {why.value}")


def dcc(c: CoherentConfiguration) -> DccHypergraph:
    """Hypergraph of direct connections of an irredundant configuration."""
    hit = c._cache.get("dcc")
    if hit is not None:
        return hit
    require_irredundant(c)
    fg = fiber_graph(c)
    edges = fg.edges
    index = {e: i for i, e in enumerate(edges)}
    parent = list(range(len(edges)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    first_by_key: Dict[Tuple[int, int], int] = {}
    for (x, y), i in index.items():
        for here, there in ((x, y), (y, x)):
            key = (here, matching_at(c, there, here).cls)
            j = first_by_key.setdefault(key, i)
            ra, rb = find(i), find(j)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: Dict[int, List[Tuple[int, int]]] = {}
    for e, i in index.items():
        groups.setdefault(find(i), []).append(e)
    hyper = sorted(tuple(sorted({v for e in es for v in e})) for es in groups.values())
    hidx = {h: i for i, h in enumerate(hyper)}
    owner: Dict[Tuple[int, int], int] = {}
    for es in groups.values():
        h = hidx[tuple(sorted({v for e in es for v in e}))]
        for e in es:
            owner[e] = h
    inc: List[List[Tuple[int, int]]] = [[] for _ in range(c.nfibers)]
    for h, members in enumerate(hyper):
        for x in members:
            other = members[0] if members[0] != x else members[1]
            inc[x].append((h, matching_at(c, other, x).cls))
    out = DccHypergraph(tuple(hyper), tuple(tuple(v) for v in inc), owner)
    _check_dcc(c, out)
    c._cache["dcc"] = out
    return out


def _check_dcc(c: CoherentConfiguration, d: DccHypergraph) -> None:
    for h, members in enumerate(d.hyperedges):
        for a, b in combinations(members, 2):
            if d.edge_owner.get((a, b)) != h:
                raise InternalError(f"hyperedge {members} is not a clique of its own edges")
        for z in members:
            ms = {matching_at(c, w, z).cls for w in members if w != z}
            if len(ms) != 1:
                raise InternalError(f"hyperedge {members} is not directly connected at fiber {z}")
    for h1, h2 in combinations(d.hyperedges, 2):
        if len(set(h1) & set(h2)) > 1:
            raise InternalError("two hyperedges share more than one fiber")
    for x, inc in enumerate(d.incidence):
        if len(inc) > 3:
            raise InternalError(f"fiber {x} lies on more than three hyperedges")
        if len({m for _, m in inc}) != len(inc):
            raise InternalError(f"fiber {x} uses one matching for two hyperedges")
