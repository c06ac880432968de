"""Instance families: partial linear spaces and the configurations built on them."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import CoherentConfiguration, InvalidInput, PreconditionError, rerank, verify_coherence

# The three perfect matchings of a 4-set, named M, N, L in this order.
MATCHINGS: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...] = (
    ((0, 1), (2, 3)),
    ((0, 2), (1, 3)),
    ((0, 3), (1, 2)),
)
MATCHING_NAMES = ("M", "N", "L")


@dataclass(frozen=True)
class PartialLinearSpace:
    npoints: int
    lines: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(tuple(int(p) for p in ln) for ln in self.lines))

    def degree(self, p: int) -> int:
        return sum(1 for ln in self.lines if p in ln)

    def lines_through(self, p: int) -> List[int]:
        return [i for i, ln in enumerate(self.lines) if p in ln]


def pls_problems(d: PartialLinearSpace, max_degree: Optional[int] = 3) -> List[str]:
    out = []
    for i, ln in enumerate(d.lines):
        if len(ln) < 2:
            out.append(f"line {i} has fewer than 2 points")
        if len(set(ln)) != len(ln):
            out.append(f"line {i} repeats a point")
        if any(not 0 <= p < d.npoints for p in ln):
            out.append(f"line {i} has a point out of range")
    if out:
        return out
    for i, j in combinations(range(len(d.lines)), 2):
        if len(set(d.lines[i]) & set(d.lines[j])) > 1:
            out.append(f"lines {i} and {j} share more than one point")
    for p in range(d.npoints):
        deg = d.degree(p)
        if deg == 0 and d.npoints > 1:
            out.append(f"point {p} lies on no line")
        if max_degree is not None and deg > max_degree:
            out.append(f"point {p} has degree {deg} > {max_degree}")
    parent = list(range(d.npoints))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for ln in d.lines:
        for p in ln[1:]:
            parent[find(p)] = find(ln[0])
    if d.npoints and len({find(p) for p in range(d.npoints)}) != 1:
        out.append("incidence graph is disconnected")
    return out


def validate_pls(d: PartialLinearSpace, max_degree: Optional[int] = 3) -> None:
    probs = pls_problems(d, max_degree)
    if probs:
        raise InvalidInput("invalid partial linear space: " + "; ".join(probs))


def _cell_relations(kind: str) -> Dict[Tuple[int, int], str]:
    """Local 4-point cell as a map (a, b) -> relation name."""
    rel: Dict[Tuple[int, int], str] = {(a, a): "diag" for a in range(4)}
    if kind == "F4":
        for name, m in zip(MATCHING_NAMES, MATCHINGS):
            for a, b in m:
                rel[a, b] = rel[b, a] = name
    elif kind == "C4":
        for a, b in MATCHINGS[0]:
            rel[a, b] = rel[b, a] = "M"
        for m in MATCHINGS[1:]:
            for a, b in m:
                rel[a, b] = rel[b, a] = "cycle"
    elif kind == "DirC4":
        for a, b in MATCHINGS[0]:
            rel[a, b] = rel[b, a] = "M"
        cyc = (0, 2, 1, 3)
        for i in range(4):
            a, b = cyc[i], cyc[(i + 1) % 4]
            rel[a, b] = "fwd"
            rel[b, a] = "bwd"
    else:
        raise PreconditionError(f"unknown cell choice {kind!r}")
    return rel


def pls_to_config(d: PartialLinearSpace, cell_choice: Optional[Dict[int, str]] = None) -> CoherentConfiguration:
    """One F4 fiber per point; 2K22 interspaces along lines; uniform elsewhere.

    ``cell_choice`` may map points of degree <= 1 to "C4" or "DirC4".
    """
    validate_pls(d)
    cell_choice = dict(cell_choice or {})
    npts = d.npoints
    slot: Dict[Tuple[int, int], int] = {}  # (point, line) -> matching index
    for p in range(npts):
        for j, li in enumerate(d.lines_through(p)):
            slot[p, li] = j
    for p, kind in cell_choice.items():
        if kind != "F4" and d.degree(p) > 1:
            raise PreconditionError(f"cell choice {kind} needs a degree-1 point, point {p} has degree {d.degree(p)}")
    line_of: Dict[Tuple[int, int], int] = {}
    for li, ln in enumerate(d.lines):
        for p, q in combinations(ln, 2):
            line_of[p, q] = line_of[q, p] = li
    ids: Dict[tuple, int] = {}
    n = 4 * npts
    raw = np.empty((n, n), dtype=np.int64)
    cells = {p: _cell_relations(cell_choice.get(p, "F4")) for p in range(npts)}
    for p in range(npts):
        for q in range(npts):
            if p == q:
                for a in range(4):
                    for b in range(4):
                        raw[4 * p + a, 4 * p + b] = ids.setdefault(("cell", p, cells[p][a, b]), len(ids))
                continue
            li = line_of.get((p, q))
            if li is None:
                cid = ids.setdefault(("uni", p, q), len(ids))
                raw[4 * p:4 * p + 4, 4 * q:4 * q + 4] = cid
                continue
            mp = MATCHINGS[slot[p, li]]
            mq = MATCHINGS[slot[q, li]]
            side_p = {a: i for i, pr in enumerate(mp) for a in pr}
            side_q = {b: i for i, pr in enumerate(mq) for b in pr}
            for a in range(4):
                for b in range(4):
                    same = side_p[a] == side_q[b]
                    raw[4 * p + a, 4 * q + b] = ids.setdefault(("k22", p, q, same), len(ids))
    return verify_coherence(raw)


def skew_config(n: int, edges: Sequence[Tuple[int, int]], cell_choice=None) -> CoherentConfiguration:
    """Skew-connected configuration over a simple graph with max degree 3."""
    es = [tuple(sorted(e)) for e in edges]
    if len(set(es)) != len(es) or any(a == b for a, b in es):
        raise InvalidInput("graph must be simple")
    return pls_to_config(PartialLinearSpace(n, tuple(es)), cell_choice)


def cyclic_pls(n: int, base: Tuple[int, int, int] = (0, 2, 3)) -> PartialLinearSpace:
    """Lines {i+b for b in base} mod n, for i = 0..n-1."""
    if n < 7:
        raise PreconditionError("cyclic (n_3) configurations need n >= 7")
    d = PartialLinearSpace(n, tuple(tuple((i + b) % n for b in base) for i in range(n)))
    validate_pls(d)
    return d


def fano() -> PartialLinearSpace:
    return cyclic_pls(7)


def mobius_kantor() -> PartialLinearSpace:
    return cyclic_pls(8)


PAPPUS_LINES_1BASED = (
    (1, 2, 3), (4, 5, 6), (7, 8, 9), (1, 5, 9), (3, 5, 7),
    (1, 4, 8), (2, 4, 7), (2, 6, 9), (3, 6, 8),
)


def pappus() -> PartialLinearSpace:
    d = PartialLinearSpace(9, tuple(tuple(p - 1 for p in ln) for ln in PAPPUS_LINES_1BASED))
    validate_pls(d)
    return d


K4_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def t16() -> CoherentConfiguration:
    return skew_config(4, K4_EDGES)


def two_triangles_pls() -> PartialLinearSpace:
    lines = ((1, 2, 3), (4, 5, 6), (1, 4), (2, 4), (2, 6), (3, 6), (3, 5), (1, 5))
    return PartialLinearSpace(6, tuple(tuple(p - 1 for p in ln) for ln in lines))


def mixed_pls() -> PartialLinearSpace:
    lines = ((1, 2, 3), (4, 5, 6), (7, 8, 9),
             (1, 4), (2, 5), (3, 6), (4, 7), (5, 8), (6, 9), (7, 1), (8, 2), (9, 3))
    return PartialLinearSpace(9, tuple(tuple(p - 1 for p in ln) for ln in lines))


def example_two_triangles() -> CoherentConfiguration:
    return pls_to_config(two_triangles_pls())


def example_mixed() -> CoherentConfiguration:
    return pls_to_config(mixed_pls())


# -- small graphs -------------------------------------------------------------

def path_graph(n: int) -> Tuple[int, List[Tuple[int, int]]]:
    return n, [(i, i + 1) for i in range(n - 1)]


def cycle_graph(n: int) -> Tuple[int, List[Tuple[int, int]]]:
    return n, [(i, (i + 1) % n) for i in range(n)]


def complete_graph(n: int) -> Tuple[int, List[Tuple[int, int]]]:
    return n, list(combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Tuple[int, List[Tuple[int, int]]]:
    return a + b, [(i, a + j) for i in range(a) for j in range(b)]


def generalized_petersen(n: int, k: int) -> Tuple[int, List[Tuple[int, int]]]:
    outer = [(i, (i + 1) % n) for i in range(n)]
    spokes = [(i, n + i) for i in range(n)]
    inner = {tuple(sorted((n + i, n + (i + k) % n))) for i in range(n)}
    return 2 * n, outer + spokes + sorted(inner)


def petersen_graph():
    return generalized_petersen(5, 2)


def mobius_kantor_graph():
    return generalized_petersen(8, 3)


# -- text formats ---------------------------------------------------------------

def loads_pls(text: str) -> PartialLinearSpace:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines or lines[0][0] != "pls" or len(lines[0]) != 3:
        raise InvalidInput("first line must be 'pls <npoints> <nlines>'")
    try:
        npts, nl = int(lines[0][1]), int(lines[0][2])
        body = [tuple(int(t) for t in ln) for ln in lines[1:]]
    except ValueError:
        raise InvalidInput("non-integer token in .pls input") from None
    if len(body) != nl:
        raise InvalidInput(f"expected {nl} lines, found {len(body)}")
    return PartialLinearSpace(npts, tuple(body))


def dumps_pls(d: PartialLinearSpace) -> str:
    out = [f"pls {d.npoints} {len(d.lines)}"]
    out.extend(" ".join(map(str, ln)) for ln in d.lines)
    return "\n".join(out) + "\n"


def loads_edge_list(text: str) -> Tuple[int, List[Tuple[int, int]]]:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not rows or rows[0][0] != "graph" or len(rows[0]) != 2:
        raise InvalidInput("first line must be 'graph <n>'")
    try:
        n = int(rows[0][1])
        edges = []
        for r in rows[1:]:
            if r[0] != "e" or len(r) != 3:
                raise InvalidInput(f"bad edge line {' '.join(r)!r}")
            edges.append((int(r[1]), int(r[2])))
    except ValueError:
        raise InvalidInput("non-integer token in edge list") from None
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise InvalidInput(f"edge ({a},{b}) out of range")
    return n, edges


def dumps_edge_list(n: int, edges) -> str:
    return "\n".join([f"graph {n}"] + [f"e {a} {b}" for a, b in edges]) + "\n"


def read_pls(path) -> PartialLinearSpace:
    return loads_pls(Path(path).read_text())


def graph_problems(n: int, edges) -> List[str]:
    out = []
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    if n and max(deg) > 3:
        out.append(f"maximum degree {max(deg)} > 3")
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    if n and len({find(v) for v in range(n)}) != 1:
        out.append("graph is disconnected")
    return out


def hypergraph_isomorphic(a: PartialLinearSpace, b: PartialLinearSpace) -> bool:
    """Backtracking search for a point bijection mapping lines onto lines."""
    if a.npoints != b.npoints or sorted(map(len, a.lines)) != sorted(map(len, b.lines)):
        return False
    n = a.npoints
    la = [frozenset(ln) for ln in a.lines]
    lb = {frozenset(ln) for ln in b.lines}
    if len(lb) != len(la):
        return False
    prof_a = [sorted(len(ln) for ln in la if p in ln) for p in range(n)]
    prof_b = [sorted(len(ln) for ln in lb if p in ln) for p in range(n)]
    img = [-1] * n
    used = [False] * n

    def ok(upto):
        mapped = set(range(upto))
        for ln in la:
            if ln <= mapped and frozenset(img[p] for p in ln) not in lb:
                return False
        return True

    def rec(i):
        if i == n:
            return True
        for q in range(n):
            if not used[q] and prof_a[i] == prof_b[q]:
                img[i] = q
                used[q] = True
                if ok(i + 1) and rec(i + 1):
                    return True
                used[q] = False
        img[i] = -1
        return False

    return rec(0)


def dcc_as_pls(c: CoherentConfiguration) -> PartialLinearSpace:
    from .structure import dcc

    return PartialLinearSpace(c.nfibers, dcc(c).hyperedges)


# -- composition -------------------------------------------------------------------

def c8_pair_config() -> CoherentConfiguration:
    """Two 4-point fibers joined by an 8-cycle x0 y0 x1 y1 x2 y2 x3 y3.

    Both cells are C4 whose diagonal matching pairs antipodal points.
    """
    raw = np.empty((8, 8), dtype=np.int64)
    for a in range(4):
        for b in range(4):
            d = (b - a) % 4
            cell = 0 if d == 0 else (1 if d == 2 else 2)
            raw[a, b] = cell
            raw[4 + a, 4 + b] = 3 + cell
            on_cycle = (b - a) % 4 in (0, 3)  # x_a ~ y_a and x_a ~ y_{a-1}
            raw[a, 4 + b] = 6 + on_cycle
            raw[4 + b, a] = 8 + on_cycle
    return verify_coherence(raw)


def c8_with_pendant() -> CoherentConfiguration:
    """C8 pair plus a third fiber hanging off the second one by 2K22.

    The 2K22 determines the antipodal matching of the second fiber and
    leaves the first fiber uniform to the third.
    """
    base = c8_pair_config().colors
    k = int(base.max()) + 1
    raw = np.empty((12, 12), dtype=np.int64)
    raw[:8, :8] = base
    half = {0: 0, 1: 1, 2: 0, 3: 1}  # antipodal classes of the second fiber
    zhalf = {0: 0, 1: 0, 2: 1, 3: 1}
    for a in range(4):
        for b in range(4):
            raw[8 + a, 8 + b] = k + (a ^ b)  # F4 whose M-matching is the zhalf split
            same = zhalf[a] == half[b]
            raw[8 + a, 4 + b] = k + 4 + same
            raw[4 + b, 8 + a] = k + 6 + same
            raw[8 + a, b] = k + 8
            raw[b, 8 + a] = k + 9
    return verify_coherence(raw)


def direct_sum(*parts: CoherentConfiguration) -> CoherentConfiguration:
    """Union with all interspaces between different parts uniform."""
    n = sum(p.n for p in parts)
    raw = np.empty((n, n), dtype=np.int64)
    fib_id = np.empty(n, dtype=np.int64)
    off = 0
    nextc = 0
    fcount = 0
    for p in parts:
        raw[off:off + p.n, off:off + p.n] = p.colors + nextc
        nextc += p.k
        fib_id[off:off + p.n] = np.asarray(p.fiber_of) + fcount
        fcount += p.nfibers
        off += p.n
    starts = np.cumsum([0] + [p.n for p in parts])
    for i in range(len(parts)):
        for j in range(len(parts)):
            if i == j:
                continue
            a = slice(starts[i], starts[i + 1])
            b = slice(starts[j], starts[j + 1])
            raw[a, b] = nextc + fib_id[a][:, None] * fcount + fib_id[b][None, :]
    return verify_coherence(rerank(raw))


def double_fiber(c: CoherentConfiguration, x: int) -> CoherentConfiguration:
    """Add a copy of fiber x, linked to the original by a bijection.

    This is the restriction of the product of c with the discrete 2-point
    configuration to the points (v, 0) and (u, 1) for u in x, so it is
    coherent and the new fiber meets x in a matching-containing interspace.
    """
    pts = list(range(c.n)) + list(c.fibers[x])
    layer = [0] * c.n + [1] * len(c.fibers[x])
    m = len(pts)
    raw = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            raw[i, j] = c.colors[pts[i], pts[j]] * 4 + 2 * layer[i] + layer[j]
    return verify_coherence(rerank(raw))


def random_pls(rng, npoints: int, tries: int = 200) -> PartialLinearSpace:
    """A random connected partial linear space with lines of size 2 or 3 and degrees <= 3."""
    for _ in range(tries):
        lines: List[Tuple[int, ...]] = []
        deg = [0] * npoints
        covered = set()
        for _ in range(4 * npoints):
            size = 3 if npoints >= 3 and rng.random() < 0.35 else 2
            free = [p for p in range(npoints) if deg[p] < 3]
            if len(free) < size:
                break
            ln = tuple(sorted(rng.sample(free, size)))
            if any(len(set(ln) & set(o)) > 1 for o in lines):
                continue
            lines.append(ln)
            for p in ln:
                deg[p] += 1
            covered.update(combinations(ln, 2))
            d = PartialLinearSpace(npoints, tuple(lines))
            if not pls_problems(d) and rng.random() < 0.3:
                return d
        d = PartialLinearSpace(npoints, tuple(lines))
        if not pls_problems(d):
            return d
    raise PreconditionError(f"no random partial linear space found on {npoints} points")


def random_irredundant(rng, max_fibers: int = 5) -> CoherentConfiguration:
    """pls_to_config of a random space, with random cells on points of degree <= 1."""
    npts = rng.randint(1, max_fibers)
    d = random_pls(rng, npts) if npts > 1 else PartialLinearSpace(1, ())
    cells = {p: rng.choice(["F4", "C4", "DirC4"]) for p in range(npts) if d.degree(p) <= 1}
    return pls_to_config(d, cells)
