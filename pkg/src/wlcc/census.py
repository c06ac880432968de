"""Non-amenable colored graphs on 16 vertices.

Every such graph lives on the 16-point configuration over K4.  A graph is
encoded by a black/white coloring of the truncated tetrahedron: the
vertices of triangle i are the three matchings of fiber i (corner j is the
matching determined by the interspace to the j-th other fiber), and a
vertex is black when the graph covers that matching inside the fiber.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, permutations
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .closure import wl2_equivalent
from .core import ColoredSquareMatrix, InternalError, write_ccm
from .generators import t16
from .oracle import graph_iso
from .structure import matching_at


def polya_count(ncolors: int) -> int:
    n = ncolors
    total = n ** 12 + 6 * n ** 7 + 3 * n ** 6 + 8 * n ** 4 + 6 * n ** 3
    assert total % 24 == 0
    return total // 24


def other_fiber(i: int, j: int) -> int:
    """The fiber that corner j of triangle i points to."""
    return [k for k in range(4) if k != i][j]


def corner_of(i: int, k: int) -> int:
    return [x for x in range(4) if x != i].index(k)


def vertex(i: int, j: int) -> int:
    return 3 * i + j


def tetra_edges() -> List[Tuple[int, int]]:
    """Triangle edges plus the six cross edges (i, k) -- (k, i)."""
    edges = []
    for i in range(4):
        edges += [(vertex(i, a), vertex(i, b)) for a, b in combinations(range(3), 2)]
    for i, k in combinations(range(4), 2):
        edges.append((vertex(i, corner_of(i, k)), vertex(k, corner_of(k, i))))
    return edges


def tetra_automorphisms() -> List[Tuple[int, ...]]:
    """Aut(T) as 24 vertex permutations, one per permutation of the fibers."""
    out = []
    for s in permutations(range(4)):
        img = [0] * 12
        for i in range(4):
            for j in range(3):
                k = other_fiber(i, j)
                img[vertex(i, j)] = vertex(s[i], corner_of(s[i], s[k]))
        out.append(tuple(img))
    return out


def cycle_count(perm: Sequence[int]) -> int:
    seen = set()
    cycles = 0
    for start in range(len(perm)):
        if start in seen:
            continue
        cycles += 1
        v = start
        while v not in seen:
            seen.add(v)
            v = perm[v]
    return cycles


@dataclass(frozen=True)
class TetraColoring:
    bits: Tuple[bool, ...]  # index 3*triangle + corner; True = black

    def __post_init__(self):
        if len(self.bits) != 12:
            raise ValueError("a coloring has 12 entries")
        object.__setattr__(self, "bits", tuple(bool(b) for b in self.bits))

    @classmethod
    def from_int(cls, mask: int) -> "TetraColoring":
        return cls(tuple(bool(mask >> (11 - v) & 1) for v in range(12)))

    def __str__(self) -> str:
        return "".join("B" if b else "W" for b in self.bits)

    def act(self, perm: Sequence[int]) -> "TetraColoring":
        out = [False] * 12
        for v, b in enumerate(self.bits):
            out[perm[v]] = b
        return TetraColoring(tuple(out))


def canonical(t: TetraColoring, autos=None) -> TetraColoring:
    autos = autos or tetra_automorphisms()
    return min((t.act(p) for p in autos), key=lambda s: s.bits)


def enumerate_coloring_orbits() -> List[TetraColoring]:
    autos = tetra_automorphisms()
    reps = set()
    for mask in range(1 << 12):
        reps.add(canonical(TetraColoring.from_int(mask), autos).bits)
    out = [TetraColoring(b) for b in sorted(reps)]
    if len(out) != polya_count(2):
        raise InternalError(f"{len(out)} orbits, expected {polya_count(2)}")
    return out


_T16 = None


def _base():
    global _T16
    if _T16 is None:
        _T16 = t16()
    return _T16


def matching_pairs(i: int, j: int) -> List[Tuple[int, int]]:
    """Point pairs of the matching at fiber i behind corner j."""
    c = _base()
    m = matching_at(c, other_fiber(i, j), i)
    return [(u, v) for u, v in c.pairs(m.cls) if u < v]


def materialize_pair(t: TetraColoring) -> Tuple[ColoredSquareMatrix, ColoredSquareMatrix]:
    c = _base()
    n = c.n
    nonedge, edge = 4, 5
    g = np.full((n, n), nonedge, dtype=np.int64)
    for i, fib in enumerate(c.fibers):
        for u in fib:
            g[u, u] = i
        for j in range(3):
            if t.bits[vertex(i, j)]:
                for u, v in matching_pairs(i, j):
                    g[u, v] = g[v, u] = edge
    h = g.copy()
    for a, b in combinations(range(4), 2):
        r = min(c.block(a, b))
        mask = c.colors == r
        g[mask | mask.T] = edge
        if (a, b) == (0, 1):
            other = [s for s in c.block(a, b) if s != r][0]
            mask = c.colors == other
        h[mask | mask.T] = edge
    return ColoredSquareMatrix(g), ColoredSquareMatrix(h)


def underlying_adjacency(m: ColoredSquareMatrix, edge_color: int = 5) -> np.ndarray:
    a = (m.colors == edge_color)
    np.fill_diagonal(a, False)
    return a


def has_k4(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    return any(all(adj[a, b] for a, b in combinations(q, 2)) for q in combinations(range(n), 4))


def shrikhande_rook_pair() -> Tuple[ColoredSquareMatrix, ColoredSquareMatrix]:
    """(Shrikhande, rook) from the all-white coloring."""
    g, h = materialize_pair(TetraColoring((False,) * 12))
    kg, kh = has_k4(underlying_adjacency(g)), has_k4(underlying_adjacency(h))
    if kg == kh:
        raise InternalError("exactly one member should contain a 4-clique")
    return (h, g) if kg else (g, h)


@dataclass
class PairCheck:
    index: int
    coloring: str
    equivalent: bool
    non_isomorphic: bool
    amenable_verdicts: Tuple[Optional[bool], Optional[bool]] = (None, None)

    @property
    def ok(self) -> bool:
        good = self.equivalent and self.non_isomorphic
        return good and all(v is None or v is False for v in self.amenable_verdicts)


@dataclass
class CensusReport:
    classes: int
    graphs: int
    checks: List[PairCheck] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks) and self.classes == polya_count(2)

    def tsv(self) -> str:
        rows = ["class\tcoloring\twl2_equivalent\tnon_isomorphic\tamenable_a\tamenable_b"]
        for c in self.checks:
            a, b = ("-" if v is None else str(v).lower() for v in c.amenable_verdicts)
            rows.append(f"{c.index}\t{c.coloring}\t{str(c.equivalent).lower()}\t{str(c.non_isomorphic).lower()}\t{a}\t{b}")
        return "\n".join(rows) + "\n"


def check_pair(index: int, t: TetraColoring, with_amenability: bool = False) -> Tuple[PairCheck, ColoredSquareMatrix, ColoredSquareMatrix]:
    g, h = materialize_pair(t)
    eq = wl2_equivalent(g, h) is not None
    noniso = graph_iso(g, h) is None
    verdicts: Tuple[Optional[bool], Optional[bool]] = (None, None)
    if with_amenability:
        from .reduction import decide_amenable

        verdicts = (decide_amenable(g).amenable, decide_amenable(h).amenable)
    return PairCheck(index, str(t), eq, noniso, verdicts), g, h


def _worker(args):
    index, bits, amen = args
    chk, g, h = check_pair(index, TetraColoring(bits), amen)
    return chk, g.colors, h.colors


def worker_count() -> int:
    raw = os.environ.get("WLCC_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def census16(out_dir=None, with_amenability: bool = False, workers: Optional[int] = None) -> CensusReport:
    reps = enumerate_coloring_orbits()
    workers = worker_count() if workers is None else workers
    jobs = [(k, t.bits, with_amenability) for k, t in enumerate(reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs, chunksize=8))
    else:
        results = [_worker(j) for j in jobs]
    report = CensusReport(classes=len(reps), graphs=2 * len(reps))
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    for chk, g, h in results:
        report.checks.append(chk)
        if not chk.ok:
            raise InternalError(f"census pair {chk.index} ({chk.coloring}) failed verification")
        if out is not None:
            write_ccm(out / f"class_{chk.index}_a.ccm", ColoredSquareMatrix(g))
            write_ccm(out / f"class_{chk.index}_b.ccm", ColoredSquareMatrix(h))
    if out is not None:
        (out / "report.tsv").write_text(report.tsv())
    return report
