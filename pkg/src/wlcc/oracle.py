"""Brute-force ground truth for small instances.

Nothing here uses the closure, structure, reduction or irredundant modules;
only the core data types and intersection-number tables are shared.
"""
from __future__ import annotations

from collections import Counter
from itertools import permutations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    CoherentConfiguration,
    ColoredSquareMatrix,
    PointMap,
    PreconditionError,
    as_rainbow,
    intersection_table,
    rerank,
)

MAX_SWITCH_INTERSPACES = 14
MAX_FIBERS = 7
MAX_PRODUCT = 1 << 18


# -- closure ---------------------------------------------------------------------

def closure_oracle(r) -> np.ndarray:
    """Coarsest coherent refinement by splitting classes that violate coherence.

    Each pass first separates classes by the class of the transposed pair,
    then splits every class whose pairs disagree on some count p(uv) for a
    pair of classes (R, S).  Returns a re-ranked color matrix.
    """
    rb = as_rainbow(r)
    n = rb.n
    if n > 16:
        raise PreconditionError("closure oracle is limited to 16 points")
    col = [list(row) for row in rb.colors.tolist()]
    while True:
        changed = False
        # transpose closure
        key = {}
        new = [[0] * n for _ in range(n)]
        for u in range(n):
            for v in range(n):
                new[u][v] = key.setdefault((col[u][v], col[v][u], u == v), len(key))
        if len(key) != len({col[u][v] for u in range(n) for v in range(n)}):
            changed = True
        col = new
        # counts p(uv) for every (R, S)
        vectors = {}
        for u in range(n):
            for v in range(n):
                cnt = Counter((col[u][w], col[w][v]) for w in range(n))
                vectors[u, v] = frozenset(cnt.items())
        by_class: Dict[int, set] = {}
        for (u, v), vec in vectors.items():
            by_class.setdefault(col[u][v], set()).add(vec)
        if any(len(s) > 1 for s in by_class.values()):
            changed = True
            key = {}
            new = [[0] * n for _ in range(n)]
            for u in range(n):
                for v in range(n):
                    new[u][v] = key.setdefault((col[u][v], vectors[u, v]), len(key))
            col = new
        if not changed:
            return rerank(np.array(col, dtype=np.int64).reshape(n, n))


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and np.array_equal(rerank(a), rerank(b))


# -- colored graph isomorphism ------------------------------------------------------

def graph_iso(g: ColoredSquareMatrix, h: ColoredSquareMatrix, respect_colors: bool = True) -> Optional[PointMap]:
    """Backtracking search for phi with h[phi(u), phi(v)] = g[u, v].

    With ``respect_colors`` off, loop colors are ignored and only arrow
    colors must match.
    """
    n = g.n
    if h.n != n:
        return None
    if n > 40:
        raise PreconditionError("graph_iso is limited to 40 vertices")
    if n == 0:
        return PointMap(())
    G = g.colors.tolist()
    H = h.colors.tolist()

    def profile(M, u):
        vc = M[u][u] if respect_colors else 0
        out_ = tuple(sorted(Counter(M[u][w] for w in range(n) if w != u).items()))
        in_ = tuple(sorted(Counter(M[w][u] for w in range(n) if w != u).items()))
        return (vc, out_, in_)

    pg = [profile(G, u) for u in range(n)]
    ph = [profile(H, u) for u in range(n)]
    if sorted(pg) != sorted(ph):
        return None
    cand = {u: [v for v in range(n) if ph[v] == pg[u]] for u in range(n)}
    # order: fewest candidates first, then most arcs to earlier choices of rare colors
    order: List[int] = []
    remaining = set(range(n))
    freq = Counter(G[u][v] for u in range(n) for v in range(n) if u != v)
    while remaining:
        def score(u):
            link = sum(1.0 / freq[G[u][w]] for w in order)
            return (len(cand[u]) if not order else 0, -link, len(cand[u]), u)
        u = min(remaining, key=score)
        order.append(u)
        remaining.discard(u)
    img = [-1] * n
    used = [False] * n

    def rec(i):
        if i == n:
            return True
        u = order[i]
        Gu = G[u]
        for v in cand[u]:
            if used[v]:
                continue
            Hv = H[v]
            ok = True
            for j in range(i):
                w = order[j]
                x = img[w]
                if Gu[w] != Hv[x] or G[w][u] != H[x][v]:
                    ok = False
                    break
            if not ok:
                continue
            img[u] = v
            used[v] = True
            if rec(i + 1):
                return True
            used[v] = False
        img[u] = -1
        return False

    if rec(0):
        return PointMap(tuple(img))
    return None


def check_iso(g: ColoredSquareMatrix, h: ColoredSquareMatrix, phi: PointMap, respect_colors: bool = True) -> bool:
    fw = np.array(phi.forward)
    img = h.colors[np.ix_(fw, fw)]
    if respect_colors:
        return np.array_equal(img, g.colors)
    off = ~np.eye(g.n, dtype=bool)
    return np.array_equal(img[off], g.colors[off])


# -- strict automorphisms of irredundant-shaped configurations -----------------------

def _switchable(c: CoherentConfiguration) -> List[Tuple[int, int]]:
    """Fiber pairs x < y whose interspace is non-uniform; all must have two classes."""
    out = []
    for x in range(c.nfibers):
        if c.fiber_size(x) != 4:
            raise PreconditionError("oracle expects all fibers of size 4")
        for y in range(x + 1, c.nfibers):
            b = c.block(x, y)
            if len(b) > 2:
                raise PreconditionError("oracle expects two-class interspaces")
            if len(b) == 2:
                out.append((x, y))
    return out


def bound_permutation(c: CoherentConfiguration, switched: Sequence[Tuple[int, int]]) -> Tuple[int, ...]:
    """Class permutation exchanging the two classes of each listed interspace."""
    perm = list(range(c.k))
    for x, y in switched:
        for a, b in ((x, y), (y, x)):
            r, s = c.block(a, b)
            perm[r], perm[s] = s, r
    return tuple(perm)


def preserves_intersections(c: CoherentConfiguration, perm: Sequence[int]) -> bool:
    keys, vals = intersection_table(c)
    k = c.k
    p = np.asarray(perm, dtype=np.int64)
    t, rest = np.divmod(keys, k * k)
    r, s = np.divmod(rest, k)
    mapped = (p[t] * k + p[r]) * k + p[s]
    pos = np.searchsorted(keys, mapped)
    pos = np.minimum(pos, len(keys) - 1)
    if not np.array_equal(keys[pos], mapped):
        return False
    return bool(np.array_equal(vals[pos], vals))


def scan_switch_sets(c: CoherentConfiguration) -> Dict[FrozenSet[Tuple[int, int]], bool]:
    """For every switch set S, whether f_S preserves all intersection numbers."""
    inter = _switchable(c)
    if len(inter) > MAX_SWITCH_INTERSPACES:
        raise PreconditionError(f"{len(inter)} non-uniform interspaces exceed the scan bound")
    out = {}
    for mask in range(1 << len(inter)):
        s = [inter[i] for i in range(len(inter)) if mask >> i & 1]
        out[frozenset(s)] = preserves_intersections(c, bound_permutation(c, s))
    return out


def enumerate_strict_algebraic_automorphisms(c: CoherentConfiguration) -> List[Tuple[int, ...]]:
    return [bound_permutation(c, sorted(s)) for s, ok in scan_switch_sets(c).items() if ok]


def cell_group(c: CoherentConfiguration, x: int) -> List[Tuple[int, ...]]:
    """Permutations of fiber x (as point tuples) fixing every class of its cell."""
    pts = c.fibers[x]
    col = c.colors
    out = []
    for img in permutations(pts):
        m = dict(zip(pts, img))
        if all(col[m[a], m[b]] == col[a, b] for a in pts for b in pts):
            out.append(img)
    return out


def enumerate_strict_combinatorial_automorphisms(c: CoherentConfiguration) -> List[Tuple[PointMap, Tuple[int, ...]]]:
    """Products of cell groups that are automorphisms, with induced class maps."""
    _switchable(c)
    groups = [cell_group(c, x) for x in range(c.nfibers)]
    total = int(np.prod([len(g) for g in groups], dtype=object))
    if c.nfibers > MAX_FIBERS and total > MAX_PRODUCT:
        raise PreconditionError("too many fibers for product enumeration")
    n, k = c.n, c.k
    col = c.colors
    ru = np.array([u for u, _ in c.rep])
    rv = np.array([v for _, v in c.rep])
    # build all products fiber by fiber as a (count, n) image array
    perms = np.tile(np.arange(n), (1, 1))
    for x, grp in enumerate(groups):
        pts = np.array(c.fibers[x])
        opts = np.array(grp)
        block = np.repeat(perms, len(grp), axis=0)
        block[:, pts] = np.tile(opts, (perms.shape[0], 1))
        perms = block
    out = []
    chunk = 4096
    for start in range(0, perms.shape[0], chunk):
        P = perms[start:start + chunk]
        img = col[P[:, :, None], P[:, None, :]]
        induced = img[:, ru, rv]
        ok = (np.take_along_axis(induced, np.broadcast_to(col.ravel(), (P.shape[0], n * n)), axis=1)
              == img.reshape(P.shape[0], n * n)).all(axis=1)
        ok &= np.array([len(set(row)) == k for row in induced.tolist()])
        for i in np.nonzero(ok)[0]:
            out.append((PointMap(tuple(P[i].tolist())), tuple(induced[i].tolist())))
    return out


def separable_oracle_irredundant(c: CoherentConfiguration) -> bool:
    algebraic = set(enumerate_strict_algebraic_automorphisms(c))
    induced = {m for _, m in enumerate_strict_combinatorial_automorphisms(c)}
    if not induced <= algebraic:
        raise AssertionError("an induced map is not a strict algebraic automorphism")
    return induced == algebraic


def separable_oracle(c: CoherentConfiguration) -> bool:
    """Ground truth where available: max fiber size 3 or irredundant shape."""
    if c.nfibers <= 1 or max(c.fiber_size(x) for x in range(c.nfibers)) <= 3:
        return True
    return separable_oracle_irredundant(c)
