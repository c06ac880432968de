"""Random colored graphs of bounded color multiplicity.

Plain random graphs almost always have a discrete closure, so half of the
samples are built from structured blocks (matchings, 2x2 blocks, cycles)
that keep fibers of size 4 alive after refinement.  A third source colors
the classes of a known coherent configuration at random; its closure is
then a coarsening of that configuration and regularly keeps matchings,
2-fibers, 8-cycles and irredundant parts.
"""
from __future__ import annotations

import random
from typing import List, Optional

import numpy as np

from .core import ColoredSquareMatrix


def _class_sizes(rng: random.Random, n: int, mult: int) -> List[int]:
    sizes = []
    left = n
    while left:
        s = rng.randint(1, min(mult, left))
        if rng.random() < 0.6:
            s = min(mult, left)
        sizes.append(s)
        left -= s
    return sizes


def _block(rng: random.Random, a: int, b: int) -> np.ndarray:
    """A 0/1 relation between an a-set and a b-set."""
    kind = rng.choice(["empty", "full", "matching", "k22", "cycle", "random", "random"])
    m = np.zeros((a, b), dtype=np.int64)
    if kind == "full":
        m[:] = 1
    elif kind == "matching" and a == b:
        p = list(range(b))
        rng.shuffle(p)
        m[np.arange(a), p] = 1
    elif kind == "k22" and a == 4 and b == 4:
        p = list(range(4))
        q = list(range(4))
        rng.shuffle(p)
        rng.shuffle(q)
        for i in (0, 1):
            for j in (0, 1):
                m[p[i], q[j]] = m[p[2 + i], q[2 + j]] = 1
    elif kind == "cycle" and a == b and a >= 2:
        p = list(range(b))
        rng.shuffle(p)
        for i in range(a):
            m[i, p[i]] = m[i, p[(i + 1) % b]] = 1
    elif kind == "k22" and {a, b} == {2, 4}:
        p = list(range(max(a, b)))
        rng.shuffle(p)
        for i in range(4):
            if a == 2:
                m[i // 2, p[i]] = 1
            else:
                m[p[i], i // 2] = 1
    else:
        m = (np.array([[rng.random() for _ in range(b)] for _ in range(a)]) < rng.random()).astype(np.int64)
    return m


def random_colored_graph(
    rng: random.Random,
    n: int,
    mult: int = 4,
    structured: Optional[bool] = None,
    directed: Optional[bool] = None,
    arrow_colors: int = 2,
) -> ColoredSquareMatrix:
    """Vertex-colored graph on n vertices with classes of size <= mult."""
    if structured is None:
        structured = rng.random() < 0.5
    if directed is None:
        directed = rng.random() < 0.25
    sizes = _class_sizes(rng, n, mult)
    perm = list(range(n))
    rng.shuffle(perm)
    cls = []
    start = 0
    for i, s in enumerate(sizes):
        cls.append(perm[start:start + s])
        start += s
    ncls = len(cls)
    arrows = np.zeros((n, n), dtype=np.int64)
    for i in range(ncls):
        for j in range(i if not directed else 0, ncls):
            a, b = cls[i], cls[j]
            if structured:
                blk = _block(rng, len(a), len(b))
                if arrow_colors > 2:
                    blk = blk * rng.randint(1, arrow_colors - 1)
            else:
                p = rng.random()
                blk = np.array([[int(rng.random() < p) * rng.randint(1, arrow_colors - 1) for _ in b] for _ in a])
            arrows[np.ix_(a, b)] = blk
            if not directed and i != j:
                arrows[np.ix_(b, a)] = blk.T
    if not directed:
        arrows = np.triu(arrows) + np.triu(arrows, 1).T
    col = np.empty((n, n), dtype=np.int64)
    for i, members in enumerate(cls):
        for u in members:
            col[u, u] = i
    off = ~np.eye(n, dtype=bool)
    col[off] = ncls + arrows[off]
    return ColoredSquareMatrix(_dense(col, n))


def _dense(col: np.ndarray, n: int) -> np.ndarray:
    """Re-rank loops first, then arrows, keeping them disjoint."""
    diag = np.diagonal(col)
    loops = sorted(set(diag.tolist()))
    off = ~np.eye(n, dtype=bool)
    arrows = sorted(set(col[off].tolist()))
    lut = {c: i for i, c in enumerate(loops)}
    lut.update({c: len(loops) + i for i, c in enumerate(arrows)})
    return np.vectorize(lut.__getitem__, otypes=[np.int64])(col) if n else col


def _small_piece(rng: random.Random, budget: int):
    """A coherent configuration on at most ``budget`` points (None if nothing fits)."""
    from .closure import coherent_closure
    from .core import normalize_transpose
    from .generators import PartialLinearSpace, c8_pair_config, pls_to_config

    opts = ["small"]
    if budget >= 2:
        opts.append("cell")
    if budget >= 4:
        opts += ["pls1", "pls1"]
    if budget >= 8:
        opts += ["pls2", "c8", "c8"]
    if budget >= 12:
        opts += ["pls3", "pls3", "pls3"]
    kind = rng.choice(opts)
    if kind == "small":
        m = random_colored_graph(rng, rng.randint(1, min(budget, 6)), mult=3)
        return coherent_closure(normalize_transpose(m)).config
    if kind == "c8":
        return c8_pair_config()
    if kind == "cell":
        return _cell_scheme(rng.choice([k for k, m in CELL_SCHEMES.items() if len(m) <= budget]))
    npts = {"pls1": 1, "pls2": 2, "pls3": 3}[kind]
    lines = {
        1: [()],
        2: [((0, 1),)],
        3: [((0, 1, 2),), ((0, 1), (1, 2)), ((0, 1), (1, 2), (0, 2))],
    }[npts]
    d = PartialLinearSpace(npts, rng.choice(lines))
    cells = {p: rng.choice(["F4", "C4", "DirC4"]) for p in range(npts) if d.degree(p) <= 1}
    return pls_to_config(d, cells)


# one representative 4-, 3- and 2-point scheme of each cell type
CELL_SCHEMES = {
    "Pair2": [[0, 1], [1, 0]],
    "K3": [[0, 1, 1], [1, 0, 1], [1, 1, 0]],
    "DirC3": [[0, 1, 2], [2, 0, 1], [1, 2, 0]],
    "K4": [[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]],
    "C4": [[0, 1, 2, 2], [1, 0, 2, 2], [2, 2, 0, 1], [2, 2, 1, 0]],
    "DirC4": [[0, 1, 2, 3], [1, 0, 3, 2], [3, 2, 0, 1], [2, 3, 1, 0]],
    "F4": [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]],
}


def _cell_scheme(name: str):
    from .core import verify_coherence

    return verify_coherence(np.array(CELL_SCHEMES[name], dtype=np.int64))


def random_structured_config(rng: random.Random, nmax: int):
    """Direct sums of small pieces, sometimes with a fiber doubled."""
    from .generators import direct_sum, double_fiber

    parts = []
    left = nmax
    while left > 0 and (not parts or rng.random() < 0.5):
        piece = _small_piece(rng, left)
        if piece.n > left:
            break
        parts.append(piece)
        left -= piece.n
    c = direct_sum(*parts) if len(parts) > 1 else parts[0]
    if rng.random() < 0.35:
        fits = [x for x in range(c.nfibers) if c.fiber_size(x) <= nmax - c.n]
        if fits:
            c = double_fiber(c, rng.choice(fits))
    return c


def random_graph_on(rng: random.Random, c, palette: int = 3) -> ColoredSquareMatrix:
    """Vertex colors are the fibers; every arrow class gets a random color."""
    n = c.n
    lut = np.empty(c.k, dtype=np.int64)
    for r in range(c.k):
        lut[r] = c.fiber_of[c.rep[r][0]] if c.reflexive[r] else c.nfibers + rng.randrange(palette)
    col = lut[c.colors]
    perm = np.array(rng.sample(range(n), n))
    col = col[np.ix_(perm, perm)]
    return ColoredSquareMatrix(_dense(col, n))


def random_graphs(seed: int, count: int, nmax: int, mult: int = 4, nmin: int = 1):
    """Mix of plain, block-structured and configuration-based samples."""
    rng = random.Random(seed)
    for _ in range(count):
        if mult >= 4 and nmax >= 4 and rng.random() < 1 / 3:
            c = random_structured_config(rng, nmax)
            if c.n >= nmin:
                yield random_graph_on(rng, c, palette=rng.randint(2, 3))
                continue
        yield random_colored_graph(rng, rng.randint(nmin, nmax), mult)


def random_rainbow_matrix(rng: random.Random, n: int) -> ColoredSquareMatrix:
    """A random rainbow: a random colored graph made transpose-consistent."""
    from .core import normalize_transpose

    g = random_colored_graph(rng, n, mult=rng.randint(1, 4), arrow_colors=rng.randint(2, 4))
    return normalize_transpose(g)

