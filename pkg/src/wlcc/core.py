"""Colored square matrices, rainbows and coherent configurations.

A colored square matrix assigns a color id to every ordered pair of points.
Both colored graphs and coherent configurations are stored this way; the
configuration type adds fiber structure, per-class metadata and access to
intersection numbers.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np


class WlccError(Exception):
    """Base class for errors raised by this package."""


class InvalidInput(WlccError, ValueError):
    """Malformed or semantically invalid input data."""


class PreconditionError(WlccError, ValueError):
    """An operation was called outside its domain."""


class InternalError(WlccError, RuntimeError):
    """An internal consistency check failed."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def rerank(colors: np.ndarray) -> np.ndarray:
    """Dense re-ranking of color ids by first occurrence in row-major order."""
    flat = np.asarray(colors).ravel()
    if flat.size == 0:
        return np.zeros_like(np.asarray(colors), dtype=np.int64)
    _, first, inv = np.unique(flat, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inv.ravel()].reshape(np.shape(colors)).astype(np.int64)


class ColoredSquareMatrix:
    """An n x n matrix of non-negative color ids, optionally with color names."""

    __slots__ = ("colors", "color_names")

    def __init__(self, colors, color_names: Optional[Mapping[int, str]] = None):
        a = np.array(colors, dtype=np.int64)
        if a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"color matrix must be square, got shape {a.shape}")
        self.colors = _frozen(a)
        self.color_names = dict(color_names or {})

    @property
    def n(self) -> int:
        return int(self.colors.shape[0])

    @property
    def ncolors(self) -> int:
        return int(self.colors.max()) + 1 if self.n else 0

    def vertex_colors(self) -> np.ndarray:
        return np.diagonal(self.colors).copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColoredSquareMatrix):
            return NotImplemented
        return np.array_equal(self.colors, other.colors) and self.color_names == other.color_names

    def __hash__(self) -> int:
        return hash((self.n, self.colors.tobytes()))

    def __repr__(self) -> str:
        return f"ColoredSquareMatrix(n={self.n}, ncolors={self.ncolors})"


def validate_colored_graph(m: ColoredSquareMatrix) -> List[str]:
    """Return a list of diagnostics; an empty list means the matrix is valid."""
    diags: List[str] = []
    c = m.colors
    n = m.n
    if n == 0:
        return diags
    if c.min() < 0:
        diags.append("negative color id")
        return diags
    loops = set(np.diagonal(c).tolist())
    off = ~np.eye(n, dtype=bool)
    bad = np.argwhere(off & np.isin(c, list(loops)))
    for u, v in bad[:10]:
        diags.append(f"loop color reused on arrow ({u},{v}) color {c[u, v]}")
    if len(bad) > 10:
        diags.append(f"... {len(bad) - 10} more arrows reuse loop colors")
    used = np.unique(c)
    if used.size != int(used[-1]) + 1:
        missing = sorted(set(range(int(used[-1]) + 1)) - set(used.tolist()))
        diags.append(f"color ids not dense, missing {missing[:10]}")
    return diags


def require_valid(m: ColoredSquareMatrix) -> None:
    diags = validate_colored_graph(m)
    if diags:
        raise InvalidInput("; ".join(diags))


def normalize_transpose(m: ColoredSquareMatrix) -> ColoredSquareMatrix:
    """Recolor every pair uv by the pair (old(uv), old(vu)), ranked lexicographically."""
    require_valid(m)
    c = m.colors
    if m.n == 0:
        return ColoredSquareMatrix(c)
    k = int(c.max()) + 1
    _, inv = np.unique((c * k + c.T).ravel(), return_inverse=True)
    return ColoredSquareMatrix(inv.reshape(c.shape))


def transpose_consistent(colors: np.ndarray) -> bool:
    """True iff color(uv) determines color(vu)."""
    c = np.asarray(colors)
    if c.size == 0:
        return True
    k = int(c.max()) + 1
    pairs = np.unique((c * k + c.T).ravel())
    return pairs.size == np.unique(c).size


class RainbowError(InvalidInput):
    """The color partition violates a rainbow property."""


class Rainbow:
    """A colored square matrix whose classes satisfy properties (A) and (B)."""

    __slots__ = ("base",)

    def __init__(self, base: ColoredSquareMatrix):
        if not isinstance(base, ColoredSquareMatrix):
            base = ColoredSquareMatrix(base)
        require_valid(base)
        if not transpose_consistent(base.colors):
            raise RainbowError("class set is not closed under transposition")
        self.base = base

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def colors(self) -> np.ndarray:
        return self.base.colors


def as_rainbow(x) -> Rainbow:
    if isinstance(x, Rainbow):
        return x
    if isinstance(x, CoherentConfiguration):
        return x.rainbow
    return Rainbow(x if isinstance(x, ColoredSquareMatrix) else ColoredSquareMatrix(x))


@dataclass(frozen=True)
class PointMap:
    """A bijection of points, stored as the image list ``forward[u] = phi(u)``."""

    forward: Tuple[int, ...]

    def __post_init__(self):
        fw = tuple(int(x) for x in self.forward)
        if sorted(fw) != list(range(len(fw))):
            raise InvalidInput("point map is not a bijection of 0..n-1")
        object.__setattr__(self, "forward", fw)

    @classmethod
    def identity(cls, n: int) -> "PointMap":
        return cls(tuple(range(n)))

    def inverse(self) -> "PointMap":
        inv = [0] * len(self.forward)
        for u, v in enumerate(self.forward):
            inv[v] = u
        return PointMap(tuple(inv))

    def __call__(self, u: int) -> int:
        return self.forward[u]

    def __len__(self) -> int:
        return len(self.forward)


@dataclass(frozen=True)
class CoherenceWitness:
    """Offending triple (R, S, T) and two pairs of T with different counts."""

    R: int
    S: int
    T: int
    pair1: Tuple[int, int]
    count1: int
    pair2: Tuple[int, int]
    count2: int


class CoherenceError(InvalidInput):
    def __init__(self, witness: CoherenceWitness):
        w = witness
        super().__init__(
            f"not coherent: p(uv) for R={w.R}, S={w.S} over T={w.T} is "
            f"{w.count1} at {w.pair1} but {w.count2} at {w.pair2}"
        )
        self.witness = witness


class CoherentConfiguration:
    """A verified coherent configuration.

    ``colors`` is dense and re-ranked by first occurrence.  ``labels`` maps
    local points to the point ids of the configuration this one was cut
    from (identity for fresh configurations).
    """

    def __init__(self, colors: np.ndarray, labels: Optional[Sequence[int]] = None):
        c = rerank(np.asarray(colors, dtype=np.int64))
        self.colors = _frozen(c)
        n = c.shape[0]
        self.n = n
        self.labels = tuple(range(n)) if labels is None else tuple(int(x) for x in labels)
        if len(self.labels) != n:
            raise InvalidInput("labels length mismatch")
        self.k = int(c.max()) + 1 if n else 0
        self._memo: Dict[Tuple[int, int, int], int] = {}
        self._cache: Dict[object, object] = {}
        self._build_meta()

    # -- construction helpers -------------------------------------------------
    def _build_meta(self) -> None:
        c, n, k = self.colors, self.n, self.k
        if n == 0:
            self.fibers = ()
            self.fiber_of = _frozen(np.zeros(0, dtype=np.int64))
            for name in ("rel_src", "rel_dst", "valency", "transpose", "size"):
                setattr(self, name, _frozen(np.zeros(0, dtype=np.int64)))
            self.reflexive = _frozen(np.zeros(0, dtype=bool))
            self.rep = ()
            self._blocks = {}
            return
        diag = np.diagonal(c)
        groups: Dict[int, List[int]] = {}
        for u, col in enumerate(diag.tolist()):
            groups.setdefault(col, []).append(u)
        self.fibers = tuple(tuple(g) for g in sorted(groups.values(), key=lambda g: g[0]))
        fiber_of = np.empty(n, dtype=np.int64)
        for i, fib in enumerate(self.fibers):
            fiber_of[list(fib)] = i
        self.fiber_of = _frozen(fiber_of)
        flat = c.ravel()
        _, first = np.unique(flat, return_index=True)
        ru, rv = np.divmod(first, n)
        self.rep = tuple(zip(ru.tolist(), rv.tolist()))
        self.size = _frozen(np.bincount(flat, minlength=k))
        self.rel_src = _frozen(fiber_of[ru])
        self.rel_dst = _frozen(fiber_of[rv])
        self.transpose = _frozen(c[rv, ru].copy())
        self.reflexive = _frozen(np.zeros(k, dtype=bool))
        refl = np.zeros(k, dtype=bool)
        refl[np.unique(diag)] = True
        self.reflexive = _frozen(refl)
        fsize = np.array([len(f) for f in self.fibers], dtype=np.int64)
        self.valency = _frozen(self.size // fsize[self.rel_src])
        blocks: Dict[Tuple[int, int], List[int]] = {}
        for r in range(k):
            blocks.setdefault((int(self.rel_src[r]), int(self.rel_dst[r])), []).append(r)
        self._blocks = {key: tuple(v) for key, v in blocks.items()}

    # -- accessors -----------------------------------------------------------
    @property
    def matrix(self) -> ColoredSquareMatrix:
        return ColoredSquareMatrix(self.colors)

    @property
    def rainbow(self) -> Rainbow:
        return Rainbow(self.matrix)

    @property
    def nfibers(self) -> int:
        return len(self.fibers)

    def fiber_size(self, x: int) -> int:
        return len(self.fibers[x])

    def block(self, x: int, y: int) -> Tuple[int, ...]:
        """Class ids inside fibers x times y, in increasing order."""
        return self._blocks.get((x, y), ())

    def cell(self, x: int) -> Tuple[int, ...]:
        return self.block(x, x)

    def pairs(self, r: int) -> List[Tuple[int, int]]:
        us, vs = np.nonzero(self.colors == r)
        return list(zip(us.tolist(), vs.tolist()))

    def fiber_by_labels(self, pts: Iterable[int]) -> int:
        key = tuple(sorted(pts))
        for i, f in enumerate(self.fibers):
            if tuple(sorted(self.labels[u] for u in f)) == key:
                return i
        raise PreconditionError(f"no fiber with points {key}")

    def fiber_labels(self, x: int) -> Tuple[int, ...]:
        return tuple(sorted(self.labels[u] for u in self.fibers[x]))

    def intersection_number(self, t: int, r: int, s: int) -> int:
        return intersection_number(self, t, r, s)

    def __repr__(self) -> str:
        sizes = [len(f) for f in self.fibers]
        return f"CoherentConfiguration(n={self.n}, classes={self.k}, fibers={sizes})"


def _signatures(c: np.ndarray) -> np.ndarray:
    """Sorted multiset codes of (c(uw), c(wv)) over w, shape (n, n, n)."""
    k = int(c.max()) + 1
    p = c[:, None, :] * k + c.T[None, :, :]
    p.sort(axis=2)
    return p


def coherence_witness(r: Rainbow) -> Optional[CoherenceWitness]:
    """Lexicographically least (R, S, T) violating property (C), or None."""
    c = rerank(r.colors)
    n = c.shape[0]
    if n == 0:
        return None
    k = int(c.max()) + 1
    sig = _signatures(c).reshape(n * n, n)
    flat = c.ravel()
    order = np.argsort(flat, kind="stable")
    sorted_cls = flat[order]
    starts = np.searchsorted(sorted_cls, np.arange(k))
    ends = np.searchsorted(sorted_cls, np.arange(k), side="right")
    bad = []
    for t in range(k):
        idx = order[starts[t]:ends[t]]
        rows = sig[idx]
        if (rows != rows[0]).any():
            bad.append((t, idx))
    if not bad:
        return None
    best = None
    for t, idx in bad:
        us, vs = np.divmod(idx, n)
        codes = c[us, :] * k + c[:, vs].T
        m = len(idx)
        counts = np.bincount((codes + (np.arange(m) * k * k)[:, None]).ravel(), minlength=m * k * k)
        counts = counts.reshape(m, k * k)
        varying = np.nonzero((counts != counts[0]).any(axis=0))[0]
        code = int(varying[0])
        rr, ss = divmod(code, k)
        j = int(np.nonzero(counts[:, code] != counts[0, code])[0][0])
        cand = CoherenceWitness(
            rr, ss, t,
            (int(us[0]), int(vs[0])), int(counts[0, code]),
            (int(us[j]), int(vs[j])), int(counts[j, code]),
        )
        if best is None or (cand.R, cand.S, cand.T) < (best.R, best.S, best.T):
            best = cand
    return best


def verify_coherence(r, labels: Optional[Sequence[int]] = None) -> CoherentConfiguration:
    """Check property (C) and return the configuration.

    Raises ``CoherenceError`` carrying a ``CoherenceWitness`` on failure.
    Colors of the result are re-ranked; the witness refers to re-ranked ids.
    """
    rb = as_rainbow(r)
    w = coherence_witness(rb)
    if w is not None:
        raise CoherenceError(w)
    cfg = CoherentConfiguration(rb.colors, labels)
    _check_blocks(cfg)
    return cfg


def _check_blocks(cfg: CoherentConfiguration) -> None:
    if cfg.n == 0:
        return
    c = cfg.colors
    fo = cfg.fiber_of
    key = (c * cfg.nfibers + fo[:, None]) * cfg.nfibers + fo[None, :]
    if np.unique(key).size != cfg.k:
        raise InternalError("a class spans several fiber blocks")
    fsize = np.array([len(f) for f in cfg.fibers])
    t = cfg.transpose
    if not np.array_equal(cfg.valency * fsize[cfg.rel_src], cfg.valency[t] * fsize[cfg.rel_dst]):
        raise InternalError("valency identity d(R)|X| = d(R*)|Y| fails")


def intersection_number(c: CoherentConfiguration, t: int, r: int, s: int) -> int:
    """p^T_{RS}: number of w with uw in R and wv in S, for any uv in T."""
    for x in (t, r, s):
        if not 0 <= x < c.k:
            raise PreconditionError(f"class id {x} out of range 0..{c.k - 1}")
    key = (t, r, s)
    hit = c._memo.get(key)
    if hit is not None:
        return hit
    if c.rel_src[r] != c.rel_src[t] or c.rel_dst[s] != c.rel_dst[t] or c.rel_dst[r] != c.rel_src[s]:
        val = 0
    else:
        u, v = c.rep[t]
        val = int(np.count_nonzero((c.colors[u, :] == r) & (c.colors[:, v] == s)))
    c._memo[key] = val
    return val


def intersection_table(c: CoherentConfiguration) -> Tuple[np.ndarray, np.ndarray]:
    """All collocated triples as sorted keys ``(T*k + R)*k + S`` with their values.

    Zero-valued collocated triples are included, so an intersection-number
    preserving check over the table is complete for block-preserving maps.
    """
    hit = c._cache.get("itable")
    if hit is not None:
        return hit
    k, col = c.k, c.colors
    keys: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    for t in range(k):
        u, v = c.rep[t]
        x, y = int(c.rel_src[t]), int(c.rel_dst[t])
        for z in range(c.nfibers):
            rs = np.array(c.block(x, z))
            ss = np.array(c.block(z, y))
            pts = list(c.fibers[z])
            codes = col[u, pts] * k + col[pts, v]
            cnt = np.bincount(codes, minlength=k * k)
            grid = (rs[:, None] * k + ss[None, :]).ravel()
            keys.append(t * k * k + grid)
            vals.append(cnt[grid])
    kk = np.concatenate(keys) if keys else np.zeros(0, dtype=np.int64)
    vv = np.concatenate(vals) if vals else np.zeros(0, dtype=np.int64)
    order = np.argsort(kk)
    out = (_frozen(kk[order]), _frozen(vv[order]))
    c._cache["itable"] = out
    return out


def restrict(c: CoherentConfiguration, fibers: Iterable[int]) -> CoherentConfiguration:
    """The configuration induced on a union of fibers (given by fiber index)."""
    fs = sorted(set(int(x) for x in fibers))
    for x in fs:
        if not 0 <= x < c.nfibers:
            raise PreconditionError(f"fiber index {x} out of range")
    pts = sorted(u for x in fs for u in c.fibers[x])
    sub = c.colors[np.ix_(pts, pts)]
    return CoherentConfiguration(sub, [c.labels[u] for u in pts])


def restrict_points(c: CoherentConfiguration, points: Iterable[int]) -> CoherentConfiguration:
    """Like ``restrict`` but takes a point set, which must be fiber-aligned."""
    pset = set(int(u) for u in points)
    chosen = [i for i, f in enumerate(c.fibers) if pset & set(f)]
    for i in chosen:
        if not set(c.fibers[i]) <= pset:
            raise PreconditionError("point subset is not a union of fibers")
    return restrict(c, chosen)


def apply_point_map(c: CoherentConfiguration, phi: PointMap) -> Tuple[CoherentConfiguration, Tuple[int, ...]]:
    """Image configuration under phi and the induced bijection on class ids."""
    if len(phi) != c.n:
        raise PreconditionError("point map size differs from configuration size")
    fw = np.array(phi.forward, dtype=np.int64)
    img = np.empty_like(c.colors)
    img[np.ix_(fw, fw)] = c.colors
    out = CoherentConfiguration(img, [c.labels[u] for u in phi.inverse().forward])
    cmap = tuple(int(out.colors[fw[u], fw[v]]) for u, v in c.rep)
    return out, cmap


# -- .ccm text format -------------------------------------------------------

def loads_ccm(text: str) -> ColoredSquareMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InvalidInput("empty .ccm input")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "ccm":
        raise InvalidInput("first line must be 'ccm <n>'")
    try:
        n = int(head[1])
    except ValueError:
        raise InvalidInput("bad point count") from None
    if n < 0 or len(lines) < 1 + n:
        raise InvalidInput(f"expected {n} matrix rows")
    rows = []
    for i in range(n):
        try:
            row = [int(t) for t in lines[1 + i].split()]
        except ValueError:
            raise InvalidInput(f"non-integer entry in row {i}") from None
        if len(row) != n:
            raise InvalidInput(f"row {i} has {len(row)} entries, expected {n}")
        rows.append(row)
    names: Dict[int, str] = {}
    for ln in lines[1 + n:]:
        parts = ln.split(None, 2)
        if len(parts) < 3 or parts[0] != "name":
            raise InvalidInput(f"unexpected trailing line: {ln!r}")
        names[int(parts[1])] = parts[2]
    return ColoredSquareMatrix(np.array(rows, dtype=np.int64).reshape(n, n), names)


def dumps_ccm(m) -> str:
    if isinstance(m, CoherentConfiguration):
        m = m.matrix
    out = [f"ccm {m.n}"]
    out.extend(" ".join(str(x) for x in row) for row in m.colors.tolist())
    for cid in sorted(m.color_names):
        out.append(f"name {cid} {m.color_names[cid]}")
    return "\n".join(out) + "\n"


def read_ccm(path) -> ColoredSquareMatrix:
    return loads_ccm(Path(path).read_text())


def write_ccm(path, m) -> None:
    Path(path).write_text(dumps_ccm(m))
