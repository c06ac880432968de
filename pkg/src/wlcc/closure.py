"""Two-dimensional Weisfeiler-Leman refinement.

Each round recolors a pair uv by its old color together with the sorted
multiset of color pairs (c(uw), c(wv)) over all w.  New ids are the
lexicographic ranks of these signatures, so two graphs refined against a
shared table get comparable colors.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .core import (
    CoherentConfiguration,
    ColoredSquareMatrix,
    as_rainbow,
    require_valid,
)


@dataclass(frozen=True)
class ClosureResult:
    config: CoherentConfiguration
    lineage: Tuple[int, ...]  # final class id -> color id of the input
    rounds: int


@dataclass(frozen=True)
class EquivalenceWitness:
    class_map: Tuple[int, ...]  # class of g's closure -> class of h's closure
    g_closure: CoherentConfiguration
    h_closure: CoherentConfiguration


def _signature_rows(c: np.ndarray, k: int) -> np.ndarray:
    n = c.shape[0]
    p = c[:, None, :] * k + c.T[None, :, :]
    p.sort(axis=2)
    return np.concatenate((c[:, :, None], p), axis=2).reshape(n * n, n + 1)


def _rank_rows(rows: np.ndarray) -> Tuple[np.ndarray, int]:
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.ravel().astype(np.int64), uniq.shape[0]


def refinement_rounds(colors: np.ndarray) -> Iterator[np.ndarray]:
    """Yield the coloring before refinement and after each round until stable.

    The last yielded matrix repeats the partition of the one before it.
    """
    c = np.asarray(colors, dtype=np.int64)
    n = c.shape[0]
    _, inv = np.unique(c.ravel(), return_inverse=True)
    c = inv.reshape(n, n)
    k = int(c.max()) + 1 if n else 0
    yield c
    while n:
        new, k2 = _rank_rows(_signature_rows(c, k))
        c = new.reshape(n, n)
        yield c
        if k2 == k:
            return
        k = k2


def coherent_closure(r) -> ClosureResult:
    """Coarsest coherent configuration refining a rainbow."""
    rb = as_rainbow(r)
    orig = rb.colors
    rounds = 0
    final = orig
    for i, c in enumerate(refinement_rounds(orig)):
        rounds = i
        final = c
    cfg = CoherentConfiguration(final)
    lineage = tuple(int(orig[u, v]) for u, v in cfg.rep)
    return ClosureResult(cfg, lineage, max(rounds, 1) if rb.n else 0)


def _joint_initial(g: np.ndarray, h: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    k = int(max(g.max(), h.max())) + 1
    pg = (g * k + g.T).ravel()
    ph = (h * k + h.T).ravel()
    _, inv = np.unique(np.concatenate((pg, ph)), return_inverse=True)
    n = g.shape[0]
    return inv[: n * n].reshape(n, n), inv[n * n:].reshape(n, n)


def wl2_equivalent(g: ColoredSquareMatrix, h: ColoredSquareMatrix) -> Optional[EquivalenceWitness]:
    """Joint refinement; a witness when every round's histograms agree, else None."""
    require_valid(g)
    require_valid(h)
    if g.n != h.n:
        return None
    n = g.n
    if n == 0:
        empty = CoherentConfiguration(np.zeros((0, 0), dtype=np.int64))
        return EquivalenceWitness((), empty, empty)
    cg, ch = _joint_initial(g.colors, h.colors)
    k = int(max(cg.max(), ch.max())) + 1
    while True:
        if not np.array_equal(np.bincount(cg.ravel(), minlength=k), np.bincount(ch.ravel(), minlength=k)):
            return None
        rows = np.concatenate((_signature_rows(cg, k), _signature_rows(ch, k)))
        new, k2 = _rank_rows(rows)
        cg, ch = new[: n * n].reshape(n, n), new[n * n:].reshape(n, n)
        if k2 == k:
            break
        k = k2
    if not np.array_equal(np.bincount(cg.ravel(), minlength=k), np.bincount(ch.ravel(), minlength=k)):
        return None
    gc = CoherentConfiguration(cg)
    hc = CoherentConfiguration(ch)
    shared_to_h = {int(ch[u, v]): r for r, (u, v) in enumerate(hc.rep)}
    cmap = tuple(shared_to_h[int(cg[u, v])] for u, v in gc.rep)
    return EquivalenceWitness(cmap, gc, hc)


def wl2_fingerprint(g: ColoredSquareMatrix) -> str:
    """Digest of the full refinement history.

    Two graphs have the same fingerprint iff their joint refinement never
    separates their histograms, since per-round signature tables coincide
    exactly when the shared-dictionary histograms do.
    """
    require_valid(g)
    n = g.n
    hsh = hashlib.sha256(f"n={n};".encode())
    if n == 0:
        return hsh.hexdigest()
    k0 = int(g.colors.max()) + 1
    pairs = (g.colors * k0 + g.colors.T).ravel()
    uniq, inv, cnt = np.unique(pairs, return_inverse=True, return_counts=True)
    hsh.update(np.stack((uniq // k0, uniq % k0, cnt)).astype(np.int64).tobytes())
    c = inv.reshape(n, n).astype(np.int64)
    k = uniq.size
    while True:
        rows = _signature_rows(c, k)
        uniq, inv, cnt = np.unique(rows, axis=0, return_inverse=True, return_counts=True)
        hsh.update(b"|")
        hsh.update(uniq.astype(np.int64).tobytes())
        hsh.update(cnt.astype(np.int64).tobytes())
        c = inv.ravel().reshape(n, n).astype(np.int64)
        if uniq.shape[0] == k:
            break
        k = uniq.shape[0]
    return hsh.hexdigest()


def partition_of(colors: np.ndarray) -> List[frozenset]:
    """Color classes of a matrix as a canonical list of pair sets."""
    classes: dict = {}
    for (u, v), col in np.ndenumerate(colors):
        classes.setdefault(int(col), set()).add((u, v))
    return sorted((frozenset(s) for s in classes.values()), key=lambda s: min(s))
