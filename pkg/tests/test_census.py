from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from wlcc.census import (
    TetraColoring,
    canonical,
    census16,
    check_pair,
    cycle_count,
    enumerate_coloring_orbits,
    has_k4,
    materialize_pair,
    polya_count,
    shrikhande_rook_pair,
    tetra_automorphisms,
    tetra_edges,
    underlying_adjacency,
)
from wlcc.core import read_ccm
from wlcc.reduction import decide_amenable


def test_polya_values():
    assert polya_count(1) == 1
    assert polya_count(2) == 218


def test_tetra_graph_is_cubic():
    deg = Counter(v for e in tetra_edges() for v in e)
    assert len(tetra_edges()) == 18 and set(deg.values()) == {3} and len(deg) == 12


def test_automorphisms_preserve_edges():
    edges = {frozenset(e) for e in tetra_edges()}
    autos = tetra_automorphisms()
    assert len(set(autos)) == 24
    for p in autos:
        assert {frozenset((p[a], p[b])) for a, b in edges} == edges


def test_cycle_type_census():
    # identity, transpositions, double transpositions, 3-cycles, 4-cycles of the fibers
    assert Counter(cycle_count(p) for p in tetra_automorphisms()) == Counter({12: 1, 7: 6, 6: 3, 4: 8, 3: 6})


def test_orbits_are_canonical_and_distinct():
    reps = enumerate_coloring_orbits()
    assert len(reps) == 218
    assert all(canonical(t) == t for t in reps)


def test_orbit_count_by_burnside():
    autos = tetra_automorphisms()
    fixed = sum(2 ** cycle_count(p) for p in autos)
    assert fixed // len(autos) == 218


def test_coloring_text():
    t = TetraColoring.from_int(0b100000000001)
    assert str(t) == "BWWWWWWWWWWB"
    with pytest.raises(ValueError):
        TetraColoring((True,) * 11)


def test_shrikhande_rook_shapes():
    s, r = shrikhande_rook_pair()
    for m in (s, r):
        adj = underlying_adjacency(m)
        assert (adj.sum(axis=1) == 6).all()
    assert not has_k4(underlying_adjacency(s)) and has_k4(underlying_adjacency(r))


def test_pair_differs_on_one_interspace():
    g, h = materialize_pair(TetraColoring.from_int(0b101100010011))
    diff = np.argwhere(g.colors != h.colors)
    fib = {int(u) // 4 for u in diff.ravel()}
    assert len(fib) == 2


@pytest.mark.parametrize("index", [0, 17, 101, 217])
def test_pair_checks_with_amenability(index):
    t = enumerate_coloring_orbits()[index]
    chk, g, h = check_pair(index, t, with_amenability=True)
    assert chk.equivalent and chk.non_isomorphic and chk.ok
    assert chk.amenable_verdicts == (False, False)
    assert decide_amenable(g).companion is not None


def test_census_writes_files(tmp_path):
    rep = census16(tmp_path, workers=1)
    assert rep.classes == 218 and rep.graphs == 436 and rep.all_ok
    files = sorted(p.name for p in tmp_path.glob("*.ccm"))
    assert len(files) == 436
    rows = (tmp_path / "report.tsv").read_text().splitlines()
    assert len(rows) == 219 and rows[0].startswith("class\tcoloring")
    g = read_ccm(tmp_path / "class_0_a.ccm")
    assert g.n == 16
