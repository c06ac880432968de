from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlcc.closure import coherent_closure
from wlcc.core import (
    CoherenceError,
    ColoredSquareMatrix,
    InvalidInput,
    PointMap,
    PreconditionError,
    RainbowError,
    apply_point_map,
    dumps_ccm,
    intersection_number,
    intersection_table,
    loads_ccm,
    normalize_transpose,
    rerank,
    restrict,
    restrict_points,
    transpose_consistent,
    validate_colored_graph,
    verify_coherence,
)
from wlcc.generators import MATCHINGS, c8_pair_config, skew_config, t16
from wlcc.sampling import random_colored_graph
from wlcc.structure import InterspaceTag, classify_cell, classify_interspace, CellTag

from tests.strategies import colored_graphs, rainbows


def f4_scheme() -> np.ndarray:
    m = np.zeros((4, 4), dtype=np.int64)
    for i, pairs in enumerate(MATCHINGS):
        for a, b in pairs:
            m[a, b] = m[b, a] = i + 1
    return m


# -- validation ----------------------------------------------------------------------

def test_single_loop_is_valid():
    assert validate_colored_graph(ColoredSquareMatrix([[0]])) == []


def test_loop_color_on_arrow_is_reported():
    diags = validate_colored_graph(ColoredSquareMatrix([[0, 0], [0, 0]]))
    assert diags and diags[0].startswith("loop color reused on arrow")


def test_distinct_loop_and_arrow_colors_are_valid():
    assert validate_colored_graph(ColoredSquareMatrix([[0, 2], [3, 1]])) == []


def test_sparse_color_ids_are_reported():
    diags = validate_colored_graph(ColoredSquareMatrix([[0, 3], [3, 0]]))
    assert any("not dense" in d for d in diags)


def test_non_square_rejected():
    with pytest.raises(InvalidInput):
        ColoredSquareMatrix([[0, 1, 2]])


def test_negative_ids_reported():
    assert validate_colored_graph(ColoredSquareMatrix([[0, -1], [-1, 0]])) == ["negative color id"]


# -- transposes ----------------------------------------------------------------------

def test_normalize_splits_asymmetric_pair():
    out = normalize_transpose(ColoredSquareMatrix([[0, 2], [3, 1]])).colors
    assert out[0, 1] != out[1, 0]
    assert len({out[0, 0], out[1, 1], out[0, 1], out[1, 0]}) == 4


def test_normalize_keeps_symmetric_coloring():
    m = ColoredSquareMatrix([[0, 2, 2], [2, 1, 3], [2, 3, 1]])
    assert np.array_equal(rerank(normalize_transpose(m).colors), rerank(m.colors))


def test_normalize_merges_nothing_across_transposes():
    # arrows 0->1 and 1->0 share a color, but 0->2 / 2->0 do not
    m = ColoredSquareMatrix([[0, 1, 1], [1, 0, 2], [2, 2, 0]])
    out = normalize_transpose(m).colors
    assert transpose_consistent(out)


@given(colored_graphs(nmax=10))
def test_normalize_is_transpose_consistent(g):
    out = normalize_transpose(g).colors
    n = g.n
    for u in range(n):
        for v in range(n):
            for a in range(n):
                for b in range(n):
                    if out[u, v] == out[a, b]:
                        assert out[v, u] == out[b, a]


@given(colored_graphs(nmax=12))
def test_normalize_is_idempotent(g):
    once = normalize_transpose(g)
    twice = normalize_transpose(once)
    assert np.array_equal(rerank(once.colors), rerank(twice.colors))


def test_rainbow_requires_transpose_closure():
    with pytest.raises(RainbowError):
        verify_coherence(ColoredSquareMatrix([[0, 2, 2], [3, 1, 2], [2, 2, 1]]))


# -- coherence -------------------------------------------------------------------------

def test_f4_scheme_is_coherent():
    c = verify_coherence(f4_scheme())
    assert c.k == 4 and c.nfibers == 1
    assert classify_cell(c, 0) is CellTag.F4


def test_three_point_rainbow_witness():
    # loops; one arrow pair {01, 10}; everything else
    m = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    with pytest.raises(CoherenceError) as err:
        verify_coherence(m)
    w = err.value.witness
    assert w.count1 != w.count2
    # brute force: the two pairs of class T really differ in p(uv) for (R, S)
    c = rerank(m)

    def p(u, v):
        return sum(1 for x in range(3) if c[u, x] == w.R and c[x, v] == w.S)

    assert c[w.pair1] == c[w.pair2] == w.T
    assert p(*w.pair1) == w.count1 and p(*w.pair2) == w.count2
    k = int(c.max()) + 1
    least = min(
        (r, s_, t)
        for r in range(k) for s_ in range(k) for t in range(k)
        if len({sum(1 for x in range(3) if c[u, x] == r and c[x, v] == s_)
                for u in range(3) for v in range(3) if c[u, v] == t}) > 1
    )
    assert (w.R, w.S, w.T) == least == (1, 1, 0)


def test_discrete_two_point_configuration():
    c = verify_coherence(np.array([[0, 2], [3, 1]]))
    assert c.k == 4 and c.nfibers == 2


def test_witness_is_deterministic():
    m = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    ws = []
    for _ in range(3):
        with pytest.raises(CoherenceError) as err:
            verify_coherence(m)
        ws.append(err.value.witness)
    assert ws[0] == ws[1] == ws[2]


@pytest.mark.parametrize("cfg", [t16(), c8_pair_config(), skew_config(3, [(0, 1), (1, 2)])], ids=["t16", "c8", "p3"])
def test_valency_identity(cfg):
    for r in range(cfg.k):
        x, y = cfg.rel_src[r], cfg.rel_dst[r]
        assert cfg.valency[r] * len(cfg.fibers[x]) == cfg.size[r] == cfg.valency[cfg.transpose[r]] * len(cfg.fibers[y])


def test_closures_pass_verification_n_up_to_24():
    rng = random.Random(24)
    for _ in range(200):
        g = random_colored_graph(rng, rng.randint(1, 24), mult=rng.randint(1, 6))
        cfg = coherent_closure(normalize_transpose(g)).config
        again = verify_coherence(cfg.colors)
        assert np.array_equal(again.colors, cfg.colors)


# -- intersection numbers ----------------------------------------------------------------

def test_reflexive_intersection_is_valency():
    c = t16()
    for r in range(c.k):
        x = c.rel_src[r]
        diag = c.block(x, x)[0]
        assert c.reflexive[diag]
        assert intersection_number(c, diag, r, c.transpose[r]) == c.valency[r]


def test_non_collocated_triple_is_zero():
    c = t16()
    r01 = c.block(0, 1)[0]
    r23 = c.block(2, 3)[0]
    assert intersection_number(c, r01, r01, r23) == 0


def test_c8_cycle_never_closes_on_determined_matching():
    c = c8_pair_config()
    cyc = [r for r in c.block(1, 0) if c.valency[r] == 2][0]
    # matching at the first fiber determined by the cycle: antipodal pairs
    m = [r for r in c.block(0, 0) if c.valency[r] == 1 and not c.reflexive[r]][0]
    assert sorted(c.pairs(m))[:2] == [(0, 2), (1, 3)]
    brute = sum(1 for w in c.fibers[1] if c.colors[0, w] == c.transpose[cyc] and c.colors[w, 2] == cyc)
    assert brute == 0
    assert intersection_number(c, m, c.transpose[cyc], cyc) == 0


def test_intersection_number_range_checked():
    with pytest.raises(PreconditionError):
        intersection_number(t16(), 999, 0, 0)


def test_table_agrees_with_pointwise_numbers():
    c = skew_config(3, [(0, 1), (1, 2)])
    keys, vals = intersection_table(c)
    k = c.k
    for key, val in zip(keys.tolist(), vals.tolist()):
        t, rest = divmod(key, k * k)
        r, s = divmod(rest, k)
        assert intersection_number(c, t, r, s) == val


# -- restriction and maps ------------------------------------------------------------------

def test_restrict_to_everything_is_identity():
    c = t16()
    assert np.array_equal(restrict(c, range(c.nfibers)).colors, c.colors)


def test_restrict_t16_to_three_fibers():
    c = t16()
    sub = verify_coherence(restrict(c, [0, 1, 3]).colors)
    tags = {classify_interspace(sub, x, y).tag for x in range(3) for y in range(x + 1, 3)}
    assert tags == {InterspaceTag.TWO_K22}


def test_restrict_single_fiber_is_f4():
    sub = restrict(skew_config(3, [(0, 1), (1, 2)]), [1])
    assert classify_cell(sub, 0) is CellTag.F4
    assert sub.labels == (4, 5, 6, 7)


def test_restrict_points_needs_fiber_alignment():
    with pytest.raises(PreconditionError):
        restrict_points(t16(), [0, 1, 2])


def test_identity_point_map():
    c = t16()
    img, cmap = apply_point_map(c, PointMap.identity(c.n))
    assert np.array_equal(img.colors, c.colors)
    assert cmap == tuple(range(c.k))


@given(st.permutations(range(16)))
def test_point_map_then_inverse(perm):
    c = t16()
    phi = PointMap(tuple(perm))
    img, _ = apply_point_map(c, phi)
    back, _ = apply_point_map(img, phi.inverse())
    assert np.array_equal(back.colors, c.colors)


@given(st.permutations(range(12)))
def test_point_map_preserves_intersection_numbers(perm):
    c = skew_config(3, [(0, 1), (1, 2)])
    img, cmap = apply_point_map(c, PointMap(tuple(perm)))
    img = verify_coherence(img.colors)
    for t in range(c.k):
        for r in range(c.k):
            for s in (c.transpose[r], r):
                assert intersection_number(c, t, r, s) == intersection_number(img, cmap[t], cmap[r], cmap[s])


def test_klein_element_fixes_matching_setwise():
    c = verify_coherence(f4_scheme())
    phi = PointMap((1, 0, 3, 2))  # swaps the pairs of the first matching's partner classes
    _, cmap = apply_point_map(c, phi)
    assert cmap == tuple(range(c.k))


def test_non_bijective_point_map_rejected():
    with pytest.raises(InvalidInput):
        PointMap((0, 0, 1))


# -- .ccm format --------------------------------------------------------------------------

def test_ccm_round_trip_with_names():
    m = ColoredSquareMatrix([[0, 2], [3, 1]], {2: "red", 3: "blue"})
    back = loads_ccm(dumps_ccm(m))
    assert np.array_equal(back.colors, m.colors)
    assert back.color_names == {2: "red", 3: "blue"}


def test_ccm_comments_and_whitespace():
    text = "# a comment\nccm 2\n  0   1 \n# mid\n1 0\n"
    assert loads_ccm(text).colors.tolist() == [[0, 1], [1, 0]]


@pytest.mark.parametrize("text", ["", "ccm x\n", "ccm 2\n0 1\n", "ccm 2\n0 1\n1\n", "ccm 1\n0\njunk\n", "ccm 1\na\n"])
def test_ccm_rejects_malformed(text):
    with pytest.raises(InvalidInput):
        loads_ccm(text)


@given(rainbows(nmax=8))
def test_ccm_round_trip_random(r):
    assert np.array_equal(loads_ccm(dumps_ccm(r)).colors, r.colors)
