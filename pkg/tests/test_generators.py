from __future__ import annotations

import random
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlcc.core import InvalidInput, PreconditionError
from wlcc.generators import (
    PartialLinearSpace,
    c8_with_pendant,
    cycle_graph,
    cyclic_pls,
    direct_sum,
    double_fiber,
    dumps_edge_list,
    dumps_pls,
    fano,
    graph_problems,
    hypergraph_isomorphic,
    loads_edge_list,
    loads_pls,
    mobius_kantor,
    mobius_kantor_graph,
    pappus,
    petersen_graph,
    pls_problems,
    pls_to_config,
    random_irredundant,
    random_pls,
    skew_config,
    t16,
)
from wlcc.structure import CellTag, InterspaceTag, classify_cell, classify_interspace, is_irredundant

from tests.strategies import seeds


# -- partial linear spaces -----------------------------------------------------------

@pytest.mark.parametrize("n", range(7, 65))
def test_cyclic_spaces_are_linear(n):
    d = cyclic_pls(n)
    assert pls_problems(d) == []
    assert all(d.degree(p) == 3 for p in range(n))
    for a, b in combinations(d.lines, 2):
        assert len(set(a) & set(b)) <= 1


@pytest.mark.parametrize("n", [0, 3, 6])
def test_cyclic_needs_seven_points(n):
    with pytest.raises(PreconditionError):
        cyclic_pls(n)


def test_fano_is_projective():
    d = fano()
    for p, q in combinations(range(7), 2):
        assert sum(1 for ln in d.lines if p in ln and q in ln) == 1


def test_pappus_shape():
    d = pappus()
    assert len(d.lines) == 9 and all(d.degree(p) == 3 for p in range(9))
    assert not hypergraph_isomorphic(d, cyclic_pls(9))


def test_cyclic_nine_bases_are_isomorphic():
    # both choices give the same 9_3 configuration up to relabeling, and it is not Pappus
    assert hypergraph_isomorphic(cyclic_pls(9, (0, 2, 3)), cyclic_pls(9, (0, 3, 4)))
    assert not hypergraph_isomorphic(pappus(), cyclic_pls(9, (0, 3, 4)))


def test_mobius_kantor_is_not_fano_sized():
    assert not hypergraph_isomorphic(mobius_kantor(), fano())


@pytest.mark.parametrize("npts,lines,problem", [
    (2, ((0,),), "fewer than 2"),
    (2, ((0, 0, 1),), "repeats"),
    (2, ((0, 9),), "out of range"),
    (4, ((0, 1, 2), (0, 1, 3)), "share more than one"),
    (5, ((0, 1), (0, 2), (0, 3), (0, 4)), "degree 4"),
    (4, ((0, 1), (2, 3)), "disconnected"),
    (3, ((0, 1),), "lies on no line"),
])
def test_pls_problems(npts, lines, problem):
    probs = pls_problems(PartialLinearSpace(npts, lines))
    assert any(problem in p for p in probs)


def test_invalid_space_rejected_by_builder():
    with pytest.raises(InvalidInput):
        pls_to_config(PartialLinearSpace(3, ((0, 1, 2), (0, 1))))


def test_cell_choice_needs_low_degree():
    d = PartialLinearSpace(3, ((0, 1), (1, 2)))
    with pytest.raises(PreconditionError):
        pls_to_config(d, {1: "C4"})
    c = pls_to_config(d, {0: "C4", 2: "DirC4"})
    assert [classify_cell(c, x) for x in range(3)] == [CellTag.C4, CellTag.F4, CellTag.DIRC4]


def test_unknown_cell_choice():
    with pytest.raises(PreconditionError):
        pls_to_config(PartialLinearSpace(2, ((0, 1),)), {0: "K4"})


@pytest.mark.parametrize("geom", [fano, mobius_kantor, pappus])
def test_pls_config_shape(geom):
    d = geom()
    c = pls_to_config(d)
    assert c.n == 4 * d.npoints and c.nfibers == d.npoints
    for p, q in combinations(range(d.npoints), 2):
        on_line = any(p in ln and q in ln for ln in d.lines)
        tag = classify_interspace(c, p, q).tag
        assert tag is (InterspaceTag.TWO_K22 if on_line else InterspaceTag.UNIFORM)


# -- text formats ------------------------------------------------------------------

@given(seeds, st.integers(min_value=1, max_value=12))
def test_pls_round_trip(seed, npts):
    d = random_pls(random.Random(seed), npts)
    back = loads_pls(dumps_pls(d))
    assert back == d


def test_pls_text_with_comments():
    d = loads_pls("# triangle\npls 3 3\n0 1\n1 2\n# gap\n0 2\n")
    assert d.lines == ((0, 1), (1, 2), (0, 2))


@pytest.mark.parametrize("text", ["", "pls 3\n", "pls 2 2\n0 1\n", "pls 2 1\na b\n", "graph 2\n"])
def test_pls_rejects_malformed(text):
    with pytest.raises(InvalidInput):
        loads_pls(text)


def test_edge_list_round_trip():
    n, e = petersen_graph()
    assert loads_edge_list(dumps_edge_list(n, e)) == (n, [tuple(x) for x in e])


@pytest.mark.parametrize("text", ["", "graph\n", "graph 3\ne 0\n", "graph 3\ne 0 5\n", "graph 3\nx 0 1\n", "graph q\n"])
def test_edge_list_rejects_malformed(text):
    with pytest.raises(InvalidInput):
        loads_edge_list(text)


def test_graph_problems():
    assert graph_problems(*cycle_graph(5)) == []
    assert graph_problems(5, [(0, i) for i in range(1, 5)]) == ["maximum degree 4 > 3"]
    assert graph_problems(4, [(0, 1), (2, 3)]) == ["graph is disconnected"]


def test_skew_config_rejects_multigraph():
    with pytest.raises(InvalidInput):
        skew_config(2, [(0, 1), (1, 0)])
    with pytest.raises(InvalidInput):
        skew_config(2, [(0, 0)])


def test_generalized_petersen_cubic():
    for n, e in (petersen_graph(), mobius_kantor_graph()):
        deg = np.bincount(np.array(e).ravel(), minlength=n)
        assert set(deg.tolist()) == {3}


# -- hypergraph isomorphism ---------------------------------------------------------

@given(seeds, st.integers(min_value=1, max_value=9), st.randoms(use_true_random=False))
def test_relabeled_space_is_isomorphic(seed, npts, rnd):
    d = random_pls(random.Random(seed), npts)
    perm = list(range(npts))
    rnd.shuffle(perm)
    e = PartialLinearSpace(npts, tuple(tuple(perm[p] for p in ln) for ln in reversed(d.lines)))
    assert hypergraph_isomorphic(d, e)


def test_path_is_not_triangle():
    a = PartialLinearSpace(3, ((0, 1), (1, 2)))
    b = PartialLinearSpace(3, ((0, 1), (1, 2), (0, 2)))
    assert not hypergraph_isomorphic(a, b)


# -- composition -----------------------------------------------------------------------

def test_direct_sum_sizes():
    c = direct_sum(t16(), pls_to_config(PartialLinearSpace(1, ())))
    assert c.n == 20 and c.nfibers == 5
    assert classify_interspace(c, 0, 4).tag is InterspaceTag.UNIFORM


def test_double_fiber_adds_matching():
    c = double_fiber(t16(), 2)
    assert c.n == 20 and c.nfibers == 5
    assert classify_interspace(c, 2, 4).tag is InterspaceTag.FOUR_4X4_A


def test_c8_with_pendant_shape():
    c = c8_with_pendant()
    assert c.n == 12
    tags = sorted(classify_interspace(c, x, y).tag.value for x, y in combinations(range(3), 2))
    assert tags == sorted([InterspaceTag.C8.value, InterspaceTag.TWO_K22.value, InterspaceTag.UNIFORM.value])


@given(seeds, st.integers(min_value=1, max_value=12))
def test_random_pls_is_valid(seed, npts):
    d = random_pls(random.Random(seed), npts)
    assert d.npoints == npts and pls_problems(d) == []


@given(seeds)
def test_random_irredundant_is_irredundant(seed):
    c = random_irredundant(random.Random(seed), max_fibers=6)
    assert is_irredundant(c)[0]
