from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from wlcc.census import shrikhande_rook_pair
from wlcc.core import ColoredSquareMatrix, dumps_ccm, loads_ccm, read_ccm, write_ccm
from wlcc.generators import dumps_edge_list, dumps_pls, fano, petersen_graph
from wlcc.oracle import graph_iso
from wlcc.sampling import random_graphs

VERDICTS = {"SEPARABLE", "NON-SEPARABLE", "AMENABLE", "NON-AMENABLE", "EQUIVALENT", "NOT-EQUIVALENT",
            "ISOMORPHIC", "NON-ISOMORPHIC"}


def wlcc(*args, stdin=None):
    return subprocess.run([sys.executable, "-m", "wlcc", *map(str, args)], input=stdin,
                          capture_output=True, text=True, timeout=300)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert wlcc("gen", "shrikhande-rook", "-o", d).returncode == 0
    assert wlcc("gen", "t16", "-o", d / "t16.ccm").returncode == 0
    return d


def first_token(out):
    tok = out.split()[0]
    assert tok in VERDICTS
    return tok


# -- verdicts -----------------------------------------------------------------------------

def test_separable_t16(files):
    r = wlcc("separable", files / "t16.ccm")
    assert r.returncode == 0
    assert first_token(r.stdout) == "NON-SEPARABLE"
    assert "irredundant" in r.stdout


def test_gen_cyclic_pipe_to_separable():
    ccm = wlcc("gen", "cyclic", 14).stdout
    r = wlcc("separable", "-", stdin=ccm)
    assert first_token(r.stdout) == "NON-SEPARABLE"
    ccm = wlcc("gen", "cyclic", 13).stdout
    assert first_token(wlcc("separable", "-", stdin=ccm).stdout) == "SEPARABLE"


@pytest.mark.parametrize("family,verdict", [("fano", "NON-SEPARABLE"), ("mk", "SEPARABLE"), ("pappus", "NON-SEPARABLE")])
def test_named_families(family, verdict):
    r = wlcc("separable", "-", stdin=wlcc("gen", family).stdout)
    assert first_token(r.stdout) == verdict


def test_amenable_on_twelve_vertices(tmp_path):
    g = next(g for g in random_graphs(seed=12, count=200, nmax=12, nmin=12)
             if int(np.bincount(np.diagonal(g.colors)).max()) == 4)
    write_ccm(tmp_path / "g.ccm", g)
    r = wlcc("amenable", tmp_path / "g.ccm")
    assert r.returncode == 0 and first_token(r.stdout) == "AMENABLE"


def test_amenable_writes_companion(files, tmp_path):
    out = tmp_path / "comp.ccm"
    r = wlcc("amenable", files / "shrikhande.ccm", "--companion", out)
    assert first_token(r.stdout) == "NON-AMENABLE"
    comp = read_ccm(out)
    assert graph_iso(comp, read_ccm(files / "rook.ccm")) is not None


def test_equiv_and_iso(files):
    s, r = files / "shrikhande.ccm", files / "rook.ccm"
    assert first_token(wlcc("equiv", s, r).stdout) == "EQUIVALENT"
    assert first_token(wlcc("iso", s, r).stdout) == "NON-ISOMORPHIC"
    assert first_token(wlcc("iso", s, r, "--ignore-vertex-colors").stdout) == "NON-ISOMORPHIC"
    out = wlcc("iso", s, s).stdout.split()
    assert out[0] == "ISOMORPHIC" and sorted(map(int, out[1:])) == list(range(16))


def test_not_equivalent(tmp_path):
    write_ccm(tmp_path / "a.ccm", ColoredSquareMatrix([[0, 2, 2], [2, 0, 2], [2, 2, 1]]))
    write_ccm(tmp_path / "b.ccm", ColoredSquareMatrix([[0, 2, 2], [2, 1, 2], [2, 2, 1]]))
    assert first_token(wlcc("equiv", tmp_path / "a.ccm", tmp_path / "b.ccm").stdout) == "NOT-EQUIVALENT"


def test_close(files, tmp_path):
    out = tmp_path / "closed.ccm"
    r = wlcc("close", files / "shrikhande.ccm", "-o", out)
    assert r.returncode == 0
    assert r.stdout.splitlines() == ["rounds 3", f"classes {read_ccm(out).colors.max() + 1}", "fibers 4 4 4 4"]


def test_classify(files):
    r = wlcc("classify", files / "t16.ccm")
    rows = r.stdout.splitlines()
    assert rows[0].split("\t")[0] == "kind"
    assert sum(1 for x in rows if x.startswith("cell\t")) == 4
    assert all(x.endswith("\tTwoK22\tno") for x in rows if x.startswith("interspace\t"))


def test_gen_cfi_and_pls(tmp_path):
    (tmp_path / "p.txt").write_text(dumps_edge_list(*petersen_graph()))
    r = wlcc("gen", "cfi", tmp_path / "p.txt")
    assert loads_ccm(r.stdout).n == 40
    (tmp_path / "f.pls").write_text(dumps_pls(fano()))
    r = wlcc("gen", "pls", tmp_path / "f.pls", "-o", tmp_path / "f.ccm")
    assert r.returncode == 0 and read_ccm(tmp_path / "f.ccm").n == 28


def test_census16(tmp_path):
    r = wlcc("census16", "--out", tmp_path)
    assert r.returncode == 0
    assert r.stdout.strip() == "classes 218 graphs 436 all-ok true"
    assert len(list(tmp_path.glob("*.ccm"))) == 436


def test_outputs_are_byte_identical(files):
    a = wlcc("separable", files / "t16.ccm").stdout
    b = wlcc("separable", files / "t16.ccm").stdout
    assert a == b
    assert wlcc("gen", "pappus").stdout == wlcc("gen", "pappus").stdout


# -- errors -------------------------------------------------------------------------------

@pytest.mark.parametrize("args", [[], ["frobnicate"], ["separable"], ["gen", "cyclic"], ["gen", "cyclic", "x"],
                                  ["gen", "nope"], ["gen", "shrikhande-rook"], ["census16"]])
def test_usage_errors(args):
    r = wlcc(*args)
    assert r.returncode == 1 and r.stdout == "" and "usage" in r.stderr


def test_invalid_inputs(tmp_path):
    (tmp_path / "bad.ccm").write_text("ccm 2\n0 1\n")
    assert wlcc("separable", tmp_path / "bad.ccm").returncode == 2
    assert wlcc("separable", tmp_path / "missing.ccm").returncode == 2
    # not coherent
    write_ccm(tmp_path / "nc.ccm", ColoredSquareMatrix([[0, 1, 2], [1, 0, 2], [2, 2, 0]]))
    r = wlcc("separable", tmp_path / "nc.ccm")
    assert r.returncode == 2 and "invalid input" in r.stderr
    assert wlcc("gen", "cyclic", 5).returncode == 2
    (tmp_path / "star.txt").write_text("graph 5\ne 0 1\ne 0 2\ne 0 3\ne 0 4\n")
    assert wlcc("gen", "cfi", tmp_path / "star.txt").returncode == 2


def test_multiplicity_five_is_invalid(tmp_path):
    write_ccm(tmp_path / "k5.ccm", ColoredSquareMatrix([[0 if i == j else 1 for j in range(5)] for i in range(5)]))
    r = wlcc("amenable", tmp_path / "k5.ccm")
    assert r.returncode == 2 and "multiplicity" in r.stderr


def test_stdin_round_trip():
    s, _ = shrikhande_rook_pair()
    r = wlcc("close", "-", stdin=dumps_ccm(s))
    assert r.returncode == 0 and r.stdout.startswith("rounds 3")
