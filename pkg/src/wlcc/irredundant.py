"""Separability of irredundant configurations via a linear system over GF(2).

Every strict combinatorial automorphism is a product of cell automorphisms
and acts on an interspace between X and Y by switching it exactly when it
flips one, but not both, of the two matchings the interspace determines.
One bit per determined matching (that is, per dcc incidence) therefore
describes the action completely.  A fiber that lies on three hyperedges
has an F4 cell whose Klein group flips an even number of its matchings;
every other fiber realizes all flip patterns of its determined matchings.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import CoherentConfiguration, ColoredSquareMatrix, PreconditionError
from .structure import CellTag, classify_cell, dcc, fiber_graph, require_irredundant


# -- GF(2) elimination --------------------------------------------------------

class Gf2Elimination:
    """Row reduction of a fixed matrix, reusable for many right-hand sides.

    Rows are Python ints used as bitsets over the columns.  Each reduced row
    carries a tag bitset recording which original rows were combined into
    it, so a right-hand side is transformed by parity of ``rhs & tag``.
    """

    def __init__(self, rows: Sequence[int], ncols: int):
        self.ncols = ncols
        self.nrows = len(rows)
        for r in rows:
            if r < 0 or r >> ncols:
                raise PreconditionError("row has bits beyond the column count")
        work = [(int(r), 1 << i) for i, r in enumerate(rows)]
        pivots: List[Tuple[int, int, int]] = []  # (column, row bits, tag)
        for col in range(ncols):
            bit = 1 << col
            hit = next((i for i, (r, _) in enumerate(work) if r & bit), None)
            if hit is None:
                continue
            pr, pt = work.pop(hit)
            work = [(r ^ pr, t ^ pt) if r & bit else (r, t) for r, t in work]
            pivots = [(c, r ^ pr, t ^ pt) if r & bit else (c, r, t) for c, r, t in pivots]
            pivots.append((col, pr, pt))
        self.pivots = pivots
        self.dependencies = [t for r, t in work]  # combinations of rows that sum to zero
        self.rank = len(pivots)

    def solve(self, rhs_bits: int) -> Optional[int]:
        """A solution as a bitset over columns, or None if inconsistent."""
        for t in self.dependencies:
            if bin(rhs_bits & t).count("1") & 1:
                return None
        x = 0
        for col, _, tag in self.pivots:
            if bin(rhs_bits & tag).count("1") & 1:
                x |= 1 << col
        return x

    @property
    def kernel_dim(self) -> int:
        return self.ncols - self.rank


def _pack(bits: Sequence[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b & 1:
            out |= 1 << i
    return out


def gf2_solve(rows: Sequence[Sequence[int]], rhs: Sequence[int], ncols: Optional[int] = None) -> Optional[List[int]]:
    """Solve A x = b over GF(2); rows are 0/1 lists (or int bitsets)."""
    if len(rows) != len(rhs):
        raise PreconditionError("row count and right-hand side length differ")
    packed = []
    for r in rows:
        if isinstance(r, int):
            packed.append(r)
        else:
            if ncols is not None and len(r) != ncols:
                raise PreconditionError("row length differs from column count")
            ncols = len(r) if ncols is None else ncols
            packed.append(_pack(r))
    if ncols is None:
        ncols = max((r.bit_length() for r in packed), default=0)
    x = Gf2Elimination(packed, ncols).solve(_pack(rhs))
    if x is None:
        return None
    return [(x >> i) & 1 for i in range(ncols)]


# -- the switch system ---------------------------------------------------------

@dataclass(frozen=True)
class SwitchVariable:
    fiber: int
    hyperedge: int


@dataclass(frozen=True)
class EdgeRow:
    edge: Tuple[int, int]
    hyperedge: int
    var_a: int
    var_b: int


@dataclass(frozen=True)
class SwitchSystem:
    variables: Tuple[SwitchVariable, ...]
    parity_rows: Tuple[int, ...]  # bitsets over variables
    parity_fibers: Tuple[int, ...]
    edge_rows: Tuple[EdgeRow, ...]  # in fiber-graph edge order

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def rows(self) -> List[int]:
        return list(self.parity_rows) + [(1 << e.var_a) | (1 << e.var_b) for e in self.edge_rows]

    def full_rhs(self, edge_bits: Sequence[int]) -> int:
        if len(edge_bits) != len(self.edge_rows):
            raise PreconditionError("right-hand side length differs from edge count")
        return _pack(edge_bits) << len(self.parity_rows)


def switch_system(c: CoherentConfiguration) -> SwitchSystem:
    hit = c._cache.get("switch_system")
    if hit is not None:
        return hit
    require_irredundant(c)
    d = dcc(c)
    var_index: Dict[Tuple[int, int], int] = {}
    variables = []
    for x in range(c.nfibers):
        for h, _ in sorted(d.incidence[x], key=lambda hm: d.hyperedges[hm[0]][0]):
            var_index[x, h] = len(variables)
            variables.append(SwitchVariable(x, h))
    parity, pfibers = [], []
    for x in range(c.nfibers):
        if d.degree(x) == 3:
            if classify_cell(c, x) is not CellTag.F4:
                raise PreconditionError(f"fiber {x} has degree 3 but cell {classify_cell(c, x).value}")
            row = 0
            for h, _ in d.incidence[x]:
                row |= 1 << var_index[x, h]
            parity.append(row)
            pfibers.append(x)
    edges = []
    for a, b in fiber_graph(c).edges:
        h = d.edge_owner[a, b]
        edges.append(EdgeRow((a, b), h, var_index[a, h], var_index[b, h]))
    out = SwitchSystem(tuple(variables), tuple(parity), tuple(pfibers), tuple(edges))
    c._cache["switch_system"] = out
    return out


def _elimination(c: CoherentConfiguration) -> Gf2Elimination:
    hit = c._cache.get("switch_elim")
    if hit is None:
        sysm = switch_system(c)
        hit = Gf2Elimination(sysm.rows(), sysm.nvars)
        c._cache["switch_elim"] = hit
    return hit


def saa_order_log2(c: CoherentConfiguration) -> int:
    require_irredundant(c)
    return sum(len(h) - 1 for h in dcc(c).hyperedges)


def rhs_for_generator(c: CoherentConfiguration, x: int, h: int) -> Tuple[int, ...]:
    """Edge bits of the generator switching every interspace from x inside hyperedge h."""
    d = dcc(c)
    if not 0 <= h < len(d.hyperedges) or x not in d.hyperedges[h]:
        raise PreconditionError(f"fiber {x} is not on hyperedge {h}")
    members = set(d.hyperedges[h]) - {x}
    return tuple(int((a == x and b in members) or (b == x and a in members)) for a, b in fiber_graph(c).edges)


def switch_set_rhs(c: CoherentConfiguration, switched_edges) -> Tuple[int, ...]:
    s = {tuple(sorted(e)) for e in switched_edges}
    return tuple(int(e in s) for e in fiber_graph(c).edges)


def is_induced(c: CoherentConfiguration, edge_bits: Sequence[int]) -> bool:
    """Whether the bound permutation switching these edges comes from a point map."""
    sysm = switch_system(c)
    return _elimination(c).solve(sysm.full_rhs(edge_bits)) is not None


def is_clique_cut(members: Sequence[int], switched) -> bool:
    """Whether the switched pairs inside a clique are empty or all pairs across some split."""
    members = sorted(members)
    inside = {tuple(sorted(e)) for e in switched if e[0] in members and e[1] in members}
    if not inside:
        return True
    first, rest = members[0], members[1:]
    for mask in range(1 << len(rest)):
        side = {first} | {v for i, v in enumerate(rest) if mask >> i & 1}
        if len(side) == len(members):
            continue
        cut = {(a, b) for a, b in combinations(members, 2) if (a in side) != (b in side)}
        if cut == inside:
            return True
    return False


def switch_set_allowed(c: CoherentConfiguration, switched) -> bool:
    """Bipartite law: switching S is algebraic iff S meets every clique in a cut."""
    require_irredundant(c)
    switched = [tuple(sorted(e)) for e in switched]
    return all(is_clique_cut(h, switched) for h in dcc(c).hyperedges)


def incidences(c: CoherentConfiguration) -> List[Tuple[int, int]]:
    """All (fiber, hyperedge) pairs in canonical order."""
    d = dcc(c)
    return [(x, h) for x in range(c.nfibers)
            for h, _ in sorted(d.incidence[x], key=lambda hm: d.hyperedges[hm[0]][0])]


@dataclass(frozen=True)
class IrredundantVerdict:
    separable: bool
    fiber: Optional[int] = None
    hyperedge: Optional[int] = None


def decide_separable_irredundant(c: CoherentConfiguration) -> IrredundantVerdict:
    require_irredundant(c)
    for x, h in incidences(c):
        if not is_induced(c, rhs_for_generator(c, x, h)):
            return IrredundantVerdict(False, x, h)
    return IrredundantVerdict(True)


def scac_order_log2_all_f4(c: CoherentConfiguration) -> int:
    """log2 of the number of color-preserving strict combinatorial automorphisms."""
    require_irredundant(c)
    d = dcc(c)
    for x in range(c.nfibers):
        if classify_cell(c, x) is not CellTag.F4 or d.degree(x) != 3:
            raise PreconditionError("every cell must be F4 with all three matchings determined")
    return _elimination(c).kernel_dim


# -- companion graph ------------------------------------------------------------

def build_companion(c: CoherentConfiguration) -> Tuple[ColoredSquareMatrix, Dict[Tuple[int, int], int]]:
    """Vertex-colored graph with one 2K22 block per non-uniform interspace.

    Loop colors are fiber indices; arrows use ``f`` for non-edges and
    ``f + 1`` for edges.  The registry maps (x, y) to the class realized.
    """
    require_irredundant(c)
    f = c.nfibers
    col = np.full((c.n, c.n), f, dtype=np.int64)
    for x, fib in enumerate(c.fibers):
        for u in fib:
            col[u, u] = x
    registry: Dict[Tuple[int, int], int] = {}
    for x, y in fiber_graph(c).edges:
        r = min(c.block(x, y))
        registry[x, y] = r
        registry[y, x] = int(c.transpose[r])
        mask = c.colors == r
        col[mask] = f + 1
        col[mask.T] = f + 1
    return ColoredSquareMatrix(col), registry
