"""Cut-down pipeline and the top-level separability and amenability deciders."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .closure import ClosureResult, coherent_closure, wl2_equivalent
from .core import (
    CoherentConfiguration,
    ColoredSquareMatrix,
    InternalError,
    PreconditionError,
    intersection_number,
    normalize_transpose,
    require_valid,
    restrict,
    restrict_points,
)
from .irredundant import IrredundantVerdict, decide_separable_irredundant, dcc
from .structure import InterspaceTag, classify_interspace, decompose_direct_sum, fiber_graph, is_irredundant

Points = Tuple[int, ...]


# -- trace steps -------------------------------------------------------------------

@dataclass(frozen=True)
class SplitComponents:
    component: Points
    parts: Tuple[Points, ...]


@dataclass(frozen=True)
class CutMatching:
    component: Points
    fiber: Points
    partner: Points


@dataclass(frozen=True)
class CutTwoFiber:
    component: Points
    fiber: Points


@dataclass(frozen=True)
class CutC8Pair:
    component: Points
    fiber: Points
    partner: Points


@dataclass(frozen=True)
class BaseCaseSeparable:
    component: Points
    reason: str


@dataclass(frozen=True)
class IrredundantHandoff:
    component: Points
    index: int


Step = Union[SplitComponents, CutMatching, CutTwoFiber, CutC8Pair, BaseCaseSeparable, IrredundantHandoff]


def _points(c: CoherentConfiguration) -> Points:
    return tuple(sorted(c.labels))


def _fiber_pts(c: CoherentConfiguration, x: int) -> Points:
    return c.fiber_labels(x)


def _max_fiber(c: CoherentConfiguration) -> int:
    return max((c.fiber_size(x) for x in range(c.nfibers)), default=0)


def _has_matching(c: CoherentConfiguration, x: int, y: int) -> bool:
    return classify_interspace(c, x, y).contains_matching


# -- cuts -----------------------------------------------------------------------------

def cut_matching(c: CoherentConfiguration, x: int, y: int) -> CoherentConfiguration:
    if x == y or not _has_matching(c, x, y):
        raise PreconditionError("interspace contains no matching")
    return restrict(c, [z for z in range(c.nfibers) if z != x])


def _check_indecomposable(c: CoherentConfiguration) -> None:
    if len(fiber_graph(c).components()) != 1:
        raise PreconditionError("decomposable")


def _check_matching_free(c: CoherentConfiguration) -> None:
    for a, b in fiber_graph(c).edges:
        if _has_matching(c, a, b):
            raise PreconditionError("matching interspace present")


def cut_two_fiber(c: CoherentConfiguration, x: int) -> CoherentConfiguration:
    _check_indecomposable(c)
    if c.n <= 2:
        raise PreconditionError("needs more than 2 points")
    if any(c.fiber_size(z) not in (2, 4) for z in range(c.nfibers)):
        raise PreconditionError("fiber sizes must be 2 or 4")
    _check_matching_free(c)
    if c.fiber_size(x) != 2:
        raise PreconditionError("fiber to cut must have 2 points")
    return restrict(c, [z for z in range(c.nfibers) if z != x])


def cut_c8_pair(c: CoherentConfiguration, x: int, y: int) -> CoherentConfiguration:
    _check_indecomposable(c)
    if any(c.fiber_size(z) != 4 for z in range(c.nfibers)):
        raise PreconditionError("all fibers must have 4 points")
    _check_matching_free(c)
    if c.nfibers < 3:
        raise PreconditionError("needs >= 3 fibers")
    if x == y or classify_interspace(c, x, y).tag is not InterspaceTag.C8:
        raise PreconditionError("interspace is not C8")
    return restrict(c, [z for z in range(c.nfibers) if z not in (x, y)])


# -- pipeline -----------------------------------------------------------------------

def _split(c: CoherentConfiguration, trace: List[Step]) -> List[CoherentConfiguration]:
    parts = decompose_direct_sum(c)
    if len(parts) > 1:
        trace.append(SplitComponents(_points(c), tuple(_points(p) for p in parts)))
    return parts


def _next_step(comp: CoherentConfiguration):
    """Decide what happens to an indecomposable component."""
    f = comp.nfibers
    if f <= 1:
        return ("base", "at most one fiber")
    if _max_fiber(comp) <= 3:
        return ("base", "maximum fiber size at most 3")
    for x in range(f):
        for y in range(f):
            if x != y and len(comp.block(x, y)) > 1 and _has_matching(comp, x, y):
                return ("matching", x, y)
    for x in range(f):
        if comp.fiber_size(x) == 2:
            return ("two", x)
    for x in range(f):
        for y in range(x + 1, f):
            if classify_interspace(comp, x, y).tag is InterspaceTag.C8:
                if f >= 3:
                    return ("c8", x, y)
                return ("base", "two fibers joined by C8")
    ok, why = is_irredundant(comp)
    if not ok:
        raise InternalError(f"component left unreduced: {why.value}")
    return ("irredundant",)


def reduce_to_irredundant(c: CoherentConfiguration) -> Tuple[List[CoherentConfiguration], Tuple[Step, ...]]:
    if _max_fiber(c) > 4:
        raise PreconditionError("fiber size > 4")
    trace: List[Step] = []
    out: List[CoherentConfiguration] = []
    if c.n == 0:
        trace.append(BaseCaseSeparable((), "empty configuration"))
        return out, tuple(trace)
    queue = deque(_split(c, trace))
    while queue:
        comp = queue.popleft()
        act = _next_step(comp)
        pts = _points(comp)
        kind = act[0]
        if kind == "base":
            trace.append(BaseCaseSeparable(pts, act[1]))
            continue
        if kind == "irredundant":
            trace.append(IrredundantHandoff(pts, len(out)))
            out.append(comp)
            continue
        if kind == "matching":
            _, x, y = act
            trace.append(CutMatching(pts, _fiber_pts(comp, x), _fiber_pts(comp, y)))
            rest = cut_matching(comp, x, y)
        elif kind == "two":
            _, x = act
            trace.append(CutTwoFiber(pts, _fiber_pts(comp, x)))
            rest = cut_two_fiber(comp, x)
        else:
            _, x, y = act
            trace.append(CutC8Pair(pts, _fiber_pts(comp, x), _fiber_pts(comp, y)))
            rest = cut_c8_pair(comp, x, y)
        queue.extendleft(reversed(_split(rest, trace)))
    return out, tuple(trace)


def replay_trace(c: CoherentConfiguration, trace: Sequence[Step]) -> List[CoherentConfiguration]:
    """Re-run the recorded steps and return the irredundant components."""
    live: Dict[Points, CoherentConfiguration] = {_points(c): c}
    out: List[CoherentConfiguration] = []

    def take(pts: Points) -> CoherentConfiguration:
        if pts not in live:
            raise PreconditionError(f"trace refers to unknown component {pts}")
        return live.pop(pts)

    def local(comp: CoherentConfiguration, pts: Points) -> int:
        return comp.fiber_by_labels(pts)

    for st in trace:
        if isinstance(st, SplitComponents):
            comp = take(st.component)
            lab = {l: i for i, l in enumerate(comp.labels)}
            for part in st.parts:
                live[part] = restrict_points(comp, [lab[p] for p in part])
        elif isinstance(st, CutMatching):
            comp = take(st.component)
            rest = cut_matching(comp, local(comp, st.fiber), local(comp, st.partner))
            live[_points(rest)] = rest
        elif isinstance(st, CutTwoFiber):
            comp = take(st.component)
            rest = cut_two_fiber(comp, local(comp, st.fiber))
            live[_points(rest)] = rest
        elif isinstance(st, CutC8Pair):
            comp = take(st.component)
            rest = cut_c8_pair(comp, local(comp, st.fiber), local(comp, st.partner))
            live[_points(rest)] = rest
        elif isinstance(st, BaseCaseSeparable):
            if st.component:
                take(st.component)
        elif isinstance(st, IrredundantHandoff):
            out.append(take(st.component))
    return out


def format_step(st: Step) -> str:
    def s(p):
        return "{" + ",".join(map(str, p)) + "}"

    if isinstance(st, SplitComponents):
        return f"split {s(st.component)} -> " + " ".join(s(p) for p in st.parts)
    if isinstance(st, CutMatching):
        return f"cut-matching {s(st.fiber)} partner {s(st.partner)}"
    if isinstance(st, CutTwoFiber):
        return f"cut-two-fiber {s(st.fiber)}"
    if isinstance(st, CutC8Pair):
        return f"cut-c8-pair {s(st.fiber)} {s(st.partner)}"
    if isinstance(st, BaseCaseSeparable):
        return f"base-separable {s(st.component)} ({st.reason})"
    return f"irredundant {s(st.component)} #{st.index}"


# -- deciders -------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    trace: Tuple[Step, ...]
    component: Optional[CoherentConfiguration] = None
    fiber: Optional[Points] = None  # X, as original point ids
    hyperedge: Optional[Tuple[Points, ...]] = None  # C, as fibers of original point ids
    local: Optional[IrredundantVerdict] = None


def decide_separable(c: CoherentConfiguration) -> SeparabilityVerdict:
    comps, trace = reduce_to_irredundant(c)
    for comp in comps:
        v = decide_separable_irredundant(comp)
        if not v.separable:
            h = dcc(comp).hyperedges[v.hyperedge]
            return SeparabilityVerdict(
                False, trace, comp, comp.fiber_labels(v.fiber),
                tuple(comp.fiber_labels(z) for z in h), v,
            )
    return SeparabilityVerdict(True, trace)


@dataclass(frozen=True)
class AmenabilityVerdict:
    amenable: bool
    closure: ClosureResult
    separability: SeparabilityVerdict
    companion: Optional[ColoredSquareMatrix] = None


class MultiplicityError(PreconditionError):
    pass


def color_multiplicity(g: ColoredSquareMatrix) -> int:
    if g.n == 0:
        return 0
    return int(np.bincount(np.diagonal(g.colors)).max())


def _pair_domain(c: CoherentConfiguration, x: int, y: int) -> List[Dict[int, int]]:
    """Valency-preserving permutations of the classes between x and y."""
    rels = c.block(x, y)
    sig = {r: (int(c.valency[r]), int(c.valency[c.transpose[r]])) for r in rels}
    out = []
    for img in permutations(rels):
        if all(sig[a] == sig[b] for a, b in zip(rels, img)):
            out.append(dict(zip(rels, img)))
    out.sort(key=lambda m: sum(a != b for a, b in m.items()))
    return out


def extend_switch(c: CoherentConfiguration, switched: Sequence[Tuple[int, int]], fixed: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """A strict algebraic automorphism of c that switches the given interspaces.

    ``fixed`` lists the fibers on which the prescribed part lives: every
    interspace among them is switched iff listed.  Interspaces touching
    other fibers are searched over valency-preserving class permutations,
    checking intersection numbers triple by triple.
    """
    f = c.nfibers
    fixed_set = set(fixed)
    sw = {tuple(sorted(p)) for p in switched}
    perm = list(range(c.k))
    assigned = set()
    pending = []
    for x in range(f):
        for y in range(x + 1, f):
            rels = c.block(x, y)
            if len(rels) == 1 or (x in fixed_set and y in fixed_set):
                if (x, y) in sw:
                    if len(rels) != 2:
                        raise PreconditionError("switched interspace must have two classes")
                    a, b = rels
                    perm[a], perm[b] = b, a
                    ta, tb = int(c.transpose[a]), int(c.transpose[b])
                    perm[ta], perm[tb] = tb, ta
                assigned.add((x, y))
            else:
                pending.append((x, y))
    for x in range(f):
        assigned.add((x, x))

    def is_assigned(a, b):
        return (min(a, b), max(a, b)) in assigned

    def triple_ok(x, y, z):
        for t in c.block(x, y):
            for r in c.block(x, z):
                for s in c.block(z, y):
                    if intersection_number(c, perm[t], perm[r], perm[s]) != intersection_number(c, t, r, s):
                        return False
        return True

    def pair_ok(x, y):
        for z in range(f):
            if not (is_assigned(x, z) and is_assigned(z, y)):
                continue
            for a, b, cc in ((x, y, z), (y, x, z), (x, z, y), (z, x, y), (y, z, x), (z, y, x)):
                if not triple_ok(a, b, cc):
                    return False
        return True

    for x in range(f):
        for y in range(f):
            for z in range(f):
                if is_assigned(x, y) and is_assigned(x, z) and is_assigned(z, y) and not triple_ok(x, y, z):
                    return None
    pending.sort(key=lambda p: (-(p[0] in fixed_set) - (p[1] in fixed_set), p))

    def rec(i):
        if i == len(pending):
            return True
        x, y = pending[i]
        saved = perm[:]
        for m in _pair_domain(c, x, y):
            for a, b in m.items():
                perm[a] = b
                perm[int(c.transpose[a])] = int(c.transpose[b])
            assigned.add((x, y))
            if pair_ok(x, y) and rec(i + 1):
                return True
            assigned.discard((x, y))
            perm[:] = saved
        return False

    return tuple(perm) if rec(0) else None


def companion_graph(g: ColoredSquareMatrix, closure: ClosureResult, verdict: SeparabilityVerdict) -> ColoredSquareMatrix:
    """G^f for a non-induced strict algebraic automorphism f of the closure."""
    cfg = closure.config
    comp = verdict.component
    fixed = [cfg.fiber_by_labels(comp.fiber_labels(z)) for z in range(comp.nfibers)]
    x = cfg.fiber_by_labels(verdict.fiber)
    others = [cfg.fiber_by_labels(p) for p in verdict.hyperedge if p != verdict.fiber]
    f = extend_switch(cfg, [(x, y) for y in others], fixed)
    if f is None:
        raise InternalError("switch generator does not extend to the closure")
    inv = np.empty(cfg.k, dtype=np.int64)
    inv[np.array(f)] = np.arange(cfg.k)
    orig = np.array([int(g.colors[u, v]) for u, v in cfg.rep], dtype=np.int64)
    h = orig[inv[cfg.colors]]
    return ColoredSquareMatrix(h, g.color_names)


def decide_amenable(g: ColoredSquareMatrix, verify_companion: bool = True) -> AmenabilityVerdict:
    require_valid(g)
    mult = color_multiplicity(g)
    if mult > 4:
        raise MultiplicityError(f"color multiplicity {mult} > 4")
    cl = coherent_closure(normalize_transpose(g))
    # lineage back to the colors of g itself
    sep = decide_separable(cl.config)
    if sep.separable:
        return AmenabilityVerdict(True, cl, sep)
    h = companion_graph(g, cl, sep)
    if verify_companion:
        from .oracle import graph_iso

        if wl2_equivalent(g, h) is None:
            raise InternalError("companion graph is not WL2-equivalent")
        if g.n <= 40 and graph_iso(g, h) is not None:
            raise InternalError("companion graph is isomorphic to the input")
    return AmenabilityVerdict(False, cl, sep, h)
