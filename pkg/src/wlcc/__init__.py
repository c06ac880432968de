"""Coherent configurations, WL2 refinement, separability and amenability."""
from __future__ import annotations

from .closure import ClosureResult, coherent_closure, wl2_equivalent
from .core import (
    CoherenceError,
    CoherentConfiguration,
    ColoredSquareMatrix,
    InternalError,
    InvalidInput,
    PointMap,
    PreconditionError,
    RainbowError,
    WlccError,
    loads_ccm,
    dumps_ccm,
    read_ccm,
    write_ccm,
    verify_coherence,
)
from .generators import PartialLinearSpace, cyclic_pls, fano, mobius_kantor, pappus, pls_to_config, skew_config, t16
from .reduction import decide_amenable, decide_separable, reduce_to_irredundant
from .structure import classify_cell, classify_interspace, is_irredundant

__version__ = "0.1.0"

__all__ = [
    "ClosureResult", "coherent_closure", "wl2_equivalent",
    "CoherenceError", "CoherentConfiguration", "ColoredSquareMatrix", "InternalError", "InvalidInput",
    "PointMap", "PreconditionError", "RainbowError", "WlccError",
    "loads_ccm", "dumps_ccm", "read_ccm", "write_ccm", "verify_coherence",
    "PartialLinearSpace", "cyclic_pls", "fano", "mobius_kantor", "pappus", "pls_to_config", "skew_config", "t16",
    "decide_amenable", "decide_separable", "reduce_to_irredundant",
    "classify_cell", "classify_interspace", "is_irredundant",
]
