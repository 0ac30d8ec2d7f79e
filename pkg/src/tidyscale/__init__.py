"""Exact scale and tidy subgroups for automorphisms of totally disconnected
locally compact groups, on three concrete families: shifts on F^Z,
automorphisms of regular trees and diagonal conjugation on SL_2(Q_p)."""

from .core import (Answer, Backend, BackendUnsupported, Budgets, DepthExceeded,
                   FiniteGroupTable, InfiniteIndex, LevelExceeded, NotASubgroup,
                   NotClosed, NotNested, NotRepresentable, RadiusExceeded, ScaleResult,
                   SegmentUnavailable, TidyError, TooLarge, Verdict)
from .engine import (backend_of, dense_orbit_demo, descend, is_tidy_above, l_criterion,
                     modular, normaliser_witness, periodic_witness, plus_minus_parts,
                     power_coset_check, relative_index, scale, scale_modular_identity,
                     tidiness_report, tidy_below_verdict, tidying_above, tidying_full,
                     ustar_clopen_check)

__version__ = "0.1.0"

__all__ = [
    "Answer", "Backend", "BackendUnsupported", "Budgets", "DepthExceeded", "FiniteGroupTable",
    "InfiniteIndex", "LevelExceeded", "NotASubgroup", "NotClosed", "NotNested",
    "NotRepresentable", "RadiusExceeded", "ScaleResult", "SegmentUnavailable", "TidyError",
    "TooLarge", "Verdict", "backend_of", "dense_orbit_demo", "descend", "is_tidy_above",
    "l_criterion", "modular", "normaliser_witness", "periodic_witness", "plus_minus_parts",
    "power_coset_check", "relative_index", "scale", "scale_modular_identity",
    "tidiness_report", "tidy_below_verdict", "tidying_above", "tidying_full",
    "ustar_clopen_check",
]
