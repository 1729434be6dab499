"""Total-degree homotopy continuation for square polynomial systems."""

from .endpoints import Cluster, RefineResult, certify, dedup, refine
from .systems import PolySystem, RandomizedSystem, TotalDegreeStart, affine_residual, bezout_number, start_system
from .tracker import (
    CONVERGED,
    DIVERGED,
    FAILED,
    PathFailureError,
    PathResult,
    TrackRun,
    TrackSettings,
    track,
)

__all__ = [
    "Cluster",
    "RefineResult",
    "certify",
    "dedup",
    "refine",
    "PolySystem",
    "RandomizedSystem",
    "TotalDegreeStart",
    "affine_residual",
    "bezout_number",
    "start_system",
    "CONVERGED",
    "DIVERGED",
    "FAILED",
    "PathFailureError",
    "PathResult",
    "TrackRun",
    "TrackSettings",
    "track",
]
