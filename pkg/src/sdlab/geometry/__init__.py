from .backends import (
    ChartInfo,
    FlatTorus,
    GeometryBackend,
    MultiTaubNut,
    RoundS4,
    Schwarzschild,
    metric_at,
)
from .curvature import CurvatureSample, curvature_at
from .integrals import CurvatureIntegrals, integrate_invariants
from .boundary import TruncationReport, boundary_report

__all__ = [
    "ChartInfo",
    "GeometryBackend",
    "FlatTorus",
    "RoundS4",
    "MultiTaubNut",
    "Schwarzschild",
    "metric_at",
    "CurvatureSample",
    "curvature_at",
    "CurvatureIntegrals",
    "integrate_invariants",
    "TruncationReport",
    "boundary_report",
]
