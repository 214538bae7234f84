"""Exact and numeric tools for GKZ quantum curves: spectral curves, WKB
hierarchies, topological recursion, reconstruction of quantum curves,
saddle-point asymptotics of the mirror integral and exact WKB Stokes data."""

from .curve import CurveModel, SpectralCurve, build_curve
from .exactalg import INF, Poly, RatFunc
from .wkb import gkz_operator, wkb_expand

__all__ = ["CurveModel", "SpectralCurve", "build_curve", "INF", "Poly", "RatFunc", "gkz_operator", "wkb_expand"]
__version__ = "0.1.0"
