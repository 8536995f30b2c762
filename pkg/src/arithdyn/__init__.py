"""Exact arithmetic dynamics of polynomials over Q and Q(t).

Heights, escape rates, critical heights, disk components at bad places,
equidistribution statistics and abcd-tuples from cross-ratios.
"""

from .dynamics import PolyMap, classify_orbit, enumerate_preperiodic, iterate
from .fields import ARCH, FF_INF, ExactLog, Place, RatFunc, height_tuple
from .local import canonical_height, critical_report, escape_rate, lambda_crit_local, splitting_radius

__version__ = "0.1.0"

__all__ = [
    "ARCH",
    "FF_INF",
    "ExactLog",
    "Place",
    "PolyMap",
    "RatFunc",
    "canonical_height",
    "classify_orbit",
    "critical_report",
    "enumerate_preperiodic",
    "escape_rate",
    "height_tuple",
    "iterate",
    "lambda_crit_local",
    "splitting_radius",
]
