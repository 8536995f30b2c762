"""Adelically good differences, split quadruples and abcd-tuples built from cross-ratios.

Conventions:
  S21 = finite places where f has good reduction (lambda_crit = 0), places
        dividing primes <= d included;
  S22 = places dividing primes <= d together with the archimedean place.
Pairs (P_i, P_j) are ordered, both orientations counted, diagonal excluded.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import polys
from .berkovich import FilledJuliaData, component_radius
from .dynamics import PolyMap
from .equidist import component_stats
from .fields import (
    ARCH,
    MODE_Q,
    ExactLog,
    FieldError,
    Place,
    abs_log,
    coerce,
    element_to_str,
    height_tuple,
    mode_of,
    support,
    valuation,
)
from .intervals import RealInterval, certified_roots
from .local import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    CriticalHeightReport,
    critical_report,
    escape_rate,
    exact_rational,
    lambda_crit_local,
)
from .nonarch import log_abs


def _verdict(*parts):
    """Three-valued conjunction: False dominates, then None."""
    if any(p is False for p in parts):
        return False
    if any(p is None for p in parts):
        return None
    return True


def _le(a: ExactLog, b: ExactLog):
    c = a.compare(b)
    return None if c is None else c <= 0


# ---------------------------------------------------------------------------
# adelically good differences


@dataclass
class AdelicGoodReport:
    alpha: object
    eps: Fraction
    good_sum: ExactLog
    s22_sum: ExactLog
    threshold: ExactLog
    verdict: bool | None

    def to_json(self) -> dict:
        return {
            "alpha": element_to_str(self.alpha),
            "eps": str(self.eps),
            "good_place_sum": self.good_sum.to_json(),
            "s22_sum": self.s22_sum.to_json(),
            "eps_h_crit": self.threshold.to_json(),
            "verdict": self.verdict,
        }


def s21_places(f: PolyMap, report: CriticalHeightReport, alpha) -> list:
    """Good finite places where the scaled alpha can have nonzero valuation."""
    bad = set(report.bad_places)
    cands = set(support(alpha)) | set(support(f.lead))
    return sorted(v for v in cands if not v.is_archimedean and v not in bad)


def s22_places(f: PolyMap) -> list:
    if f.mode != MODE_Q:
        return []
    from sympy import primerange

    return [ARCH] + [Place.prime(p) for p in primerange(2, f.d + 1)]


def adelically_good(
    f: PolyMap, alpha, eps, report: CriticalHeightReport | None = None, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP
) -> AdelicGoodReport:
    alpha = coerce(alpha, f.mode)
    if alpha == 0:
        raise FieldError("alpha must be nonzero")
    eps = exact_rational(eps)
    report = report or critical_report(f, tol, cap)
    good = ExactLog.zero()
    for v in s21_places(f, report, alpha):
        val = Fraction(valuation(alpha, v)) + f.scale_valuation(v)
        good = good + ExactLog.unit(v, val)
    s22 = ExactLog.zero()
    for v in s22_places(f):
        s22 = s22 + (abs_log(alpha, v) + f.scale_log(v)) * v.r
    threshold = report.h_crit * eps
    verdict = _verdict(_le(good, threshold), _le(-threshold, s22))
    return AdelicGoodReport(alpha, eps, good, s22, threshold, verdict)


@dataclass
class GoodPairFraction:
    fraction: Fraction
    good: list
    undetermined: list
    total: int

    def to_json(self) -> dict:
        return {
            "fraction": str(self.fraction),
            "total_pairs": self.total,
            "good_pairs": [[element_to_str(a), element_to_str(b)] for a, b in self.good],
            "undetermined_pairs": [[element_to_str(a), element_to_str(b)] for a, b in self.undetermined],
        }


def good_pair_fraction(f: PolyMap, T: Sequence, eps, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> GoodPairFraction:
    """Fraction of ordered pairs of distinct points whose difference is eps-adelically good.

    Undetermined pairs count as not good.
    """
    T = [coerce(x, f.mode) for x in T]
    if len(T) < 2:
        raise FieldError("need at least two points")
    report = critical_report(f, tol, cap)
    good, unsure, total = [], [], 0
    for i, a in enumerate(T):
        for j, b in enumerate(T):
            if i == j or a == b:
                continue
            total += 1
            verdict = adelically_good(f, a - b, eps, report).verdict
            if verdict is True:
                good.append((a, b))
            elif verdict is None:
                unsure.append((a, b))
    return GoodPairFraction(Fraction(len(good), total), good, unsure, total)


# ---------------------------------------------------------------------------
# split quadruples


def find_split_quadruples(f: PolyMap, T: Sequence, v: Place, limit: int = 100, report=None) -> list:
    """(a, b, c, d) with a, b in one level-1 component and c, d in another at distance e^{lambda_crit,v}."""
    if len(T) < 4:
        return []
    report = report or critical_report(f)
    lam = report.lambda_at(v).coefficient(v)
    stats = component_stats(f, T, v, 1, fill_census=False)
    index = {coerce(x, f.mode): i for i, x in reversed(list(enumerate(T)))}
    clusters = [sorted(c.members, key=index.get) for c in stats.clusters if c.count >= 2]
    out = []
    for A, B in itertools.combinations(clusters, 2):
        if log_abs(A[0] - B[0], v) != lam:
            continue
        for a, b in itertools.combinations(A, 2):
            for c, d in itertools.combinations(B, 2):
                out.append((a, b, c, d))
                if len(out) >= limit:
                    return out
    return out


def quadruple_denominator_check(f: PolyMap, q, v: Place, report=None) -> dict:
    """log|(a-b)(c-d)|_v against twice the component-radius bound and 2 lambda_crit,v."""
    report = report or critical_report(f)
    a, b, c, d = (coerce(x, f.mode) for x in q)
    data = FilledJuliaData.of(f, v)
    ra = component_radius(f, a, 1, v, data)
    rc = component_radius(f, c, 1, v, data)
    den = log_abs(a - b, v) + log_abs(c - d, v)
    lam = report.lambda_at(v).coefficient(v)
    bound = ra + rc
    return {"log_den": den, "radius_bound": bound, "lambda": lam, "ok": den <= bound < 2 * lam}


# ---------------------------------------------------------------------------
# Pluecker cross-ratios and abcd points


@dataclass
class CrossRatio:
    quad: tuple
    m: object
    x: object
    complement: object
    residual: object

    def to_json(self) -> dict:
        return {
            "quad": [element_to_str(z) for z in self.quad],
            "m": element_to_str(self.m),
            "x": element_to_str(self.x),
            "m_minus_x": element_to_str(self.complement),
            "residual": element_to_str(self.residual),
        }


def plucker_cross_ratio(a, b, c, d, m=1) -> CrossRatio:
    """x = m (a-d)(c-b) / ((a-b)(c-d)) and m - x = m (a-c)(b-d) / ((a-b)(c-d)).

    The second form rests on (a-c)(b-d) = (a-b)(c-d) + (a-d)(b-c), whose
    residual is returned (always exactly 0).
    """
    mode = mode_of([a, b, c, d, m])
    a, b, c, d, m = (coerce(z, mode) for z in (a, b, c, d, m))
    if len({a, b, c, d}) < 4:
        raise FieldError("degenerate cross-ratio: the four points must be distinct")
    if m == 0:
        raise FieldError("multiplier m must be nonzero")
    den = (a - b) * (c - d)
    x = m * (a - d) * (c - b) / den
    comp = m - x
    residual = (a - c) * (b - d) - ((a - b) * (c - d) + (a - d) * (b - c))
    if residual != 0 or comp != m * (a - c) * (b - d) / den:
        raise AssertionError("Pluecker identity failed")
    return CrossRatio((a, b, c, d), m, x, comp, residual)


@dataclass
class AbcdPoint:
    coords: tuple
    k: int
    multipliers: tuple
    h: ExactLog
    rad: ExactLog
    gap: ExactLog
    sources: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "coords": [element_to_str(z) for z in self.coords],
            "k": self.k,
            "multipliers": [element_to_str(m) for m in self.multipliers],
            "h": self.h.to_json(),
            "rad": self.rad.to_json(),
            "gap": self.gap.to_json(),
            "sources": [[element_to_str(z) for z in q] for q in self.sources],
        }


def build_abcd_point(quads: Sequence, ms: Sequence | None = None) -> AbcdPoint:
    """(x_1, m_1 - x_1, ..., x_k, m_k - x_k, -sum m_j) from cross-ratios of the quadruples."""
    quads = [tuple(q) for q in quads]
    if not quads:
        raise FieldError("need at least one quadruple")
    ms = list(ms) if ms is not None else [1] * len(quads)
    if len(ms) != len(quads):
        raise FieldError("one multiplier per quadruple")
    coords = []
    for q, m in zip(quads, ms):
        cr = plucker_cross_ratio(*q, m)
        coords.extend([cr.x, cr.complement])
    mode = mode_of(coords + list(ms))
    total = sum((coerce(m, mode) for m in ms), coerce(0, mode))
    coords.append(-total)
    coords = [coerce(z, mode) for z in coords]
    if any(z == 0 for z in coords):
        raise FieldError("degenerate tuple: a coordinate vanishes")
    if sum(coords, coerce(0, mode)) != 0:
        raise AssertionError("tuple is off the hyperplane")
    rep = height_tuple(coords)
    return AbcdPoint(tuple(coords), len(quads), tuple(ms), rep.h, rep.rad, rep.h - rep.rad, tuple(quads))


@dataclass
class QualityReport:
    point: AbcdPoint
    eps: Fraction
    threshold: ExactLog
    verdict: bool | None

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "eps": str(self.eps),
            "gap": self.point.gap.to_json(),
            "threshold": self.threshold.to_json(),
            "verdict": self.verdict,
        }

    def csv_row(self, h_crit: ExactLog | None = None) -> dict:
        return {
            "coords": " ".join(element_to_str(z) for z in self.point.coords),
            "h": self.point.h.render(),
            "rad": self.point.rad.render(),
            "gap": self.point.gap.render(),
            "gap_value": repr(self.point.gap.approx()),
            "threshold_value": repr(self.threshold.approx()),
            "verdict": self.verdict,
        }


def quality_report(P: AbcdPoint, f: PolyMap | None, eps, report=None, tol: float = DEFAULT_TOL) -> QualityReport:
    """gap = h - rad against ((1 - 4 eps)/2) h_crit(f), certified."""
    eps = exact_rational(eps)
    if report is None:
        report = critical_report(f, tol)
    threshold = report.h_crit * ((1 - 4 * eps) / 2)
    c = P.gap.compare(threshold)
    return QualityReport(P, eps, threshold, None if c is None else c >= 0)


# ---------------------------------------------------------------------------
# archimedean preimage spread


def _iterate_poly(f: PolyMap, n: int) -> tuple:
    F = (Fraction(0), Fraction(1))
    for _ in range(n):
        F = polys.compose(f.coeffs, F)
    return F


def _log_dist(y, b) -> tuple:
    """Outward-rounded enclosure of log|y - beta| for two root boxes."""
    gap = abs(y.center - b.center)
    slack = y.radius + b.radius + 4 * math.ulp(max(gap, 1.0))
    lo = gap - slack
    hi = gap + slack
    lo_log = -math.inf if lo <= 0 else math.nextafter(math.log(lo), -math.inf)
    return lo_log, math.nextafter(math.log(hi), math.inf)


@dataclass
class PreimageGap:
    value: RealInterval | None  # None: -infinity (coincident root sets)
    bound: RealInterval  # -(1/(d-1)) lambda_crit at the archimedean place
    slack: RealInterval | None

    def to_json(self) -> dict:
        return {
            "value": None if self.value is None else self.value.to_json(),
            "minus_lambda_crit_over_d_minus_1": self.bound.to_json(),
            "measured_slack": None if self.slack is None else self.slack.to_json(),
        }


def min_preimage_gap_arch(f: PolyMap, alpha, tol: float = DEFAULT_TOL, depth: int = 3) -> PreimageGap:
    """max over y in f^{-3}(alpha) of min over beta in f^{-3}(0) of log|y - beta|."""
    if f.mode != MODE_Q:
        raise FieldError("the archimedean preimage gap needs Q")
    if f.d > 8:
        raise FieldError("degree bound d <= 8")
    alpha = Fraction(alpha)
    lc = lambda_crit_local(f, ARCH, tol).enclosure()
    lam0 = escape_rate(f, Fraction(0), ARCH, tol).enclosure()
    if lam0.lo > lc.hi + tol:
        raise FieldError("0 escapes faster than the critical points at the archimedean place")
    bound = RealInterval(-lc.hi / (f.d - 1), -lc.lo / (f.d - 1))
    bound = RealInterval(math.nextafter(bound.lo, -math.inf), math.nextafter(bound.hi, math.inf))
    if alpha == 0:
        return PreimageGap(None, bound, None)
    F = _iterate_poly(f, depth)
    ys = certified_roots(polys.squarefree_part(polys.sub(F, (alpha,))))
    bs = certified_roots(polys.squarefree_part(F))
    lo = hi = -math.inf
    for y in ys:
        pairs = [_log_dist(y, b) for b in bs]
        lo = max(lo, min(p[0] for p in pairs))
        hi = max(hi, min(p[1] for p in pairs))
    value = RealInterval(lo, hi)
    slack = None
    if lo > -math.inf:
        slack = RealInterval(math.nextafter(lo - bound.hi, -math.inf), math.nextafter(hi - bound.lo, math.inf))
    return PreimageGap(value, bound, slack)


__all__ = [
    "AdelicGoodReport",
    "adelically_good",
    "GoodPairFraction",
    "good_pair_fraction",
    "find_split_quadruples",
    "quadruple_denominator_check",
    "CrossRatio",
    "plucker_cross_ratio",
    "AbcdPoint",
    "build_abcd_point",
    "QualityReport",
    "quality_report",
    "PreimageGap",
    "min_preimage_gap_arch",
]
