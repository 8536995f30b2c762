"""Equidistribution statistics of finite samples among level-m disk components.

Normalization of the weight vector: k_i = |T ∩ B_i| / (|T| d_i), so that
sum_i d_i k_i = 1 when every point of T is resolved and every component is
represented.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .berkovich import (
    FilledJuliaData,
    component_radius,
    enumerate_components,
    local_degree,
    pairwise_diameter,
    same_component,
)
from .dynamics import PolyMap
from .fields import MODE_Q, ExactLog, Place, coerce, element_to_str
from .intervals import DEFAULT_PREC, RealInterval, ivprec
from .local import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    canonical_height,
    critical_report,
    delta_slice,
    exact_rational,
)


@dataclass
class Cluster:
    anchor: object
    members: list
    degree: int
    log_radius: Fraction
    sampled: bool = True

    @property
    def count(self) -> int:
        return len(self.members)

    def to_json(self) -> dict:
        return {
            "anchor": element_to_str(self.anchor),
            "count": self.count,
            "degree": self.degree,
            "log_radius": str(self.log_radius),
            "sampled": self.sampled,
            "members": [element_to_str(x) for x in self.members],
        }


@dataclass
class ComponentStats:
    place: Place
    level: int
    d: int
    clusters: list
    total: int
    unresolved: list = field(default_factory=list)
    census_complete: bool = True

    @property
    def degree_mass(self) -> int:
        return sum(c.degree for c in self.clusters)

    @property
    def counts(self) -> list:
        return [c.count for c in self.clusters]

    def to_json(self) -> dict:
        return {
            "place": self.place.to_json(),
            "level": self.level,
            "total": self.total,
            "unresolved": [element_to_str(x) for x in self.unresolved],
            "degree_mass": self.degree_mass,
            "expected_degree_mass": self.d**self.level,
            "census_complete": self.census_complete,
            "clusters": [c.to_json() for c in self.clusters],
        }

    def csv_rows(self) -> list:
        return [
            {
                "place": str(self.place),
                "level": self.level,
                "anchor": element_to_str(c.anchor),
                "count": c.count,
                "degree": c.degree,
                "log_radius": str(c.log_radius),
            }
            for c in self.clusters
        ]


def component_stats(f: PolyMap, T: Sequence, v: Place, m: int, fill_census: bool = True) -> ComponentStats:
    """Partition T ∩ E_m into level-m components.

    With `fill_census` (Q only) components that contain rational points but
    no sample point are added with count 0.
    """
    data = FilledJuliaData.of(f, v)
    pts = []
    for x in T:
        x = coerce(x, f.mode)
        if x not in pts:
            pts.append(x)
    clusters: list = []
    unresolved = []
    for x in pts:
        if not data.point_in_level(x, m):
            unresolved.append(x)
            continue
        for c in clusters:
            if same_component(f, c.anchor, x, m, v, data):
                c.members.append(x)
                break
        else:
            clusters.append(
                Cluster(x, [x], local_degree(f, x, m, v, data), component_radius(f, x, m, v, data))
            )
    top = f.d**m
    mass = sum(c.degree for c in clusters)
    if mass < top and fill_census and f.mode == MODE_Q:
        for comp in enumerate_components(f, v, m):
            if not any(same_component(f, c.anchor, comp.anchor, m, v, data) for c in clusters):
                clusters.append(Cluster(comp.anchor, [], comp.degree, comp.log_radius, sampled=False))
        mass = sum(c.degree for c in clusters)
    if mass > top:
        raise AssertionError(f"component degrees sum to {mass} > d^m = {top}")
    return ComponentStats(v, m, f.d, clusters, len(pts), unresolved, mass == top)


@dataclass
class EquidistVerdict:
    verdict: str  # pass | fail | incomplete
    eps: Fraction
    failures: list
    caveat: str | None = None

    def __bool__(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "eps": str(self.eps),
            "failures": self.failures,
            "caveat": self.caveat,
        }


def equidist_verdict(stats: ComponentStats, eps) -> EquidistVerdict:
    """(1-eps)(d_i/d^m)|T| < |T ∩ B_i| < (1+eps)(d_i/d^m)|T| on every component, strictly."""
    eps = exact_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    top = stats.d**stats.level
    n = stats.total
    failures = []
    for c in stats.clusters:
        share = Fraction(c.degree, top) * n
        if not ((1 - eps) * share < c.count < (1 + eps) * share):
            failures.append({"anchor": element_to_str(c.anchor), "count": c.count, "share": str(share)})
    caveat = None
    if stats.unresolved:
        caveat = f"{len(stats.unresolved)} sample points lie outside the level-{stats.level} set"
    if failures:
        return EquidistVerdict("fail", eps, failures, caveat)
    if not stats.census_complete and eps <= 1:
        # some component has no rational anchor: its count is 0 and it fails the lower bound
        missing = top - stats.degree_mass
        return EquidistVerdict("incomplete", eps, [], f"components of total degree {missing} have no anchor")
    return EquidistVerdict("pass", eps, [], caveat)


def is_eps_equidistributed(stats: ComponentStats, eps) -> bool:
    return equidist_verdict(stats, eps).verdict == "pass"


def k_vector(stats: ComponentStats) -> list:
    if stats.total == 0:
        raise ValueError("empty sample")
    return [Fraction(c.count, stats.total * c.degree) for c in stats.clusters]


@dataclass
class PairwiseStat:
    place: Place
    log_diameter: ExactLog
    g_v: ExactLog
    ratio: Fraction | None

    def to_json(self) -> dict:
        return {
            "place": self.place.to_json(),
            "log_diameter": self.log_diameter.to_json(),
            "g_v": self.g_v.to_json(),
            "ratio": None if self.ratio is None else str(self.ratio),
        }


def pairwise_stat(f: PolyMap, T: Sequence, v: Place) -> PairwiseStat:
    """log d_v(T) next to g_v, with the exact ratio at a finite place."""
    data = FilledJuliaData.of(f, v)
    T = [coerce(x, f.mode) for x in T]
    ld = pairwise_diameter(T, v)
    g = ExactLog.unit(v, data.g)
    ratio = None if data.g == 0 else ld.coefficient(v) / data.g
    return PairwiseStat(v, ld, g, ratio)


@dataclass
class GlobalEquidistReport:
    kappa: RealInterval | None
    places: list
    passing: list
    slice: object
    pairwise: list
    note: str | None = None

    @property
    def slice_verdict(self) -> bool | None:
        return None if self.slice is None else self.slice.verdict

    def to_json(self) -> dict:
        return {
            "kappa_hat": None if self.kappa is None else self.kappa.to_json(),
            "places": self.places,
            "passing": [v.to_json() for v in self.passing],
            "slice": None if self.slice is None else self.slice.to_json(),
            "slice_verdict": self.slice_verdict,
            "pairwise": [p.to_json() for p in self.pairwise],
            "note": self.note,
        }


def global_report(
    f: PolyMap,
    T: Sequence,
    eps,
    delta,
    m0: int = 1,
    tol: float = DEFAULT_TOL,
    cap: int = DEFAULT_CAP,
) -> GlobalEquidistReport:
    """Level-m0 equidistribution at every bad place outside S_d, and the delta-slice they form.

    This is a measurement: no effective thresholds are asserted.
    """
    T = [coerce(x, f.mode) for x in T]
    report = critical_report(f, tol, cap)
    hs = ExactLog.zero()
    for P in T:
        hs = hs + canonical_height(f, P, tol, cap)
    kappa = None
    hc = report.h_crit.enclosure()
    if T and hc.lo > 0:
        num = (hs * Fraction(1, len(T))).enclosure()
        with ivprec(DEFAULT_PREC):
            kappa = RealInterval.from_iv(num.to_iv() / hc.to_iv())
    places, passing, pairwise = [], [], []
    for v in report.reference_set():
        stats = component_stats(f, T, v, m0)
        verdict = equidist_verdict(stats, eps)
        places.append({"place": v.to_json(), "stats": stats.to_json(), "verdict": verdict.to_json()})
        if verdict:
            passing.append(v)
        if len(T) >= 2:
            pairwise.append(pairwise_stat(f, T, v))
    note = None
    sl = None
    if not report.reference_set():
        note = "empty reference set: no bad places outside S_d"
    else:
        sl = delta_slice(report, passing, delta)
    return GlobalEquidistReport(kappa, places, passing, sl, pairwise, note)


__all__ = [
    "Cluster",
    "ComponentStats",
    "component_stats",
    "EquidistVerdict",
    "equidist_verdict",
    "is_eps_equidistributed",
    "k_vector",
    "PairwiseStat",
    "pairwise_stat",
    "GlobalEquidistReport",
    "global_report",
]
