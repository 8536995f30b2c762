"""Nonarchimedean primitives: Newton polygons, disk images, v-adic truncation.

Log-radii and log-absolute values at a finite place v are rationals in units
of [v] (log p over Q, deg(pi) over Q(t)): log|x|_v = -v(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import polys
from .fields import FF_INF, FieldError, Place, RatFunc, valuation

INF = None  # valuation of 0


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points (i, v(c_i)).

    `zero_roots` counts roots equal to 0 (valuation +infinity) coming from
    vanishing low-order coefficients; `segments` lists (slope, length) in
    increasing slope order, each contributing `length` roots of valuation
    -slope.
    """

    points: tuple
    segments: tuple
    zero_roots: int

    @property
    def degree(self) -> int:
        return self.zero_roots + sum(n for _, n in self.segments)

    def root_valuations(self) -> list:
        """Multiset of root valuations; None stands for +infinity."""
        out = [None] * self.zero_roots
        for slope, n in self.segments:
            out.extend([-slope] * n)
        return out

    def min_root_valuation(self):
        """Valuation of the largest root (None if every root is 0)."""
        if not self.segments:
            return None
        return -self.segments[-1][0]

    def count_roots_with_valuation_at_least(self, bound: Fraction) -> int:
        return self.zero_roots + sum(n for slope, n in self.segments if -slope >= bound)

    def to_json(self) -> dict:
        return {
            "points": [[i, None if val is None else str(val)] for i, val in self.points],
            "segments": [{"slope": str(s), "length": n} for s, n in self.segments],
            "zero_roots": self.zero_roots,
            "root_valuations": [None if r is None else str(r) for r in self.root_valuations()],
        }


def newton_polygon(vals: Sequence) -> NewtonPolygon:
    """Newton polygon from coefficient valuations.

    `vals` is either a sequence of valuations indexed by exponent, or of
    (index, valuation) pairs; None means the coefficient vanishes.
    """
    pts = []
    for k, item in enumerate(vals):
        if isinstance(item, tuple):
            i, val = item
        else:
            i, val = k, item
        pts.append((int(i), None if val is None else Fraction(val)))
    if not pts:
        raise ValueError("Newton polygon of an empty coefficient list")
    pts.sort()
    top = max(i for i, _ in pts)
    top_val = dict(pts).get(top)
    if top_val is None:
        raise ValueError("leading coefficient valuation must be finite")
    finite = [(i, val) for i, val in pts if val is not None]
    low = finite[0][0]
    hull: list = []
    for p in finite:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> p
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segments.append(((y2 - y1) / (x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(pts), tuple(segments), low)


def poly_valuations(coeffs: Sequence, v: Place) -> list:
    return [None if c == 0 else valuation(c, v) for c in coeffs]


def polygon_of(coeffs: Sequence, v: Place) -> NewtonPolygon:
    return newton_polygon(poly_valuations(polys.trim(coeffs), v))


# ---------------------------------------------------------------------------
# disks in units of [v]


def log_abs(x, v: Place):
    """-v(x) as a rational, None for x = 0 (log 0 = -infinity)."""
    return None if x == 0 else -Fraction(valuation(x, v))


def disk_image_data(coeffs: Sequence, center, r: Fraction, v: Place):
    """(f(center), log radius of f(D(center, e^r))) by the Taylor expansion at center."""
    ts = polys.taylor_shift(coeffs, center)
    logs = [log_abs(c, v) for c in ts]
    best = None
    for k in range(1, len(ts)):
        if logs[k] is None:
            continue
        val = k * r + logs[k]
        if best is None or val > best:
            best = val
    return ts[0], best


def disk_contains(center, r: Fraction, x, v: Place) -> bool:
    """x in D(center, e^r)."""
    return x == center or log_abs(x - center, v) <= r


def disk_invariant(coeffs: Sequence, center, r: Fraction, v: Place) -> bool:
    """f(D) subset of D for the closed disk D = D(center, e^r)."""
    fc, s = disk_image_data(coeffs, center, r, v)
    if s is not None and s > r:
        return False
    return disk_contains(center, r, fc, v)


# ---------------------------------------------------------------------------
# truncation: replace x by a small element congruent to it modulo pi^N


def _u_flip(x: RatFunc) -> RatFunc:
    """x(t) -> x(1/u), written again as a rational function of the variable."""
    dn, dd = len(x.num) - 1, len(x.den) - 1
    num = tuple(reversed(x.num))
    den = tuple(reversed(x.den))
    shift = dd - dn
    if shift >= 0:
        num = (Fraction(0),) * shift + num
    else:
        den = (Fraction(0),) * (-shift) + den
    return RatFunc(num, den)


_U = (Fraction(0), Fraction(1))


def reduce_mod(x, v: Place, N: int):
    """An element y with v(x - y) >= N and small size (x arbitrary, N an integer)."""
    if x == 0:
        return x
    s = max(0, -valuation(x, v))
    if N + s <= 0:
        return x * 0
    if v.kind == "p":
        x = Fraction(x)
        ps = v.p**s
        y = x * ps
        M = v.p ** (N + s)
        c = (y.numerator * pow(y.denominator, -1, M)) % M
        if c > M // 2:
            c -= M
        return Fraction(c, ps)
    if v.kind == "ffinf":
        return _u_flip(_reduce_poly_adic(_u_flip(RatFunc.coerce(x)), _U, N))
    if v.kind == "ff":
        return _reduce_poly_adic(RatFunc.coerce(x), v.poly, N)
    raise FieldError("reduce_mod needs a finite place")


def _reduce_poly_adic(x: RatFunc, pi: tuple, N: int) -> RatFunc:
    place = Place("ff", 0, polys.monic(pi))
    s = max(0, -valuation(x, place))
    pis = polys.power(pi, s)
    y = x * RatFunc(pis)
    M = polys.power(pi, N + s)
    g, inv, _ = polys.xgcd(y.den, M)
    if len(g) != 1:
        raise FieldError("denominator not invertible modulo pi")
    c = polys.rem(polys.mul(y.num, inv), M)
    return RatFunc(c, pis)


__all__ = [
    "NewtonPolygon",
    "newton_polygon",
    "polygon_of",
    "poly_valuations",
    "log_abs",
    "disk_image_data",
    "disk_contains",
    "disk_invariant",
    "reduce_mod",
    "FF_INF",
]
