"""Certified real enclosures and complex root boxes.

All transcendental work goes through mpmath's interval context, which rounds
outward.  Results are stored as pairs of Python floats, again rounded
outward, so every `RealInterval` is a rigorous enclosure of the quantity it
describes.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import iv
from mpmath.libmp import to_float

DEFAULT_PREC = 128


@contextmanager
def ivprec(prec: int | None):
    """Temporarily set the working precision of mpmath's interval context."""
    old = iv.prec
    if prec:
        iv.prec = max(prec, old)
    try:
        yield
    finally:
        iv.prec = old


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


def _exact_sum(a: float, b: float, s: float) -> bool:
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(s)):
        return True
    return Fraction(a) + Fraction(b) == Fraction(s)


def _sum_down(a: float, b: float) -> float:
    s = a + b
    return s if _exact_sum(a, b, s) else _down(s)


def _sum_up(a: float, b: float) -> float:
    s = a + b
    return s if _exact_sum(a, b, s) else _up(s)


def iv_rational(q, prec: int | None = None):
    """Interval enclosure of an exact rational."""
    q = Fraction(q)
    with ivprec(prec):
        if q.denominator == 1:
            return iv.mpf(q.numerator)
        return iv.mpf(q.numerator) / q.denominator


def iv_log_rational(q, prec: int | None = None):
    q = Fraction(q)
    if q <= 0:
        raise ValueError("log of a nonpositive rational")
    with ivprec(prec):
        return iv.log(iv_rational(q))


@dataclass(frozen=True)
class RealInterval:
    """Closed interval [lo, hi] of reals with float endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x: float) -> "RealInterval":
        return cls(float(x), float(x))

    @classmethod
    def zero(cls) -> "RealInterval":
        return cls(0.0, 0.0)

    @classmethod
    def from_iv(cls, x) -> "RealInterval":
        a, b = x._mpi_
        return cls(to_float(a, rnd="f"), to_float(b, rnd="c"))

    @classmethod
    def from_rational(cls, q) -> "RealInterval":
        q = Fraction(q)
        f = float(q)
        if Fraction(f) == q:
            return cls(f, f)
        return cls(_down(f), _up(f))

    @classmethod
    def from_mid_rad(cls, mid: float, rad: float) -> "RealInterval":
        return cls(_down(mid - rad), _up(mid + rad))

    def to_iv(self):
        return iv.mpf([self.lo, self.hi])

    @property
    def mid(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def rad(self) -> float:
        m = self.mid
        return _up(max(self.hi - m, m - self.lo))

    @property
    def width(self) -> float:
        return _up(self.hi - self.lo)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other) -> "RealInterval":
        if not isinstance(other, RealInterval):
            other = RealInterval.from_rational(other)
        return RealInterval(_sum_down(self.lo, other.lo), _sum_up(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self) -> "RealInterval":
        return RealInterval(-self.hi, -self.lo)

    def __sub__(self, other) -> "RealInterval":
        if not isinstance(other, RealInterval):
            other = RealInterval.from_rational(other)
        return self + (-other)

    def scale(self, q) -> "RealInterval":
        q = Fraction(q)
        if q == 0:
            return RealInterval.zero()
        with ivprec(DEFAULT_PREC):
            return RealInterval.from_iv(self.to_iv() * iv_rational(q))

    def hull(self, other: "RealInterval") -> "RealInterval":
        return RealInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "RealInterval") -> "RealInterval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("disjoint enclosures of the same quantity")
        return RealInterval(lo, hi)

    def to_json(self) -> dict:
        return {"mid": self.mid, "rad": self.rad, "lo": self.lo, "hi": self.hi}

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


def compare_intervals(a: RealInterval, b: RealInterval) -> int | None:
    """Certified sign of a - b: -1, 0 (both degenerate and equal), 1, or None."""
    if a.hi < b.lo:
        return -1
    if a.lo > b.hi:
        return 1
    if a.lo == a.hi == b.lo == b.hi:
        return 0
    return None


# ---------------------------------------------------------------------------
# complex roots with a-posteriori certification


@dataclass(frozen=True)
class RootBox:
    """A disk D(center, radius) in C certified to contain `count` roots."""

    center: complex
    radius: float
    count: int

    def to_iv(self):
        r = self.radius
        c = self.center
        return iv.mpc(iv.mpf([c.real - r, c.real + r]), iv.mpf([c.imag - r, c.imag + r]))


class RootCertificationError(RuntimeError):
    pass


def certified_roots(coeffs, prec: int = 200, max_tries: int = 3) -> list[RootBox]:
    """Certified enclosures for the complex roots of a squarefree rational polynomial.

    Approximations come from mpmath.polyroots; certification uses the
    Weierstrass (Durand-Kerner) correction bound: all roots lie in the union of
    the disks D(z_i, n*|W_i|), and a connected component made of k disks holds
    exactly k roots.  Overlapping disks are merged into one enclosing disk.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    n = len(coeffs) - 1
    if n < 1:
        return []
    if n == 1:
        root = -coeffs[0] / coeffs[1]
        return [RootBox(complex(float(root)), _up(abs(float(root)) * 2**-50), 1)]
    for attempt in range(max_tries):
        work = prec * (2**attempt)
        with mpmath.workprec(work):
            mcoeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(coeffs)]
            try:
                approx = mpmath.polyroots(mcoeffs, maxsteps=200 + 50 * n, extraprec=work)
            except mpmath.libmp.NoConvergence:
                continue
        boxes = _certify(coeffs, approx, work)
        if boxes is not None:
            return boxes
    raise RootCertificationError(f"could not certify roots of degree-{n} polynomial")


def _certify(coeffs, approx, prec):
    n = len(coeffs) - 1
    with ivprec(prec):
        lead = iv_rational(coeffs[-1])
        pts = [iv.mpc(iv.mpf(mpmath.re(z)), iv.mpf(mpmath.im(z))) for z in approx]
        radii = []
        for i, zi in enumerate(pts):
            val = iv.mpc(0)
            for c in reversed(coeffs):
                val = val * zi + iv_rational(c)
            denom = lead
            for j, zj in enumerate(pts):
                if j != i:
                    denom = denom * (zi - zj)
            if 0 in abs(denom):
                return None
            w = abs(val / denom)
            radii.append(to_float((w * n)._mpi_[1], rnd="c"))
    centers = [complex(float(mpmath.re(z)), float(mpmath.im(z))) for z in approx]
    # float rounding of the centers
    radii = [_up(r + 4 * abs(c) * 2**-52 + 1e-300) for r, c in zip(radii, centers)]
    # union-find on overlapping disks
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(centers[i] - centers[j]) <= radii[i] + radii[j]:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    boxes = []
    for members in groups.values():
        if len(members) == 1:
            i = members[0]
            boxes.append(RootBox(centers[i], radii[i], 1))
            continue
        c = centers[members[0]]
        r = max(abs(centers[i] - c) + radii[i] for i in members)
        boxes.append(RootBox(c, _up(r), len(members)))
    return boxes
