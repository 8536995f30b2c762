"""Polynomial maps over Q and Q(t): normalization, iteration, preperiodicity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import polys
from .fields import (
    ARCH,
    FF_INF,
    MODE_Q,
    MODE_QT,
    ExactLog,
    FieldError,
    Place,
    RatFunc,
    abs_log,
    bit_size,
    candidate_places,
    coerce,
    element_to_str,
    mode_of,
    parse_element,
    support,
    valuation,
)


class SizeBoundError(RuntimeError):
    """Coefficient growth exceeded the configured bit-size bound."""


class CandidateCapError(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} candidates exceed cap {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class PolyMap:
    """f(z) = a_0 + a_1 z + ... + a_d z^d with d >= 2."""

    coeffs: tuple
    mode: str = MODE_Q

    def __post_init__(self):
        coeffs = polys.trim(coerce(c, self.mode) for c in self.coeffs)
        if len(coeffs) < 3:
            raise FieldError("a polynomial map needs degree d >= 2")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def of(cls, coeffs: Sequence, mode: str | None = None) -> "PolyMap":
        mode = mode or mode_of(coeffs)
        return cls(tuple(coeffs), mode)

    @classmethod
    def parse(cls, text: str, mode: str | None = None) -> "PolyMap":
        """Comma separated a_0,...,a_d (exact rationals or rational functions in t)."""
        parts = _split_top_level(text)
        values = [parse_element(p, mode) for p in parts]
        return cls.of(values, mode)

    @property
    def d(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    @cached_property
    def center(self):
        """sigma = -a_{d-1}/(d a_d): f(sigma + u) has no u^{d-1} term."""
        return -self.coeffs[-2] / (self.lead * self.d)

    @cached_property
    def derivative(self) -> tuple:
        return polys.derivative(self.coeffs)

    def __call__(self, z):
        return polys.evaluate(self.coeffs, coerce(z, self.mode))

    def is_constant_field(self) -> bool:
        """All coefficients lie in Q (always true in Q mode)."""
        return self.mode == MODE_Q or all(RatFunc.coerce(c).is_constant() for c in self.coeffs)

    def over_q(self) -> "PolyMap":
        return PolyMap(tuple(coerce(c, MODE_Q) for c in self.coeffs), MODE_Q)

    def __str__(self) -> str:
        return ",".join(element_to_str(c) for c in self.coeffs)

    def to_json(self) -> dict:
        return {"coeffs": [element_to_str(c) for c in self.coeffs], "mode": self.mode}

    @classmethod
    def from_json(cls, obj) -> "PolyMap":
        mode = obj.get("mode")
        return cls.of([parse_element(c, mode) for c in obj["coeffs"]], mode)

    # -- places and scale ------------------------------------------------

    @cached_property
    def relevant_places(self) -> tuple[Place, ...]:
        """Nonarchimedean places where some coefficient or a_d is not a unit."""
        return tuple(candidate_places([c for c in self.coeffs if c != 0], self.mode))

    def places(self, include_arch: bool = True) -> list[Place]:
        out = list(self.relevant_places)
        if include_arch and self.mode == MODE_Q:
            out.insert(0, ARCH)
        return out

    def scale_valuation(self, v: Place) -> Fraction:
        """v(a_d)/(d-1): the valuation of the symbolic scale a_d^{1/(d-1)}."""
        return Fraction(valuation(self.lead, v), self.d - 1)

    def scale_log(self, v: Place) -> ExactLog:
        """L_v = log|a_d|_v/(d-1)."""
        return abs_log(self.lead, v) / (self.d - 1)

    def escape_units(self, v: Place) -> Fraction:
        """log R_v in units of [v] at a nonarchimedean place.

        |z|_v > R_v forces |f(z)|_v = |a_d|_v |z|_v^d > |z|_v.
        """
        if v.is_archimedean:
            raise FieldError("escape_units is for nonarchimedean places")
        va = valuation(self.lead, v)
        best = Fraction(va, self.d - 1)
        for i, a in enumerate(self.coeffs[:-1]):
            if a != 0:
                best = max(best, Fraction(va - valuation(a, v), self.d - i))
        return best

    @cached_property
    def arch_bound(self) -> Fraction:
        """Rational B with |z| > B forcing |f(z)| > |z| and escape (real place)."""
        if self.mode != MODE_Q:
            raise FieldError("no archimedean place in Q(t) mode")
        ad = abs(self.lead)
        s = sum(abs(a) for a in self.coeffs[:-1]) / ad
        # smallest integer k with k^(d-1) >= 2/|a_d|
        target = 2 / ad
        k = max(1, int(math.floor(float(target) ** (1 / (self.d - 1)))) - 1)
        while Fraction(k) ** (self.d - 1) < target:
            k += 1
        return max(Fraction(1), 2 * s, Fraction(k))

    def escaped(self, z, v: Place) -> bool:
        if z == 0:
            return False
        if v.is_archimedean:
            return abs(coerce(z, MODE_Q)) > self.arch_bound
        return -valuation(z, v) > self.escape_units(v)

    # -- centered monic conjugate ------------------------------------------

    @cached_property
    def centered_taylor(self) -> list:
        """f_i(sigma): coefficients of f(sigma + u)."""
        return polys.taylor_shift(self.coeffs, self.center)

    def centered_valuations(self, v: Place) -> list:
        """v(b_i) for g(w) = s f(w/s + sigma) - s sigma, s = a_d^{1/(d-1)}.

        None stands for a vanishing coefficient.  b_d = 1 and b_{d-1} = 0.
        """
        sv = self.scale_valuation(v)
        ft = self.centered_taylor
        out = []
        b0 = ft[0] - self.center
        out.append(None if b0 == 0 else valuation(b0, v) + sv)
        for i in range(1, self.d + 1):
            c = ft[i]
            out.append(None if c == 0 else valuation(c, v) + (1 - i) * sv)
        return out

    def centered_abs_logs(self, v: Place) -> list:
        """log|b_i|_v as ExactLog (None for vanishing b_i)."""
        if not v.is_archimedean:
            return [None if x is None else ExactLog.unit(v, -x) for x in self.centered_valuations(v)]
        L = self.scale_log(v)
        ft = self.centered_taylor
        b0 = ft[0] - self.center
        out = [None if b0 == 0 else abs_log(b0, v) + L]
        for i in range(1, self.d + 1):
            c = ft[i]
            out.append(None if c == 0 else abs_log(c, v) + L * (1 - i))
        return out

    def centered_monic_exact(self):
        """Exact coefficients of g when a_d is a (d-1)-th power in Q, else None."""
        if self.mode != MODE_Q:
            return None
        s = rational_root(self.lead, self.d - 1)
        if s is None:
            return None
        ft = self.centered_taylor
        out = [s * (ft[0] - self.center)]
        out += [ft[i] * s ** (1 - i) for i in range(1, self.d + 1)]
        return out


def rational_root(q, n: int):
    """An n-th root of q in Q if one exists (positive when possible)."""
    q = Fraction(q)
    if q < 0 and n % 2 == 0:
        return None
    sign = -1 if q < 0 else 1
    a, b = abs(q.numerator), q.denominator
    ra, rb = _int_root(a, n), _int_root(b, n)
    if ra is None or rb is None:
        return None
    return sign * Fraction(ra, rb)


def _int_root(a: int, n: int):
    r = round(a ** (1 / n)) if a < 2**1000 else _int_root_newton(a, n)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**n == a:
            return c
    return None


def _int_root_newton(a: int, n: int) -> int:
    x = 1 << ((a.bit_length() + n - 1) // n)
    while True:
        y = ((n - 1) * x + a // x ** (n - 1)) // n
        if y >= x:
            return x
        x = y


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


# ---------------------------------------------------------------------------
# iteration


def iterate(f: PolyMap, z, n: int):
    if n < 0:
        raise ValueError("n must be nonnegative")
    z = coerce(z, f.mode)
    for _ in range(n):
        z = f(z)
    return z


def escape_radius(f: PolyMap, v: Place) -> ExactLog:
    """log R_v: beyond it the orbit escapes and the local height is explicit."""
    if v.is_archimedean:
        return abs_log(f.arch_bound, v)
    return ExactLog.unit(v, f.escape_units(v))


def taylor_shift(f: PolyMap, c) -> list:
    """Coefficients f_k(c) with f(c + w) = sum f_k(c) w^k."""
    return polys.taylor_shift(f.coeffs, coerce(c, f.mode))


@dataclass
class OrbitCertificate:
    verdict: str  # "preperiodic" | "divergent" | "undetermined"
    orbit: list
    tail: int | None = None
    period: int | None = None
    place: Place | None = None
    index: int | None = None
    witness: object = None
    note: str = ""

    @property
    def is_preperiodic(self) -> bool:
        return self.verdict == "preperiodic"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "orbit": [element_to_str(z) for z in self.orbit]}
        if self.verdict == "preperiodic":
            out.update(tail=self.tail, period=self.period)
        elif self.verdict == "divergent":
            out.update(
                place=self.place.to_json() if self.place is not None else None,
                index=self.index,
                witness=element_to_str(self.witness),
            )
        if self.note:
            out["note"] = self.note
        return out


def orbit_places(f: PolyMap, P) -> list[Place]:
    """Places at which an orbit of P can escape: bad places of f and poles of P."""
    places = set(f.relevant_places)
    if P != 0:
        places.update(v for v in support(P) if valuation(P, v) < 0)
    if f.mode == MODE_QT:
        places.add(FF_INF)
    out = sorted(places)
    if f.mode == MODE_Q:
        out.insert(0, ARCH)
    return out


def classify_orbit(f: PolyMap, P, cap: int = 4096) -> OrbitCertificate:
    """Exact preperiodic / divergent decision.

    Over Q the search always terminates: a non-escaping orbit stays in a
    finite set (bounded denominators and absolute value), so it revisits.
    Over Q(t) the constant field is infinite; the search stops after `cap`
    steps with an "undetermined" verdict.  Maps and points with constant
    coefficients are decided over Q.
    """
    P = coerce(P, f.mode)
    if f.mode == MODE_QT and f.is_constant_field() and RatFunc.coerce(P).is_constant():
        cert = classify_orbit(f.over_q(), RatFunc.coerce(P).constant_value(), cap)
        orbit = [RatFunc.const(z) for z in cert.orbit]
        note = "constant map and point: decided over the constant field"
        if cert.verdict == "divergent":
            return OrbitCertificate("divergent", orbit, place=None, index=cert.index,
                                    witness=RatFunc.const(cert.witness), note=note + "; every place of Q(t) sees a bounded orbit")
        return OrbitCertificate(cert.verdict, orbit, cert.tail, cert.period, note=note)
    places = orbit_places(f, P)
    seen: dict = {}
    orbit = []
    z = P
    total_cap = cap if f.mode == MODE_QT else None
    n = 0
    while True:
        if z in seen:
            m = seen[z]
            return OrbitCertificate("preperiodic", orbit, tail=m, period=n - m)
        for v in places:
            if f.escaped(z, v):
                orbit.append(z)
                return OrbitCertificate("divergent", orbit, place=v, index=n, witness=z)
        seen[z] = n
        orbit.append(z)
        if total_cap is not None and n >= total_cap:
            return OrbitCertificate("undetermined", orbit, note=f"no decision within {cap} steps")
        z = f(z)
        n += 1


@dataclass
class PreperiodicCensus:
    points: list
    certificates: dict
    denominator_bound: int
    arch_bound: Fraction
    candidates: int
    radii: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "points": [element_to_str(z) for z in self.points],
            "count": len(self.points),
            "certificates": [self.certificates[z].to_json() for z in self.points],
            "denominator_bound": self.denominator_bound,
            "arch_bound": str(self.arch_bound),
            "candidates": self.candidates,
            "escape_radii": {str(k): str(v) for k, v in self.radii.items()},
        }


def enumerate_preperiodic(f: PolyMap, cap: int = 10**6) -> PreperiodicCensus:
    """All rational preperiodic points of f over Q, each certified.

    A preperiodic z satisfies |z|_p <= R_p at every prime and |z| <= B, so z
    = a/D with D = prod p^floor(log_p R_p) and |a| <= B*D.
    """
    if f.mode != MODE_Q:
        raise FieldError("enumeration of preperiodic points is implemented over Q only")
    D = 1
    radii = {}
    for v in f.relevant_places:
        r = f.escape_units(v)
        radii[v] = r
        if r > 0:
            D *= v.p ** math.floor(r)
    B = f.arch_bound
    amax = math.floor(B * D)
    count = 2 * amax + 1
    if count > cap:
        raise CandidateCapError(count, cap)
    points = []
    certs = {}
    known_pre: set = set()
    known_div: set = set()
    for a in range(-amax, amax + 1):
        z = Fraction(a, D)
        if z in known_pre:
            points.append(z)
            continue
        if z in known_div:
            continue
        cert = classify_orbit(f, z)
        if cert.is_preperiodic:
            points.append(z)
            certs[z] = cert
            known_pre.update(cert.orbit)
        else:
            known_div.update(cert.orbit)
    for z in points:
        if z not in certs:
            certs[z] = classify_orbit(f, z)
    points.sort()
    return PreperiodicCensus(points, certs, D, B, count, radii)


def critical_value_char_poly(f: PolyMap, n: int, max_bits: int = 200_000) -> tuple:
    """Monic prod_{f'(a)=0} (X - f^n(a)) with multiplicity, without finding the a.

    Works in K[w]/(f'/(d a_d)): g = f^n(w) mod f', and the answer is the
    characteristic polynomial of multiplication by g.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    A = polys.monic(f.derivative)
    k = len(A) - 1  # = d - 1
    one = coerce(1, f.mode)
    zero = one * 0
    if k == 1:
        a = -A[0]
        val = iterate(f, a, n)
        return (-val, one)
    g = polys.rem((zero, one), A)
    for _ in range(n):
        g = polys.mod_compose(f.coeffs, g, A)
        if sum(bit_size(c) for c in g) > max_bits:
            raise SizeBoundError(f"critical orbit polynomial exceeds {max_bits} bits at n={n}")
    cols = []
    cur = g
    for j in range(k):
        col = list(cur) + [zero] * (k - len(cur))
        cols.append(col)
        cur = polys.rem(polys.mul(cur, (zero, one)), A)
    matrix = [[cols[j][i] for j in range(k)] for i in range(k)]
    return polys.charpoly(matrix)
