"""Local escape rates, canonical heights, critical heights and splitting radii."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath import iv

from . import polys
from .dynamics import PolyMap, SizeBoundError, classify_orbit, orbit_places
from .fields import (
    ARCH,
    FF_INF,
    MODE_Q,
    MODE_QT,
    ExactLog,
    FieldError,
    Place,
    RatFunc,
    bit_size,
    coerce,
    factor_qpoly,
    valuation,
)
from .intervals import (
    DEFAULT_PREC,
    RealInterval,
    RootBox,
    certified_roots,
    iv_rational,
    ivprec,
)
from .nonarch import disk_invariant, log_abs, polygon_of, reduce_mod

DEFAULT_TOL = 1e-9
DEFAULT_CAP = 64


def exact_rational(x) -> Fraction:
    """Exact rational from int, Fraction, decimal string or float (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


@dataclass(frozen=True)
class LocalEscape:
    """A local height value at one place.

    mode "exact": the value is `value`.  mode "bounded": the value lies in
    [value, bound].  mode "interval": `value` carries a certified interval.
    """

    place: Place
    mode: str
    value: ExactLog
    bound: ExactLog | None = None
    steps: int = 0
    note: str = ""

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    def enclosure(self) -> RealInterval:
        if self.mode == "bounded":
            return RealInterval(self.value.enclosure().lo, self.bound.enclosure().hi)
        return self.value.enclosure()

    def as_log(self) -> ExactLog:
        """ExactLog usable in sums: bounded values become an interval summand."""
        if self.mode == "bounded":
            return ExactLog.interval(self.enclosure())
        return self.value

    def is_positive(self) -> bool | None:
        if self.mode == "exact":
            return self.value.sign() > 0
        enc = self.enclosure()
        if enc.lo > 0:
            return True
        if enc.hi <= 0:
            return False
        return None

    def is_zero(self) -> bool | None:
        pos = self.is_positive()
        return None if pos is None else not pos

    def to_json(self) -> dict:
        return {
            "place": self.place.to_json(),
            "mode": self.mode,
            "value": self.value.to_json(),
            "bound": self.bound.to_json() if self.bound is not None else None,
            "enclosure": self.enclosure().to_json(),
            "steps": self.steps,
            "note": self.note,
        }


# ---------------------------------------------------------------------------
# nonarchimedean escape


def static_traps(f: PolyMap, v: Place) -> list:
    """Forward-invariant disks (center, log-radius) among a few natural candidates."""
    R = f.escape_units(v)
    Lu = -f.scale_valuation(v)
    zero = coerce(0, f.mode)
    cands = [(f.center, -Lu), (zero, R), (f.center, R), (zero, -Lu)]
    out = []
    for c, r in cands:
        if (c, r) not in out and disk_invariant(f.coeffs, c, r, v):
            out.append((c, r))
    return out


def _nonarch_run(f, z, v, cap, digits, max_bits, traps):
    d = f.d
    R = f.escape_units(v)
    Lu = -f.scale_valuation(v)
    w, e = z, None
    seen: dict = {}
    orbit_logs: list = []  # per exact orbit point: logs of its Taylor coefficients
    certified = -1
    for n in range(cap + 1):
        lw = None
        known = False
        if w != 0 and (e is None or valuation(w, v) < e):
            lw = log_abs(w, v)
            known = True
        if known and lw > R:
            val = ExactLog.unit(v, (lw + Lu) / d**n)
            return LocalEscape(v, "exact", val, steps=n, note="escaped")
        if not known and e is not None and -e > R:
            break  # precision exhausted: |f^n(z)| no longer certified
        certified = n
        if e is None:
            if w in seen:
                return LocalEscape(v, "exact", ExactLog.zero(), steps=n, note="preperiodic")
            seen[w] = n
        for c, r in traps:
            if (e is None or -e <= r) and (w == c or log_abs(w - c, v) <= r):
                return LocalEscape(v, "exact", ExactLog.zero(), steps=n, note="invariant disk")
        if n == cap:
            break
        ts = polys.taylor_shift(f.coeffs, w)
        if e is None:
            logs = [log_abs(c, v) for c in ts]
            orbit_logs.append((w, logs))
            if _periodic_disk_trap(orbit_logs, v, f):
                return LocalEscape(v, "exact", ExactLog.zero(), steps=n, note="periodic disk")
        else:
            e = min(valuation(ts[k], v) + k * e for k in range(1, len(ts)) if ts[k] != 0)
        w = ts[0]
        if bit_size(w) > max_bits:
            if e is None:
                e = (valuation(w, v) if w != 0 else 0) + digits
            w = reduce_mod(w, v, e)
    bound = ExactLog.unit(v, (R + Lu) / d**certified)
    return LocalEscape(v, "bounded", ExactLog.zero(), bound, steps=certified, note="no escape detected")


def _periodic_disk_trap(orbit_logs, v, f, window: int = 12) -> bool:
    """Does some D(w_i, |w_n - w_i|) map into itself under f^(n-i)?"""
    n = len(orbit_logs) - 1
    wn = orbit_logs[n][0]
    for i in range(max(0, n - window), n):
        wi = orbit_logs[i][0]
        r = log_abs(wn - wi, v)
        s = r
        ok = True
        for j in range(i, n):
            logs = orbit_logs[j][1]
            s = max(k * s + logs[k] for k in range(1, len(logs)) if logs[k] is not None)
            if s > r + 64:
                ok = False
                break
        if ok and s <= r:
            return True
    return False


def _nonarch_escape(f, z, v, tol, cap, max_bits=4096):
    traps = static_traps(f, v)
    unit_bits = v.p.bit_length() if v.kind == "p" else 8
    digits = max(8, 1024 // unit_bits)
    res = None
    for _ in range(4):
        res = _nonarch_run(f, z, v, cap, digits, max_bits, traps)
        if res.mode == "exact" or res.steps >= cap or res.bound.enclosure().hi <= tol:
            return res
        digits *= 4
        max_bits *= 2
    return res


# ---------------------------------------------------------------------------
# archimedean escape (certified intervals)


class _ArchData:
    def __init__(self, f: PolyMap, prec: int):
        self.d = f.d
        with ivprec(prec):
            self.coeffs = [iv_rational(c) for c in f.coeffs]
            ad = abs(self.coeffs[-1])
            self.ratios = [abs(c) / ad for c in self.coeffs[:-1]]
            self.L = iv.log(ad) / (self.d - 1)
            self.B = iv_rational(f.arch_bound)
            self.log2term = iv.log(iv.mpf(2)) / (self.d - 1)
            MB = sum((abs(c) * self.B**i for i, c in enumerate(self.coeffs)), iv.mpf(0))
            s = (iv.log(MB) + self.L + self.log2term) / self.d
            self.SB = max(0.0, RealInterval.from_iv(s).hi)

    def E(self, r):
        total = iv.mpf(0)
        for i, q in enumerate(self.ratios):
            total += q * r ** (i - self.d)
        return total


def _arch_iterate(f: PolyMap, start, tol: float, cap: int, prec0: int = DEFAULT_PREC):
    """Certified enclosure of the escape rate of the point(s) in the box `start(prec)`."""
    prec = prec0
    best = RealInterval(0.0, float("inf"))
    steps = 0
    while prec <= 8192:
        data = _ArchData(f, prec)
        d = data.d
        with ivprec(prec):
            w = start(prec)
            enc = RealInterval(0.0, float("inf"))
            blown = False
            for n in range(cap + 1):
                r = abs(w)
                rlo, rhi = r.a, r.b
                scale = iv.mpf(1) / iv.mpf(d) ** n
                if rlo > data.B.b:
                    rl = iv.mpf(rlo)
                    E = data.E(rl)
                    if E.b >= 1:
                        blown = True
                        break
                    err = -iv.log(1 - iv.mpf(E.b)) / (d - 1)
                    lo_iv = (iv.log(rl) + data.L - err) * scale
                    hi_iv = (iv.log(iv.mpf(rhi)) + data.L + err) * scale
                    cand = RealInterval(max(0.0, RealInterval.from_iv(lo_iv).lo), RealInterval.from_iv(hi_iv).hi)
                elif rhi <= data.B.a:
                    cand = RealInterval(0.0, RealInterval.from_iv(data.SB * scale).hi)
                else:
                    top = iv.log(iv.mpf(rhi)) + data.L + data.log2term
                    hi = max(data.SB, RealInterval.from_iv(top).hi)
                    cand = RealInterval(0.0, RealInterval.from_iv(hi * scale).hi)
                enc = enc.intersect(cand)
                steps = n
                if enc.width <= tol:
                    return enc, n, prec
                if n == cap:
                    break
                if rhi > data.B.b and rlo <= data.B.a and (rhi - rlo) > 1:
                    blown = True
                    break
                acc = w * 0
                for c in reversed(data.coeffs):
                    acc = acc * w + c
                w = acc
        best = best.intersect(enc) if best.hi >= enc.lo and enc.hi >= best.lo else enc
        if not blown:
            return best, steps, prec
        prec *= 2
    return best, steps, prec


def _exact_revisit_scan(f: PolyMap, z, steps: int = 16, max_bits: int = 2048) -> bool:
    seen = set()
    w = z
    for _ in range(steps):
        if w in seen:
            return True
        seen.add(w)
        w = f(w)
        if bit_size(w) > max_bits:
            return False
    return w in seen


def _arch_escape_rational(f: PolyMap, z, tol, cap):
    z = Fraction(z)
    if _exact_revisit_scan(f, z):
        return LocalEscape(ARCH, "exact", ExactLog.zero(), note="preperiodic")
    enc, n, prec = _arch_iterate(f, lambda prec: iv_rational(z), tol, max(cap, 64))
    note = "" if enc.width <= tol else f"width {enc.width:.3g} exceeds tol"
    return LocalEscape(ARCH, "interval", ExactLog.interval(enc), steps=n, note=note)


def _arch_escape_box(f: PolyMap, box: RootBox, tol, cap):
    enc, n, prec = _arch_iterate(f, lambda prec: box.to_iv(), tol, max(cap, 64))
    note = "" if enc.width <= tol else f"width {enc.width:.3g} exceeds tol"
    return LocalEscape(ARCH, "interval", ExactLog.interval(enc), steps=n, note=note)


def escape_rate(f: PolyMap, P, v: Place, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> LocalEscape:
    """Local canonical height of P at v."""
    P = coerce(P, f.mode)
    if v.is_archimedean:
        if f.mode != MODE_Q:
            raise FieldError("Q(t) has no archimedean place")
        return _arch_escape_rational(f, P, tol, cap)
    return _nonarch_escape(f, P, v, tol, cap)


# ---------------------------------------------------------------------------
# canonical height


@dataclass
class HeightReport:
    point: object
    value: ExactLog
    preperiodic: bool | None
    local: list = field(default_factory=list)

    def to_json(self) -> dict:
        from .fields import element_to_str

        return {
            "point": element_to_str(self.point),
            "value": self.value.to_json(),
            "preperiodic": self.preperiodic,
            "local": [e.to_json() for e in self.local],
        }


def canonical_height_report(f: PolyMap, P, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> HeightReport:
    P = coerce(P, f.mode)
    cert = classify_orbit(f, P, cap=cap)
    if cert.is_preperiodic:
        return HeightReport(P, ExactLog.zero(), True)
    places = orbit_places(f, P)
    nonarch = [v for v in places if not v.is_archimedean]
    sub_tol = tol / (2 * max(1, len(nonarch)))
    total = ExactLog.zero()
    local = []
    for v in places:
        esc = escape_rate(f, P, v, tol / 2 if v.is_archimedean else sub_tol, cap)
        local.append(esc)
        total = total + esc.as_log()
    pre = False if cert.verdict == "divergent" and cert.place is not None else None
    return HeightReport(P, total, pre, local)


def canonical_height(f: PolyMap, P, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> ExactLog:
    """sum_v r_v lambda_v(P); exactly 0 on certified preperiodic points."""
    return canonical_height_report(f, P, tol, cap).value


# ---------------------------------------------------------------------------
# critical points


def factor_over_field(coeffs: Sequence, mode: str) -> list:
    """Monic irreducible factors (with multiplicity) of a polynomial over K."""
    coeffs = polys.trim(coeffs)
    if mode == MODE_Q:
        return [(fac, m) for fac, m in factor_qpoly(tuple(Fraction(c) for c in coeffs))]
    from sympy import Poly, QQ, Rational, symbols

    t, w = symbols("t w")
    cs = [RatFunc.coerce(c) for c in coeffs]
    den = (Fraction(1),)
    for c in cs:
        den = polys.quo(polys.mul(den, c.den), polys.gcd(den, c.den))
    expr = 0
    for k, c in enumerate(cs):
        numer = polys.quo(polys.mul(c.num, den), c.den)
        expr += sum(Rational(q.numerator, q.denominator) * t**j for j, q in enumerate(numer)) * w**k
    out = []
    for fac, m in Poly(expr, w, t, domain=QQ).factor_list()[1]:
        pw = Poly(fac.as_expr(), w)
        if pw.degree() < 1:
            continue
        coeff_list = []
        for cexpr in reversed(pw.all_coeffs()):
            pt = Poly(cexpr, t, domain=QQ)
            coeff_list.append(RatFunc([Fraction(int(a.p), int(a.q)) for a in reversed(pt.all_coeffs())]))
        out.append((polys.monic(tuple(coeff_list)), m))
    return out


def critical_factors(f: PolyMap) -> list:
    return factor_over_field(f.derivative, f.mode)


def _orbit_residues(f: PolyMap, A: tuple, max_bits: int):
    """Yield g_n = f^n(w) mod A for n = 0, 1, ..."""
    one = coerce(1, f.mode)
    g = polys.rem((one * 0, one), A)
    yield g
    while True:
        g = polys.mod_compose(f.coeffs, g, A)
        if sum(bit_size(c) for c in g) > max_bits:
            raise SizeBoundError("critical orbit residue too large")
        yield g


def _charpoly_mod(g: tuple, A: tuple, mode: str) -> tuple:
    k = len(A) - 1
    zero = coerce(0, mode)
    one = coerce(1, mode)
    cols = []
    cur = g
    for _ in range(k):
        cols.append(list(cur) + [zero] * (k - len(cur)))
        cur = polys.rem(polys.mul(cur, (zero, one)), A)
    return polys.charpoly([[cols[j][i] for j in range(k)] for i in range(k)])


def _polygon_lambda(f: PolyMap, A: tuple, v: Place, cap: int, max_bits: int, traps):
    """Max escape rate over the roots of A at a finite place, via Newton polygons."""
    d = f.d
    R = f.escape_units(v)
    Lu = -f.scale_valuation(v)
    seen = set()
    last = None
    try:
        for n, g in enumerate(_orbit_residues(f, A, max_bits)):
            Q = _charpoly_mod(g, A, f.mode)
            mu = polygon_of(Q, v).min_root_valuation()
            if mu is not None and -mu > R:
                return LocalEscape(v, "exact", ExactLog.unit(v, (-mu + Lu) / d**n), steps=n, note="escaped")
            last = n
            if g in seen:
                return LocalEscape(v, "exact", ExactLog.zero(), steps=n, note="preperiodic")
            seen.add(g)
            for c, r in traps:
                shifted = polys.taylor_shift(Q, c)
                m2 = polygon_of(shifted, v).min_root_valuation()
                if m2 is None or -m2 <= r:
                    return LocalEscape(v, "exact", ExactLog.zero(), steps=n, note="invariant disk")
            if n >= cap:
                break
    except SizeBoundError:
        pass
    bound = ExactLog.unit(v, (R + Lu) / d**last)
    return LocalEscape(v, "bounded", ExactLog.zero(), bound, steps=last, note="no escape detected")


def _combine_max(v: Place, parts: list) -> LocalEscape:
    """Maximum of local values (exact or bounded) at one finite place."""
    exact = [p.value for p in parts if p.mode == "exact"]
    lower = ExactLog.zero()
    for x in exact:
        if x.compare(lower) == 1:
            lower = x
    bounded = [p for p in parts if p.mode == "bounded"]
    if not bounded:
        return LocalEscape(v, "exact", lower, steps=max((p.steps for p in parts), default=0))
    upper = lower
    for p in bounded:
        if p.value.compare(lower) == 1:
            lower = p.value
        if p.bound.compare(upper) == 1:
            upper = p.bound
    if upper.compare(lower) <= 0:
        return LocalEscape(v, "exact", lower)
    return LocalEscape(v, "bounded", lower, upper, steps=max(p.steps for p in parts), note="no escape detected")


def lambda_crit_local(
    f: PolyMap,
    v: Place,
    tol: float = DEFAULT_TOL,
    cap: int = DEFAULT_CAP,
    max_bits: int = 200_000,
) -> LocalEscape:
    """lambda_crit,v(f) = max over finite critical points a of lambda_v(a)."""
    if v.is_archimedean:
        return _arch_lambda_crit(f, tol, cap)
    traps = static_traps(f, v)
    A = polys.monic(f.derivative)
    main = _polygon_lambda(f, A, v, cap, max_bits, traps)
    if main.mode == "exact":
        return main
    parts = []
    for fac, _ in critical_factors(f):
        if len(fac) == 2:
            parts.append(_nonarch_escape(f, -fac[0], v, tol, cap))
        else:
            parts.append(_polygon_lambda(f, fac, v, cap, max_bits, traps))
    out = _combine_max(v, parts)
    if out.mode == "bounded" and main.bound.compare(out.bound) == -1:
        return LocalEscape(v, "bounded", out.value, main.bound, main.steps, main.note)
    return out


def lambda_crit_direct(f: PolyMap, v: Place, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> LocalEscape:
    """Max of escape rates of the critical points, which must all be K-rational."""
    roots = []
    for fac, _ in critical_factors(f):
        if len(fac) != 2:
            raise FieldError("critical points are not all K-rational")
        roots.append(-fac[0])
    parts = [escape_rate(f, a, v, tol, cap) for a in roots]
    if v.is_archimedean:
        return _arch_max(parts)
    return _combine_max(v, parts)


def _arch_max(parts: list) -> LocalEscape:
    if all(p.mode == "exact" for p in parts):
        best = ExactLog.zero()
        for p in parts:
            if p.value.compare(best) == 1:
                best = p.value
        return LocalEscape(ARCH, "exact", best)
    encs = [p.enclosure() for p in parts]
    lo = max(e.lo for e in encs)
    hi = max(e.hi for e in encs)
    return LocalEscape(ARCH, "interval", ExactLog.interval(RealInterval(lo, hi)), steps=max(p.steps for p in parts))


def _factor_preperiodic(f: PolyMap, A: tuple, steps: int = 12, max_bits: int = 20_000) -> bool:
    seen = set()
    try:
        for n, g in enumerate(_orbit_residues(f, A, max_bits)):
            if g in seen:
                return True
            seen.add(g)
            if n >= steps:
                return False
    except SizeBoundError:
        return False
    return False


def _arch_lambda_crit(f: PolyMap, tol, cap) -> LocalEscape:
    if f.mode != MODE_Q:
        raise FieldError("Q(t) has no archimedean place")
    parts = []
    for fac, _ in critical_factors(f):
        if len(fac) == 2:
            parts.append(_arch_escape_rational(f, -fac[0], tol, cap))
            continue
        if _factor_preperiodic(f, fac):
            parts.append(LocalEscape(ARCH, "exact", ExactLog.zero(), note="preperiodic"))
            continue
        for box in certified_roots(fac):
            parts.append(_arch_escape_box(f, box, tol, cap))
    return _arch_max(parts)


# ---------------------------------------------------------------------------
# splitting radius, critical report, delta slices


def splitting_radius(f: PolyMap, v: Place) -> ExactLog:
    """log-radius of the smallest disk containing the filled Julia set at v.

    Read off the centered monic conjugate: max(0, max_{i<=d-2} log|b_i|/(d-i)).
    Valid only at places not dividing a prime <= d.
    """
    if v.is_archimedean:
        raise FieldError("splitting radius is defined at finite places")
    if v.in_S(f.d):
        raise FieldError("centered-disk identity unavailable at places dividing primes <= d")
    vals = f.centered_valuations(v)
    best = Fraction(0)
    for i in range(f.d - 1):
        if vals[i] is not None:
            best = max(best, -vals[i] / (f.d - i))
    return ExactLog.unit(v, best)


@dataclass
class PlaceEntry:
    place: Place
    lambda_crit: LocalEscape
    is_bad: bool | None
    in_S: bool
    g_v: ExactLog | None = None

    def to_json(self) -> dict:
        return {
            "place": self.place.to_json(),
            "label": str(self.place),
            "lambda_crit": self.lambda_crit.as_log().to_json(),
            "mode": self.lambda_crit.mode,
            "bad": self.is_bad,
            "in_S_d": self.in_S,
            "g_v": self.g_v.to_json() if self.g_v is not None else None,
        }


@dataclass
class CriticalHeightReport:
    f: PolyMap
    entries: list
    h_crit: ExactLog

    @property
    def bad_places(self) -> list:
        return [e.place for e in self.entries if e.is_bad]

    def entry(self, v: Place) -> PlaceEntry:
        for e in self.entries:
            if e.place == v:
                return e
        raise KeyError(str(v))

    def lambda_at(self, v: Place) -> ExactLog:
        try:
            return self.entry(v).lambda_crit.as_log()
        except KeyError:
            return ExactLog.zero()

    def reference_set(self) -> list:
        """Bad finite places outside S_d."""
        return [e.place for e in self.entries if not e.place.is_archimedean and e.is_bad and not e.in_S]

    def to_json(self) -> dict:
        return {
            "map": self.f.to_json(),
            "places": [e.to_json() for e in self.entries],
            "bad_places": [v.to_json() for v in self.bad_places],
            "h_crit": self.h_crit.to_json(),
        }


def report_places(f: PolyMap) -> list:
    places = set(f.relevant_places)
    if f.mode == MODE_Q:
        from sympy import primerange

        places.update(Place("p", p) for p in primerange(2, f.d + 1))
    else:
        places.add(FF_INF)
    out = sorted(places)
    if f.mode == MODE_Q:
        out.insert(0, ARCH)
    return out


def critical_report(f: PolyMap, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> CriticalHeightReport:
    entries = []
    total = ExactLog.zero()
    places = report_places(f)
    for v in places:
        lc = lambda_crit_local(f, v, tol, cap)
        in_S = v.in_S(f.d)
        if v.is_archimedean:
            bad = False
        else:
            bad = lc.is_positive()
        g = None
        if bad and not in_S:
            g = splitting_radius(f, v)
        entries.append(PlaceEntry(v, lc, bad, in_S, g))
        total = total + lc.as_log() * v.r
    return CriticalHeightReport(f, entries, total)


@dataclass(frozen=True)
class DeltaSlice:
    delta: Fraction
    subset: tuple
    reference: tuple
    lhs: ExactLog
    rhs: ExactLog
    verdict: bool

    def to_json(self) -> dict:
        return {
            "delta": str(self.delta),
            "subset": [v.to_json() for v in self.subset],
            "reference": [v.to_json() for v in self.reference],
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "verdict": self.verdict,
        }


def delta_slice(report: CriticalHeightReport, subset: Iterable[Place], delta) -> DeltaSlice:
    delta = exact_rational(delta)
    subset = tuple(sorted(set(subset)))
    reference = tuple(report.reference_set())
    extra = [v for v in subset if v not in reference]
    if extra:
        raise FieldError(f"places {', '.join(map(str, extra))} are not bad places outside S_d")
    for v in reference:
        if not report.entry(v).lambda_crit.is_exact:
            raise FieldError(f"lambda_crit at {v} is not exact")
    lhs = ExactLog.zero()
    for v in subset:
        lhs = lhs + report.lambda_at(v) * v.r
    rhs = ExactLog.zero()
    for v in reference:
        rhs = rhs + report.lambda_at(v) * v.r
    rhs = rhs * delta
    return DeltaSlice(delta, subset, reference, lhs, rhs, lhs.compare(rhs) >= 0)


def delta_slice_check(report: CriticalHeightReport, subset: Iterable[Place], delta) -> bool:
    """Exact test of sum_{S'} lambda_crit,v >= delta * sum_S lambda_crit,v."""
    return delta_slice(report, subset, delta).verdict


def is_isotrivial(f: PolyMap, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> bool | None:
    """Over Q(t): True iff lambda_crit vanishes exactly at every place (h_crit = 0)."""
    if f.mode != MODE_QT:
        raise FieldError("isotriviality is tested over Q(t)")
    report = critical_report(f, tol, cap)
    verdicts = [e.lambda_crit.is_zero() for e in report.entries]
    if any(v is False for v in verdicts):
        return False
    if all(v is True for v in verdicts):
        return True
    return None
