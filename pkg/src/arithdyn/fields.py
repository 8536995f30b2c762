"""Exact arithmetic over K = Q and K = Q(t).

Elements of Q are `fractions.Fraction`; elements of Q(t) are `RatFunc`.
Places, valuations, normalized absolute values, the product formula, and
heights / radicals of projective tuples live here.

Logarithmic quantities are `ExactLog` values: a finite formal combination
sum_p q_p * [p] with rational q_p, where the unit [p] stands for log p at a
prime of Q and for deg(pi) at a place pi of Q(t), plus an optional certified
interval for transcendental archimedean contributions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from mpmath import iv

from . import polys
from .intervals import DEFAULT_PREC, RealInterval, iv_log_rational, ivprec

MODE_Q = "Q"
MODE_QT = "Q(t)"


class FieldError(ValueError):
    """Invalid input to a field operation (zero valuation, bad parse, ...)."""


# ---------------------------------------------------------------------------
# integer and polynomial factorization (sympy-backed, cached)


@lru_cache(maxsize=65536)
def factor_int(n: int) -> tuple[tuple[int, int], ...]:
    from sympy import factorint

    n = abs(int(n))
    if n <= 1:
        return ()
    # Pollard p-1 rarely pays off at the sizes met here; rho and trial division suffice
    return tuple(sorted(factorint(n, use_pm1=False).items()))


def prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(p for p, _ in factor_int(n))


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise FieldError("valuation of zero")
    k = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        k += 1
    return k


@lru_cache(maxsize=16384)
def factor_qpoly(coeffs: tuple) -> tuple[tuple[tuple, int], ...]:
    """Monic irreducible factors (with multiplicity) of a nonzero polynomial over Q."""
    coeffs = polys.trim(coeffs)
    if len(coeffs) <= 1:
        return ()
    from sympy import Poly, QQ, Rational, symbols

    t = symbols("t")
    p = Poly([Rational(c.numerator, c.denominator) for c in reversed(coeffs)], t, domain=QQ)
    _, factors = p.factor_list()
    out = []
    for fac, mult in factors:
        fc = [Fraction(int(c.p), int(c.q)) for c in reversed(fac.all_coeffs())]
        out.append((polys.monic(tuple(fc)), mult))
    out.sort(key=lambda item: (len(item[0]), [str(c) for c in item[0]]))
    return tuple(out)


def poly_to_str(coeffs: Sequence, var: str = "t") -> str:
    coeffs = polys.trim(coeffs)
    if not coeffs:
        return "0"
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[k])
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f"{sign}{body}"
    return out


# ---------------------------------------------------------------------------
# Q(t)


class RatFunc:
    """Element of Q(t): num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence = (), den: Sequence = (Fraction(1),), _reduced: bool = False):
        num = polys.trim(Fraction(c) for c in num)
        den = polys.trim(Fraction(c) for c in den)
        if not den:
            raise ZeroDivisionError("RatFunc with zero denominator")
        if not _reduced:
            if not num:
                den = (Fraction(1),)
            else:
                g = polys.gcd(num, den)
                if len(g) > 1:
                    num, den = polys.quo(num, g), polys.quo(den, g)
                lead = den[-1]
                if lead != 1:
                    num = tuple(c / lead for c in num)
                    den = tuple(c / lead for c in den)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c) -> "RatFunc":
        c = Fraction(c)
        return cls((c,) if c else (), (Fraction(1),), _reduced=True)

    @classmethod
    def t(cls) -> "RatFunc":
        return cls((Fraction(0), Fraction(1)), (Fraction(1),), _reduced=True)

    @staticmethod
    def coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            return RatFunc.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Q(t)")

    def is_constant(self) -> bool:
        return len(self.den) == 1 and len(self.num) <= 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise FieldError("not a constant")
        return self.num[0] if self.num else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __add__(self, other):
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(polys.add(self.num, o.num), self.den)
        return RatFunc(
            polys.add(polys.mul(self.num, o.den), polys.mul(o.num, self.den)),
            polys.mul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(polys.neg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if o.is_constant():
            c = o.constant_value()
            if c == 0:
                return RatFunc()
            return RatFunc(polys.scale(self.num, c), self.den, _reduced=True)
        return RatFunc(polys.mul(self.num, o.num), polys.mul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero in Q(t)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        try:
            o = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(polys.power(self.num, n) if self.num or n == 0 else (), polys.power(self.den, n))

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == (Fraction(1),):
            return poly_to_str(self.num)
        return f"({poly_to_str(self.num)})/({poly_to_str(self.den)})"

    def __repr__(self):
        return f"RatFunc({self})"

    def bit_size(self) -> int:
        return sum(
            abs(c.numerator).bit_length() + c.denominator.bit_length() + 1 for c in self.num + self.den
        )


def field_mode(x) -> str:
    if isinstance(x, RatFunc):
        return MODE_QT
    if isinstance(x, (int, Fraction)):
        return MODE_Q
    raise TypeError(f"not a field element: {x!r}")


def coerce(x, mode: str):
    if mode == MODE_Q:
        if isinstance(x, RatFunc):
            if x.is_constant():
                return x.constant_value()
            raise FieldError(f"{x} is not an element of Q")
        return Fraction(x)
    return RatFunc.coerce(x)


def mode_of(values: Iterable) -> str:
    return MODE_QT if any(isinstance(v, RatFunc) for v in values) else MODE_Q


def bit_size(x) -> int:
    if isinstance(x, RatFunc):
        return x.bit_size()
    x = Fraction(x)
    return abs(x.numerator).bit_length() + x.denominator.bit_length()


# ---------------------------------------------------------------------------
# parsing


_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if not _RATIONAL.match(s):
        raise FieldError(f"not an exact rational: {s!r}")
    return Fraction(s.replace(" ", ""))


def parse_qpoly(s: str) -> tuple:
    from sympy import Poly, QQ, SympifyError, symbols, sympify

    t = symbols("t")
    try:
        expr = sympify(s.replace("^", "**"), locals={"t": t})
        p = Poly(expr, t, domain=QQ)
    except (SympifyError, TypeError, ValueError) as exc:
        raise FieldError(f"cannot parse polynomial {s!r}") from exc
    return polys.trim(Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs()))


def parse_element(s: str, mode: str | None = None):
    """Parse "a/b" (Q) or "(poly)/(poly)" / "poly" in t (Q(t))."""
    s = s.strip()
    if "t" not in s:
        q = parse_rational(s)
        return RatFunc.const(q) if mode == MODE_QT else q
    if mode == MODE_Q:
        raise FieldError(f"{s!r} involves t but mode is Q")
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", s)
    if m and _balanced(m.group(1)) and _balanced(m.group(2)):
        num, den = parse_qpoly(m.group(1)), parse_qpoly(m.group(2))
        if not den:
            raise FieldError("zero denominator")
        return RatFunc(num, den)
    from sympy import fraction, symbols, sympify, together

    t = symbols("t")
    expr = together(sympify(s.replace("^", "**"), locals={"t": t}))
    n, d = fraction(expr)
    return RatFunc(parse_qpoly(str(n)), parse_qpoly(str(d)))


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def element_to_str(x) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# places


_KIND_ORDER = {"arch": 0, "p": 1, "ff": 2, "ffinf": 3}


@dataclass(frozen=True)
class Place:
    """A place of Q or Q(t).

    kind is "arch" (the real place of Q), "p" (a rational prime), "ff" (a
    monic irreducible pi(t) of Q[t]) or "ffinf" (the degree valuation of Q(t)).
    """

    kind: str
    p: int = 0
    poly: tuple = ()

    def __post_init__(self):
        # places key every ExactLog, so the hash is computed once
        object.__setattr__(self, "_hash", hash((self.kind, self.p, self.poly)))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def arch(cls) -> "Place":
        return cls("arch")

    @classmethod
    def prime(cls, p: int) -> "Place":
        from sympy import isprime

        if not isprime(p):
            raise FieldError(f"{p} is not prime")
        return cls("p", int(p))

    @classmethod
    def ff(cls, poly: Sequence) -> "Place":
        poly = polys.monic(polys.trim(Fraction(c) for c in poly))
        if len(poly) < 2:
            raise FieldError("a place of Q(t) needs a nonconstant polynomial")
        return cls("ff", 0, poly)

    @classmethod
    def ff_infinity(cls) -> "Place":
        return cls("ffinf")

    @property
    def is_archimedean(self) -> bool:
        return self.kind == "arch"

    @property
    def mode(self) -> str:
        return MODE_Q if self.kind in ("arch", "p") else MODE_QT

    @property
    def N(self) -> Fraction:
        """Numeric weight of the unit [v]: 1 for primes of Q (times log p), deg pi for Q(t)."""
        if self.kind == "ff":
            return Fraction(len(self.poly) - 1)
        return Fraction(1)

    @property
    def r(self) -> Fraction:
        return Fraction(1)

    def in_S(self, d: int) -> bool:
        return self.kind == "p" and self.p <= d

    def unit_iv(self, prec: int = DEFAULT_PREC):
        """Interval for the numeric value of the formal unit [v]."""
        if self.kind == "p":
            return iv_log_rational(self.p, prec)
        if self.kind == "ff":
            return iv.mpf(len(self.poly) - 1)
        if self.kind == "ffinf":
            return iv.mpf(1)
        raise FieldError("the archimedean place has no formal unit")

    def unit_rational(self) -> Fraction | None:
        if self.kind == "ff":
            return Fraction(len(self.poly) - 1)
        if self.kind == "ffinf":
            return Fraction(1)
        return None

    def sort_key(self):
        return _place_key(self)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.kind == "arch":
            return "arch"
        if self.kind == "p":
            return str(self.p)
        if self.kind == "ff":
            return poly_to_str(self.poly)
        return "inf"

    def __repr__(self) -> str:
        return f"Place({self})"

    def to_json(self) -> dict:
        if self.kind == "p":
            return {"kind": "p", "p": self.p}
        if self.kind == "ff":
            return {"kind": "ff", "poly": [str(c) for c in self.poly]}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Place":
        kind = obj.get("kind")
        if kind == "p":
            return cls.prime(int(obj["p"]))
        if kind == "ff":
            return cls.ff([parse_rational(c) for c in obj["poly"]])
        if kind in ("arch", "ffinf"):
            return cls(kind)
        raise FieldError(f"unknown place kind {kind!r}")

    @classmethod
    def parse(cls, s: str, mode: str = MODE_Q) -> "Place":
        s = s.strip()
        if s in ("arch", "oo", "infinity") and mode == MODE_Q:
            return cls.arch()
        if s in ("inf", "oo", "infinity"):
            return cls.ff_infinity()
        if "t" in s:
            return cls.ff(parse_qpoly(s))
        return cls.prime(int(s))


ARCH = Place.arch()
FF_INF = Place.ff_infinity()


@lru_cache(maxsize=None)
def _place_key(v: Place) -> tuple:
    return (_KIND_ORDER[v.kind], v.p, len(v.poly), tuple(str(c) for c in v.poly))


def _item_key(item) -> tuple:
    return _place_key(item[0])


# ---------------------------------------------------------------------------
# ExactLog


def _frac(q) -> Fraction:
    if isinstance(q, float):
        raise TypeError("ExactLog scalars must be exact (int or Fraction)")
    return Fraction(q)


class ExactLog:
    """sum_v q_v [v]  (+ an optional certified real interval)."""

    __slots__ = ("formal", "arch")

    def __init__(self, formal: Mapping[Place, Fraction] | None = None, arch: RealInterval | None = None):
        clean = {}
        for k, q in (formal or {}).items():
            q = _frac(q)
            if q != 0:
                if k.is_archimedean:
                    raise FieldError("formal units are nonarchimedean places")
                clean[k] = q
        self.formal = dict(sorted(clean.items(), key=_item_key))
        self.arch = arch

    @classmethod
    def zero(cls) -> "ExactLog":
        return cls()

    @classmethod
    def unit(cls, place: Place, q=1) -> "ExactLog":
        return cls({place: _frac(q)})

    @classmethod
    def interval(cls, interval: RealInterval) -> "ExactLog":
        return cls({}, interval)

    @property
    def is_exact(self) -> bool:
        return self.arch is None

    def formal_part(self) -> "ExactLog":
        return ExactLog(self.formal)

    def coefficient(self, place: Place) -> Fraction:
        return self.formal.get(place, Fraction(0))

    def formal_is_zero(self) -> bool:
        return not self.formal

    def __add__(self, other: "ExactLog") -> "ExactLog":
        if not isinstance(other, ExactLog):
            return NotImplemented
        formal = dict(self.formal)
        fresh = False
        for k, q in other.formal.items():
            if k in formal:
                c = formal[k] + q
                if c:
                    formal[k] = c
                else:
                    del formal[k]
            else:
                formal[k] = q
                fresh = True
        if self.arch is None:
            arch = other.arch
        elif other.arch is None:
            arch = self.arch
        else:
            arch = self.arch + other.arch
        return ExactLog._raw(formal, arch, fresh)

    @classmethod
    def _raw(cls, formal: dict, arch, resort: bool = True) -> "ExactLog":
        """Build from an already clean mapping (nonzero Fractions at finite places)."""
        out = cls.__new__(cls)
        out.formal = dict(sorted(formal.items(), key=_item_key)) if resort and len(formal) > 1 else formal
        out.arch = arch
        return out

    def __neg__(self) -> "ExactLog":
        return ExactLog._raw({k: -q for k, q in self.formal.items()}, -self.arch if self.arch else None, False)

    def __sub__(self, other: "ExactLog") -> "ExactLog":
        return self + (-other)

    def __mul__(self, q) -> "ExactLog":
        q = _frac(q)
        arch = self.arch.scale(q) if self.arch is not None else None
        return ExactLog({k: c * q for k, c in self.formal.items()}, arch)

    __rmul__ = __mul__

    def __truediv__(self, q) -> "ExactLog":
        return self * (1 / _frac(q))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactLog):
            return NotImplemented
        return self.formal == other.formal and self.arch == other.arch

    def __hash__(self):
        return hash((tuple(self.formal.items()), self.arch))

    # -- numeric rendering ------------------------------------------------

    def formal_iv(self, prec: int = DEFAULT_PREC):
        with ivprec(prec):
            acc = iv.mpf(0)
            for k, q in self.formal.items():
                acc = acc + k.unit_iv(prec) * (iv.mpf(q.numerator) / q.denominator)
            return acc

    def enclosure(self, prec: int = DEFAULT_PREC) -> RealInterval:
        out = RealInterval.from_iv(self.formal_iv(prec))
        if self.arch is not None:
            out = out + self.arch
        return out

    def approx(self) -> float:
        return self.enclosure().mid

    def rational_value(self) -> Fraction | None:
        """Exact value when every unit is rational (Q(t) places) and arch is absent."""
        if self.arch is not None:
            return None
        total = Fraction(0)
        for k, q in self.formal.items():
            u = k.unit_rational()
            if u is None:
                return None
            total += q * u
        return total

    def sign(self) -> int:
        """Exact sign of the formal part; requires arch to be absent."""
        if self.arch is not None:
            raise FieldError("exact sign needs an ExactLog without interval part")
        if not self.formal:
            return 0
        rat = Fraction(0)
        logs = {}
        for k, q in self.formal.items():
            u = k.unit_rational()
            if u is None:
                logs[k] = q
            else:
                rat += q * u
        if not logs:
            return (rat > 0) - (rat < 0)
        # sum q_p log p + rat != 0 whenever some q_p != 0 (linear independence
        # of logs of primes, Lindemann for the rational part), so refining
        # the precision always separates it from 0.
        prec = 64
        while prec <= 1 << 16:
            val = ExactLog(logs).formal_iv(prec)
            with ivprec(prec):
                val = val + iv.mpf(rat.numerator) / rat.denominator
            enc = RealInterval.from_iv(val)
            if enc.lo > 0:
                return 1
            if enc.hi < 0:
                return -1
            prec *= 2
        raise FieldError("sign refinement did not terminate")

    def compare(self, other: "ExactLog") -> int | None:
        """Certified sign of self - other; None when the intervals cannot decide."""
        diff = self - other
        if diff.arch is None:
            return diff.sign()
        if diff.formal_is_zero() and diff.arch.lo == diff.arch.hi == 0.0:
            return 0
        enc = diff.enclosure()
        if enc.lo > 0:
            return 1
        if enc.hi < 0:
            return -1
        if not diff.formal and enc.lo == enc.hi == 0:
            return 0
        return None

    def is_zero(self) -> bool:
        """Exact zero test.  Q(t) units are rational, so their combination is summed."""
        if self.arch is not None:
            return not self.formal and self.arch.lo == 0.0 and self.arch.hi == 0.0
        return self.sign() == 0

    # -- serialization ---------------------------------------------------

    def render(self) -> str:
        parts = []
        for k, q in self.formal.items():
            unit = f"log {k}" if k.kind == "p" else f"[{k}]"
            parts.append(f"{q}·{unit}")
        if self.arch is not None:
            parts.append(f"[{self.arch.lo:.12g}, {self.arch.hi:.12g}]")
        if not parts:
            return "0"
        out = parts[0]
        for part in parts[1:]:
            out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return out

    def __repr__(self) -> str:
        return f"ExactLog({self.render()})"

    def to_json(self) -> dict:
        out = {
            "formal": {str(k): str(q) for k, q in self.formal.items()},
            "places": {str(k): k.to_json() for k in self.formal},
            "value": self.enclosure().to_json(),
        }
        out["arch"] = (
            {"mid": self.arch.mid, "rad": self.arch.rad, "lo": self.arch.lo, "hi": self.arch.hi}
            if self.arch is not None
            else None
        )
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "ExactLog":
        places = obj.get("places", {})
        formal = {}
        for key, q in obj.get("formal", {}).items():
            place = Place.from_json(places[key]) if key in places else Place.parse(key)
            formal[place] = parse_rational(q)
        arch = obj.get("arch")
        interval = None
        if arch is not None:
            if "lo" in arch:
                interval = RealInterval(arch["lo"], arch["hi"])
            else:
                interval = RealInterval.from_mid_rad(arch["mid"], arch["rad"])
        return cls(formal, interval)


def sum_logs(values: Iterable[ExactLog]) -> ExactLog:
    total = ExactLog.zero()
    for v in values:
        total = total + v
    return total


def max_exact(values: Sequence[ExactLog]) -> ExactLog:
    """Maximum of exact formal logs (exact comparisons)."""
    best = None
    for v in values:
        if best is None or v.compare(best) == 1:
            best = v
    if best is None:
        raise ValueError("max of empty sequence")
    return best


# ---------------------------------------------------------------------------
# valuations


def _ff_valuation_poly(a: tuple, pi: tuple) -> int:
    k = 0
    while True:
        q, r = polys.divmod_poly(a, pi)
        if r:
            return k
        a = q
        k += 1


def valuation(x, v: Place) -> int:
    """Order of the prime of v in x (x != 0); v must be nonarchimedean."""
    if v.is_archimedean:
        raise FieldError("valuation at an archimedean place")
    if x == 0:
        raise FieldError("valuation of zero")
    if v.kind == "p":
        if isinstance(x, RatFunc):
            x = x.constant_value()
        x = Fraction(x)
        n, d = x.numerator, x.denominator
        if d % v.p == 0:
            return -vp_int(d, v.p)
        return vp_int(n, v.p)
    x = RatFunc.coerce(x)
    if v.kind == "ffinf":
        return polys.degree(x.den) - polys.degree(x.num)
    return _ff_valuation_poly(x.num, v.poly) - _ff_valuation_poly(x.den, v.poly)


def valuation_or_inf(x, v: Place):
    """valuation, with None standing for +infinity at x = 0."""
    return None if x == 0 else valuation(x, v)


def support(x) -> list[Place]:
    """Nonarchimedean places with nonzero valuation of x."""
    if x == 0:
        raise FieldError("support of zero")
    if isinstance(x, RatFunc):
        out = set()
        for part in (x.num, x.den):
            for pi, _ in factor_qpoly(part):
                out.add(Place("ff", 0, pi))
        if len(x.num) != len(x.den):
            out.add(FF_INF)
        return sorted(out)
    x = Fraction(x)
    return sorted({Place("p", p) for p in prime_divisors(x.numerator) + prime_divisors(x.denominator)})


def candidate_places(values: Iterable, mode: str) -> list[Place]:
    """All nonarchimedean places where some nonzero value has nonzero valuation."""
    out = set()
    for x in values:
        if x != 0:
            out.update(support(x))
    if mode == MODE_QT:
        out.add(FF_INF)
    return sorted(out)


def abs_log(x, v: Place) -> ExactLog:
    """log |x|_v.  At the real place of Q this is the exact log of a rational."""
    if x == 0:
        raise FieldError("log of |0|")
    if v.is_archimedean:
        q = abs(coerce(x, MODE_Q))
        return ExactLog({Place("p", p): e for p, e in factor_int(q.numerator)}) - ExactLog(
            {Place("p", p): e for p, e in factor_int(q.denominator)}
        )
    return ExactLog.unit(v, -valuation(x, v))


def product_formula_check(x) -> ExactLog:
    """sum_v r_v log|x|_v, computed place by place.

    The formal part is exactly zero; in Q mode the interval part is an
    independent numeric enclosure (log|x| at the real place minus the numeric
    value of the finite-place sum) and contains 0.
    """
    mode = field_mode(x)
    total = ExactLog.zero()
    for v in support(x):
        total = total + abs_log(x, v) * v.r
    if mode == MODE_QT:
        if FF_INF not in support(x):
            total = total + abs_log(x, FF_INF)
        return total
    arch = abs_log(x, ARCH)
    numeric = RealInterval.from_iv(iv_log_rational(abs(Fraction(x)))) + RealInterval.from_iv(total.formal_iv())
    return ExactLog((total + arch).formal, numeric)


# ---------------------------------------------------------------------------
# heights of tuples


@dataclass(frozen=True)
class TupleHeightReport:
    h: ExactLog
    rad: ExactLog | None
    support: tuple[Place, ...]
    finite_part: ExactLog
    arch_part: ExactLog

    def to_json(self) -> dict:
        return {
            "h": self.h.to_json(),
            "rad": self.rad.to_json() if self.rad is not None else None,
            "support": [p.to_json() for p in self.support],
            "finite_part": self.finite_part.to_json(),
            "arch_part": self.arch_part.to_json(),
        }


def height_tuple(coords: Sequence, need_rad: bool = True) -> TupleHeightReport:
    """Projective height h(P), radical rad(P) and I(P) of P = (z_1, ..., z_n)."""
    if len(coords) < 2:
        raise FieldError("a projective tuple needs n >= 2 coordinates")
    mode = mode_of(coords)
    zs = [coerce(z, mode) for z in coords]
    nonzero = [z for z in zs if z != 0]
    if not nonzero:
        raise FieldError("the all-zero tuple has no height")
    has_zero = len(nonzero) < len(zs)
    if need_rad and has_zero:
        raise FieldError("rad undefined: tuple has a zero coordinate")
    places = candidate_places(nonzero, mode)
    finite = ExactLog.zero()
    rad_formal = {}
    supp = []
    for v in places:
        vals = [valuation(z, v) for z in nonzero]
        finite = finite + ExactLog.unit(v, -min(vals))
        if not has_zero and len(set(vals)) > 1:
            rad_formal[v] = Fraction(1)
            supp.append(v)
    if mode == MODE_Q:
        biggest = max(abs(z) for z in nonzero)
        arch = abs_log(biggest, ARCH)
    else:
        arch = ExactLog.zero()
    rad = ExactLog(rad_formal) if not has_zero else None
    return TupleHeightReport(finite + arch, rad, tuple(supp), finite, arch)
