import itertools
import math
import random
from fractions import Fraction as F

import mpmath
import pytest
import sympy

from arithdyn.abcd import (
    adelically_good,
    build_abcd_point,
    find_split_quadruples,
    good_pair_fraction,
    min_preimage_gap_arch,
    plucker_cross_ratio,
    quadruple_denominator_check,
    quality_report,
    s22_places,
)
from arithdyn.dynamics import PolyMap, enumerate_preperiodic
from arithdyn.fields import ARCH, ExactLog, FieldError, Place
from arithdyn.local import critical_report

from .conftest import rand_nonzero_q

P2, P3, P5 = Place.prime(2), Place.prime(3), Place.prime(5)
SIX = [F(5, 3), F(8, 3), F(11, 3), F(-5, 3), F(-2, 3), F(1, 3)]


def logs_of_int(n):
    """Oracle: log|n| as an ExactLog from sympy's factorization."""
    out = ExactLog.zero()
    for p, e in sympy.factorint(abs(n)).items():
        out = out + ExactLog.unit(Place.prime(p), e)
    return out


def test_adelically_good_examples(f2559):
    for eps in (0, F(1, 10), 5):
        assert adelically_good(f2559, 3, eps).verdict is True
    rep = adelically_good(f2559, F(10, 3), F(1, 10))
    assert rep.verdict is False
    assert rep.good_sum == ExactLog.unit(P2, 1) + ExactLog.unit(P5, 1)
    assert s22_places(f2559) == [ARCH, P2]


def test_adelically_good_trivial_sums():
    f = PolyMap.of([F(-25, 9), 0, 1])
    for alpha in (1, -1, 3, 9, -27, 81):
        rep = adelically_good(f, alpha, F(1, 100))
        assert rep.good_sum.is_zero() and rep.verdict is True
    with pytest.raises(FieldError):
        adelically_good(f, 0, F(1, 10))


def test_good_pair_fraction():
    f = PolyMap.of([F(-29, 16), 0, 1])
    T = enumerate_preperiodic(f).points
    res = good_pair_fraction(f, T, 1)
    assert res.total == 56
    assert res.fraction == F(len(res.good), 56)
    # fraction is non-decreasing in eps
    prev = F(0)
    for eps in (F(1, 100), F(1, 10), F(1, 2), 1, 4):
        cur = good_pair_fraction(f, T, eps).fraction
        assert cur >= prev
        prev = cur
    f2 = PolyMap.of([F(-25, 9), 0, 1])
    assert good_pair_fraction(f2, [F(3), F(0)], F(1, 10)).fraction == 1
    assert good_pair_fraction(f2, [F(10, 3), F(0)], F(1, 10)).fraction == 0


def test_split_quadruples(f2559):
    quads = find_split_quadruples(f2559, SIX, P3)
    assert len(quads) == 9
    assert (F(5, 3), F(8, 3), F(-5, 3), F(-2, 3)) in quads
    for q in quads:
        assert quadruple_denominator_check(f2559, q, P3)["ok"]
    assert find_split_quadruples(f2559, SIX[:3], P3) == []
    assert find_split_quadruples(f2559, SIX[:3] + SIX[3:4], P3) == []
    assert find_split_quadruples(f2559, SIX, P3, limit=4) == quads[:4]


def test_plucker_examples():
    cr = plucker_cross_ratio(0, 1, 3, 4, 1)
    assert (cr.x, cr.complement, cr.residual) == (-8, 9, 0)
    for perm in itertools.permutations((0, 1, 3, 4)):
        assert plucker_cross_ratio(*perm, 3).residual == 0
    with pytest.raises(FieldError):
        plucker_cross_ratio(0, 1, 3, 4, 0)
    with pytest.raises(FieldError):
        plucker_cross_ratio(0, 1, 1, 4, 1)


def test_plucker_random(rng):
    for _ in range(500):
        q = set()
        while len(q) < 4:
            q.add(rand_nonzero_q(rng))
        a, b, c, d = q
        m = rand_nonzero_q(rng)
        cr = plucker_cross_ratio(a, b, c, d, m)
        # oracle: sympy rational arithmetic
        sa, sb, sc, sd, sm = (sympy.Rational(z.numerator, z.denominator) for z in (a, b, c, d, m))
        assert cr.x == F(str(sm * (sa - sd) * (sc - sb) / ((sa - sb) * (sc - sd))))
        assert cr.x + cr.complement == m and cr.residual == 0


def test_abcd_point_example():
    P = build_abcd_point([(0, 1, 3, 4)])
    assert P.coords == (-8, 9, -1) and sum(P.coords) == 0
    assert P.h == logs_of_int(9)
    assert P.rad == logs_of_int(6)
    assert P.gap == logs_of_int(3) - logs_of_int(2)


def test_abcd_point_half_split():
    """A quadruple whose cross-ratio is m/2 gives (1, 1, -2) for m = 2."""
    quad = next(
        q
        for q in itertools.permutations(range(-6, 7), 4)
        if F((q[0] - q[3]) * (q[2] - q[1]), (q[0] - q[1]) * (q[2] - q[3])) == F(1, 2)
    )
    P = build_abcd_point([quad], [2])
    assert P.coords == (1, 1, -2)
    assert P.gap.is_zero()
    assert P.h == logs_of_int(2) and P.rad == logs_of_int(2)


def test_abcd_points_lie_on_hyperplane(rng):
    for _ in range(50):
        k = rng.randint(1, 3)
        quads, ms = [], []
        while len(quads) < k:
            q = rng.sample(range(-30, 30), 4)
            cr = plucker_cross_ratio(*q, 1)
            if cr.x != 0 and cr.complement != 0:
                quads.append(q)
                ms.append(rng.randint(1, 5))
        P = build_abcd_point(quads, ms)
        assert sum(P.coords) == 0 and len(P.coords) == 2 * k + 1
        assert P.gap == P.h - P.rad


def test_quality_report(f2559):
    P = build_abcd_point([(0, 1, 3, 4)])
    rep = quality_report(P, f2559, F(1, 10))
    h_crit = critical_report(f2559).h_crit
    assert rep.threshold == h_crit * F(3, 10)
    gap, thr = rep.point.gap.enclosure(), rep.threshold.enclosure()
    assert math.isclose(gap.mid, math.log(1.5), rel_tol=1e-12)
    assert rep.verdict is (gap.lo >= thr.hi if gap.hi < thr.lo or gap.lo >= thr.hi else None)
    assert quality_report(P, f2559, F(1, 4)).verdict is True


def test_gap_zero_fails_positive_threshold(f2559):
    quad = next(
        q
        for q in itertools.permutations(range(-6, 7), 4)
        if F((q[0] - q[3]) * (q[2] - q[1]), (q[0] - q[1]) * (q[2] - q[3])) == F(1, 2)
    )
    P = build_abcd_point([quad], [2])
    assert quality_report(P, f2559, F(1, 10)).verdict is False


def test_preimage_gap_unit_circle():
    gap = min_preimage_gap_arch(PolyMap.of([0, 0, 1]), 1)
    assert gap.value.lo <= 0 <= gap.value.hi and gap.value.hi - gap.value.lo < 1e-9
    assert gap.bound.contains(0)


def test_preimage_gap_against_mpmath():
    """Oracle: roots of f^3 - alpha and f^3 from mpmath.polyroots at 60 digits."""
    rng = random.Random(3)
    mpmath.mp.dps = 60
    for _ in range(4):
        c = F(rng.randint(-8, 4), 4)
        f = PolyMap.of([c, 0, 1])
        alpha = F(rng.randint(1, 9), rng.randint(1, 3))
        try:
            gap = min_preimage_gap_arch(f, alpha)
        except FieldError:
            continue

        def coeffs(shift):
            z = sympy.Symbol("z")
            expr = z
            for _ in range(3):
                expr = sympy.expand(expr**2 + sympy.Rational(c.numerator, c.denominator))
            return [mpmath.mpf(sympy.Rational(k).p) / sympy.Rational(k).q for k in sympy.Poly(expr - shift, z).all_coeffs()]

        ys = mpmath.polyroots(coeffs(sympy.Rational(alpha.numerator, alpha.denominator)), maxsteps=400, extraprec=400)
        bs = mpmath.polyroots(coeffs(0), maxsteps=400, extraprec=400)
        want = max(min(mpmath.log(abs(y - b)) for b in bs) for y in ys)
        assert gap.value.lo - 1e-8 <= float(want) <= gap.value.hi + 1e-8
