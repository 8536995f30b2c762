import random
from fractions import Fraction as F

import mpmath
import pytest

from arithdyn.dynamics import PolyMap
from arithdyn.fields import ARCH, FF_INF, ExactLog, FieldError, Place, RatFunc, valuation
from arithdyn.local import (
    canonical_height,
    critical_report,
    delta_slice_check,
    escape_rate,
    is_isotrivial,
    lambda_crit_direct,
    lambda_crit_local,
    splitting_radius,
)

P2, P3, P5 = Place.prime(2), Place.prime(3), Place.prime(5)
TOL = 1e-9


def arch_oracle(coeffs, z, n_max=400):
    """Escape rate at the real place by 60-digit iteration until |z| is huge."""
    d = len(coeffs) - 1
    with mpmath.workdps(60):
        cs = [mpmath.mpf(c.numerator) / c.denominator for c in map(F, coeffs)]
        x = mpmath.mpf(z.numerator) / z.denominator
        for n in range(n_max):
            if abs(x) > mpmath.mpf(10) ** 40:
                return float((mpmath.log(abs(x)) + mpmath.log(abs(cs[-1])) / (d - 1)) / mpmath.mpf(d) ** n)
            x = mpmath.polyval(cs[::-1], x)
        return 0.0


def padic_oracle(coeffs, z, p, steps=7):
    """(-v_p(f^n z) + v_p-scale) / d^n once the valuation has run away (exact)."""
    d = len(coeffs) - 1
    coeffs = [F(c) for c in coeffs]
    lead_v = F(valuation(coeffs[-1], Place.prime(p)), d - 1)
    R = max(
        [lead_v]
        + [(valuation(coeffs[-1], Place.prime(p)) - valuation(c, Place.prime(p))) / F(d - i) for i, c in enumerate(coeffs[:-1]) if c]
    )
    for n in range(steps):
        if z != 0 and -valuation(z, Place.prime(p)) > R:
            return (F(-valuation(z, Place.prime(p))) - lead_v) / d**n
        z = sum(c * z**i for i, c in enumerate(coeffs))
    return None


def test_escape_rate_examples():
    e = escape_rate(PolyMap.of([F(1, 3), 0, 1]), F(0), P3)
    assert e.is_exact and e.value == ExactLog.unit(P3, F(1, 2))
    e = escape_rate(PolyMap.of([0, 0, 1]), F(2), ARCH, TOL)
    enc = e.enclosure()
    assert enc.width <= 1e-9 and enc.lo <= float(mpmath.log(2)) <= enc.hi
    f = PolyMap.of([-1, 0, 1])
    for v in (ARCH, P2, P3):
        assert escape_rate(f, F(0), v).value.is_zero()


def test_canonical_height_examples():
    assert canonical_height(PolyMap.of([F(-29, 16), 0, 1]), F(5, 4)).is_zero()
    h = canonical_height(PolyMap.of([0, 0, 1]), F(2), TOL).enclosure()
    assert abs(h.mid - float(mpmath.log(2))) <= TOL
    f = PolyMap.of([-1, 0, 1])
    diff = (canonical_height(f, F(3), TOL) - canonical_height(f, F(2), TOL) * 2).enclosure()
    assert max(abs(diff.lo), abs(diff.hi)) <= 2 * TOL


def test_arch_escape_against_oracle():
    rng = random.Random(11)
    for _ in range(25):
        d = rng.choice([2, 3])
        coeffs = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(d)] + [F(rng.randint(1, 4), rng.randint(1, 3))]
        z = F(rng.randint(-20, 20), rng.randint(1, 6))
        enc = escape_rate(PolyMap.of(coeffs), z, ARCH, TOL).enclosure()
        ref = arch_oracle(coeffs, z)
        assert enc.lo - 1e-12 <= ref <= enc.hi + 1e-12, (coeffs, z, enc, ref)


def test_nonarch_escape_against_valuation_oracle():
    rng = random.Random(12)
    checked = 0
    for _ in range(60):
        p = rng.choice([2, 3, 5])
        d = rng.choice([2, 3])
        coeffs = [F(rng.randint(-9, 9), rng.choice([1, p, p * p])) for _ in range(d)] + [F(rng.choice([1, p, 1])) / rng.choice([1, p])]
        z = F(rng.randint(-20, 20), rng.choice([1, p, p**2, p**3]))
        ref = padic_oracle(coeffs, z, p)
        e = escape_rate(PolyMap.of(coeffs), z, Place.prime(p))
        if ref is not None:
            checked += 1
            assert e.is_exact and e.value == ExactLog.unit(Place.prime(p), ref)
        elif e.is_exact:
            assert e.value.coefficient(Place.prime(p)) >= 0
    assert checked >= 20


def test_transformation_rule_nonarch_exact():
    rng = random.Random(13)
    for _ in range(40):
        p = rng.choice([2, 3, 5, 7])
        v = Place.prime(p)
        f = PolyMap.of([F(rng.randint(-9, 9), rng.choice([1, p])), F(rng.randint(-3, 3)), F(1)])
        z = F(rng.randint(-30, 30), rng.choice([1, p, p * p]))
        a, b = escape_rate(f, f(z), v), escape_rate(f, z, v)
        if a.is_exact and b.is_exact:
            assert a.value == b.value * 2


def test_lambda_crit_examples():
    assert lambda_crit_local(PolyMap.of([F(-25, 9), 0, 1]), P3).value == ExactLog.unit(P3, 1)
    assert lambda_crit_local(PolyMap.of([0, 0, F(1, 5), 1]), P5).value == ExactLog.unit(P5, 1)
    for d, p, e in [(2, 3, 1), (2, 5, 2), (3, 5, 3), (2, 7, 3), (3, 2, 1)]:
        f = PolyMap.of([F(1, p**e)] + [0] * (d - 1) + [1])
        lam = lambda_crit_local(f, Place.prime(p))
        assert lam.is_exact and lam.value == ExactLog.unit(Place.prime(p), F(e, d))


def test_polygon_and_direct_agree_on_rational_critical_points():
    rng = random.Random(14)
    agree = 0
    for _ in range(30):
        a, b = F(rng.randint(-6, 6), rng.choice([1, 2, 3, 5])), F(rng.randint(-6, 6), rng.choice([1, 3, 5]))
        c = F(rng.randint(-9, 9), rng.choice([1, 2, 3, 5, 25]))
        # f' = 3 (z - a)(z - b)
        f = PolyMap.of([c, 3 * a * b, F(-3, 2) * (a + b), F(1)])
        for v in f.relevant_places:
            x, y = lambda_crit_local(f, v), lambda_crit_direct(f, v)
            if x.is_exact and y.is_exact:
                assert x.value == y.value, (f, v)
                agree += 1
            else:
                ex, ey = x.enclosure(), y.enclosure()
                assert ex.lo <= ey.hi and ey.lo <= ex.hi
    assert agree >= 20


def test_splitting_radius_equals_lambda_crit_at_bad_places():
    rng = random.Random(15)
    seen = 0
    for _ in range(30):
        p = rng.choice([3, 5, 7])
        f = PolyMap.of([F(rng.randint(-20, 20), p ** rng.randint(1, 3)), F(rng.randint(-3, 3), rng.choice([1, p])), F(1)])
        v = Place.prime(p)
        lam = lambda_crit_local(f, v)
        if lam.is_exact and lam.value.sign() > 0:
            assert splitting_radius(f, v) == lam.value
            seen += 1
    assert seen >= 10
    with pytest.raises(FieldError):
        splitting_radius(PolyMap.of([F(1, 4), 0, 1]), P2)


def test_critical_report_examples():
    rep = critical_report(PolyMap.of([F(-25, 9), 0, 1]))
    assert rep.bad_places == [P3]
    assert rep.entry(P3).g_v == ExactLog.unit(P3, 1)
    assert rep.h_crit.coefficient(P3) == 1 and rep.h_crit.arch is not None
    rep = critical_report(PolyMap.of([0, 0, 1]))
    assert rep.bad_places == [] and rep.h_crit.formal_is_zero()
    assert rep.h_crit.enclosure().lo == rep.h_crit.enclosure().hi == 0
    rep = critical_report(PolyMap.of([F(-29, 16), 0, 1]))
    assert rep.bad_places == [P2] and rep.entry(P2).in_S and rep.entry(P2).g_v is None


def test_delta_slice_examples():
    rep = critical_report(PolyMap.of([F(-25, 9), 0, 1]))
    assert delta_slice_check(rep, [P3], F(99, 100))
    assert not delta_slice_check(rep, [], F(1, 2))
    rep = critical_report(PolyMap.of([F(1, 15), 0, 1]))
    assert delta_slice_check(rep, [P5], F(1, 2))  # log 5 > log 3
    assert not delta_slice_check(rep, [P3], F(1, 2))
    # equal weights: z^2 + 1/(t(t-1)) has lambda_crit = 1/2 at both t and t-1
    t = RatFunc.t()
    rep = critical_report(PolyMap.of([1 / (t * (t - 1)), 0, 1]))
    vt, vt1 = Place.ff((0, 1)), Place.ff((-1, 1))
    assert set(rep.reference_set()) == {vt, vt1}
    assert delta_slice_check(rep, [vt], F(1, 2))
    assert not delta_slice_check(rep, [vt], F(51, 100))


def test_isotriviality():
    t = RatFunc.t()
    one = RatFunc.const(1)
    assert is_isotrivial(PolyMap.of([one, 0, 1])) is True
    assert is_isotrivial(PolyMap.of([t, 0, 1])) is False
    assert is_isotrivial(PolyMap.of([one / t, 0, 1])) is False


def test_function_field_lambda_at_infinity():
    t = RatFunc.t()
    lam = lambda_crit_local(PolyMap.of([t, 0, 1]), FF_INF)
    assert lam.is_exact and lam.value == ExactLog.unit(FF_INF, F(1, 2))
