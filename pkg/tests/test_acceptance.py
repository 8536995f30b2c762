"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line.  Run directly with
    python -m pytest tests/test_acceptance.py -v -s
or  python tests/test_acceptance.py
"""

import contextlib
import itertools
import random
import time
from fractions import Fraction as F

import pytest

from arithdyn.abcd import build_abcd_point, plucker_cross_ratio
from arithdyn.berkovich import (
    Disk,
    DiskUnionKernel,
    StructureSpec,
    capacity_union,
    enumerate_components,
    pairwise_diameter,
    random_structure_spec,
    same_component,
    structure_energy,
    structure_level_energy,
    weighted_energy,
)
from arithdyn.dynamics import PolyMap, enumerate_preperiodic
from arithdyn.equidist import component_stats, equidist_verdict, is_eps_equidistributed, k_vector
from arithdyn.fields import ARCH, ExactLog, Place, product_formula_check, support
from arithdyn.local import canonical_height, escape_rate, lambda_crit_direct, lambda_crit_local, splitting_radius

from .test_dynamics import brute_preperiodic

TOL = 1e-9
P3 = Place.prime(3)
F2559 = PolyMap.of([F(-25, 9), 0, 1])
SIX = [F(5, 3), F(8, 3), F(11, 3), F(-5, 3), F(-2, 3), F(1, 3)]


@contextlib.contextmanager
def criterion(capsys, n, title):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"criterion {n} FAIL  {title}: {type(exc).__name__}: {exc}"
        raise
    else:
        line = f"criterion {n} PASS  {title} ({time.perf_counter() - t0:.2f}s)"
    finally:
        with capsys.disabled():
            print("\n" + line)


def rand_q(rng, size):
    return F(rng.randint(-size, size), rng.randint(1, size))


def rand_nonzero(rng, size):
    while True:
        q = rand_q(rng, size)
        if q:
            return q


def test_criterion_1_product_formula(capsys):
    with criterion(capsys, 1, "product formula exactness"):
        rng = random.Random(101)
        t0 = time.perf_counter()
        for _ in range(1000):
            assert product_formula_check(rand_nonzero(rng, 10**9)).formal_is_zero()
        for _ in range(100):
            T = set()
            size = rng.randint(2, 10)
            while len(T) < size:
                T.add(rand_q(rng, 10**6))
            T = list(T)
            # every place where some x - y is not a unit divides a*d - c*b, b or d
            places = {ARCH} | {v for x in T for v in support(F(x.denominator))}
            places |= {v for x, y in itertools.combinations(T, 2) for v in support(x.numerator * y.denominator - y.numerator * x.denominator)}
            total = ExactLog.zero()
            for v in places:
                total = total + pairwise_diameter(T, v) * v.r
            assert total.formal_is_zero()
        elapsed = time.perf_counter() - t0
        assert elapsed < 5, f"took {elapsed:.2f}s"


def test_criterion_2_preperiodic_censuses(capsys):
    with criterion(capsys, 2, "preperiodic censuses"):
        t0 = time.perf_counter()
        cases = [
            ([0, 0, 1], {F(0), F(1), F(-1)}),
            ([-1, 0, 1], {F(0), F(1), F(-1)}),
            ([-2, 0, 1], {F(0), F(1), F(-1), F(2), F(-2)}),
            ([F(-29, 16), 0, 1], {F(s * a, 4) for a in (1, 3, 5, 7) for s in (1, -1)}),
        ]
        for coeffs, expected in cases:
            found = set(enumerate_preperiodic(PolyMap.of(coeffs)).points)
            assert found == expected, (coeffs, found)
            brute = brute_preperiodic([F(c) for c in coeffs], max_den=16, max_abs=3)
            assert brute == expected, (coeffs, brute)
        assert len(cases[-1][1]) == 8
        elapsed = time.perf_counter() - t0
        assert elapsed < 30, f"took {elapsed:.2f}s"


def test_criterion_3_transformation_rule(capsys):
    with criterion(capsys, 3, "transformation rule and height axioms"):
        rng = random.Random(103)
        for _ in range(100):
            d = rng.choice([2, 3])
            coeffs = [rand_q(rng, 12) for _ in range(d)] + [rand_nonzero(rng, 6)]
            f = PolyMap.of(coeffs)
            P = rand_q(rng, 30)
            a = canonical_height(f, f(P), TOL)
            b = canonical_height(f, P, TOL) * d
            assert (a - b).formal_is_zero(), (coeffs, P)
            ea = a.arch.mid if a.arch is not None else 0.0
            eb = b.arch.mid if b.arch is not None else 0.0
            assert abs(ea - eb) <= 2 * TOL, (coeffs, P, ea, eb)
        for coeffs in ([-1, 0, 1], [-2, 0, 1], [F(-29, 16), 0, 1], [0, F(-1, 1), 0, 1]):
            f = PolyMap.of(coeffs)
            for P in enumerate_preperiodic(f).points:
                h = canonical_height(f, P, TOL)
                assert h.is_exact and h.is_zero(), (coeffs, P)
        exact_pairs = 0
        for _ in range(200):
            p = rng.choice([2, 3, 5, 7])
            v = Place.prime(p)
            d = rng.choice([2, 3])
            f = PolyMap.of([F(rng.randint(-9, 9), rng.choice([1, p, p * p]))] + [F(rng.randint(-2, 2)) for _ in range(d - 1)] + [F(1)])
            z = F(rng.randint(-30, 30), rng.choice([1, p, p * p]))
            x, y = escape_rate(f, f(z), v), escape_rate(f, z, v)
            if x.is_exact and y.is_exact:
                assert x.value == y.value * d
                exact_pairs += 1
        assert exact_pairs >= 100


def test_criterion_4_critical_heights(capsys):
    with criterion(capsys, 4, "critical heights and splitting radii"):
        lam = lambda_crit_local(F2559, P3)
        assert lam.is_exact and lam.value == ExactLog.unit(P3, 1)
        assert splitting_radius(F2559, P3) == ExactLog.unit(P3, 1)
        for d, p, e in [(2, 3, 1), (2, 5, 2), (3, 5, 3)]:
            f = PolyMap.of([F(1, p**e)] + [0] * (d - 1) + [1])
            v = Place.prime(p)
            lam = lambda_crit_local(f, v)
            assert lam.is_exact and lam.value == ExactLog.unit(v, F(e, d))
            assert lambda_crit_direct(f, v).value == ExactLog.unit(v, F(e, d))
        rng = random.Random(104)
        agree = 0
        for _ in range(40):
            a = F(rng.randint(-6, 6), rng.choice([1, 2, 3, 5]))
            b = F(rng.randint(-6, 6), rng.choice([1, 3, 5]))
            c = F(rng.randint(-9, 9), rng.choice([1, 2, 3, 5, 25]))
            f = PolyMap.of([c, 3 * a * b, F(-3, 2) * (a + b), F(1)])  # critical points a and b
            for v in f.relevant_places:
                if v.is_archimedean:
                    continue
                x, y = lambda_crit_local(f, v), lambda_crit_direct(f, v)
                assert x.is_exact and y.is_exact, (f, v)
                assert x.value == y.value, (f, v)
                agree += 1
        assert agree >= 40


def test_criterion_5_capacity_chain(capsys):
    with criterion(capsys, 5, "capacity chain"):
        for m, expect in ((1, F(1, 2)), (2, F(1, 4))):
            comps = enumerate_components(F2559, P3, m)
            logcap, weights, _ = capacity_union(DiskUnionKernel.from_components(P3, comps))
            assert logcap == ExactLog.unit(P3, expect)
            assert weights == [F(1, 2**m)] * 2**m


def test_criterion_6_energy_increment_bound(capsys):
    with criterion(capsys, 6, "energy increment bound and monotonicity"):
        g = splitting_radius(F2559, P3)
        top = enumerate_components(F2559, P3, 1)

        def mesh_energy(m, k):
            comps = enumerate_components(F2559, P3, m)
            groups = [0 if same_component(F2559, c.anchor, top[0].anchor, 1, P3) else 1 for c in comps]
            return weighted_energy(DiskUnionKernel.from_components(P3, comps), groups, k)[0]

        I1, I2 = mesh_energy(1, [1, 0]), mesh_energy(2, [1, 0])
        assert I1.is_zero() and I2 == g * F(1, 2)
        d, m0 = 2, 1
        assert I2 - I1 == g * (d**m0 * (F(1, d) - F(1, d**2)))
        spec = StructureSpec(2, 1, [[0, 1], [1, 0]], [1, 1], [1, 0])
        assert structure_energy(spec, 2).increments == [d**m0 * (F(1, d) - F(1, d**2))]
        uniform = [F(1, 2), F(1, 2)]
        for m in range(1, 5):
            inc = mesh_energy(m + 1, uniform) - mesh_energy(m, uniform)
            assert inc == g * (F(1, 2**m) - F(1, 2 ** (m + 1))), m
        rng = random.Random(106)
        for _ in range(50):
            s = random_structure_spec(rng, d=rng.choice([2, 3]), m0=rng.choice([1, 2]))
            levels = [structure_level_energy(s, m) for m in range(s.m0, s.m0 + 5)]
            assert all(b - a >= 0 for a, b in zip(levels, levels[1:])), s


def test_criterion_7_component_census(capsys):
    with criterion(capsys, 7, "component census and equidistribution"):
        stats = component_stats(F2559, SIX, P3, 1)
        assert [set(c.members) for c in stats.clusters] == [set(SIX[:3]), set(SIX[3:])]
        assert stats.counts == [3, 3]
        assert [c.degree for c in stats.clusters] == [1, 1]
        assert [c.log_radius for c in stats.clusters] == [0, 0]
        assert is_eps_equidistributed(stats, F(1, 10))  # 2.7 < 3 < 3.3
        assert k_vector(stats) == [F(1, 2), F(1, 2)]
        conc = component_stats(F2559, SIX[:3] + [F(14, 3), F(17, 3), F(20, 3)], P3, 1)
        assert conc.counts == [6, 0] and not is_eps_equidistributed(conc, F(1, 10))
        four = [F(1, 3), F(-1, 3), F(2, 3), F(-2, 3)]
        stats2 = component_stats(F2559, four, P3, 2)
        assert [c.members for c in stats2.clusters] == [[x] for x in four]
        assert [c.degree for c in stats2.clusters] == [1] * 4
        assert [c.log_radius for c in stats2.clusters] == [-1] * 4
        assert equidist_verdict(stats2, F(1, 10)).verdict == "pass"
        checked = 0
        for coeffs, p in (([F(-25, 9), 0, 1], 3), ([F(-1, 25), 0, 1], 5), ([F(1, 7), F(-8, 7), 0, 1], 7), ([0, F(-1, 5), 0, 1], 5)):
            f, v = PolyMap.of(coeffs), Place.prime(p)
            g = splitting_radius(f, v).coefficient(v)
            for m in (1, 2, 3):
                for comp in enumerate_components(f, v, m):
                    assert comp.log_radius >= -(f.d**m) * g, (coeffs, m, comp)
                    checked += 1
        for level, st in ((1, stats), (2, stats2)):
            for c in st.clusters:
                assert c.log_radius >= -(2**level) * 1
        assert checked > 0


def test_criterion_8_plucker_abcd(capsys):
    with criterion(capsys, 8, "Pluecker identity and abcd points"):
        P = build_abcd_point([(0, 1, 3, 4)], [1])
        assert P.coords == (-8, 9, -1)
        log = lambda p, e=1: ExactLog.unit(Place.prime(p), e)  # noqa: E731
        assert P.h == log(3, 2)
        assert P.rad == log(2) + log(3)
        assert P.gap == log(3) - log(2)
        rng = random.Random(108)
        for _ in range(10**4):
            q = set()
            while len(q) < 4:
                q.add(rand_q(rng, 10**4))
            cr = plucker_cross_ratio(*q, rand_nonzero(rng, 100))
            assert cr.residual == 0
        for _ in range(200):
            k = rng.randint(1, 3)
            quads, ms = [], []
            while len(quads) < k:
                q = rng.sample(range(-50, 50), 4)
                cr = plucker_cross_ratio(*q, 1)
                if cr.x and cr.complement:
                    quads.append(q)
                    ms.append(rng.randint(1, 9))
            assert sum(build_abcd_point(quads, ms).coords) == 0


def grid_min(M, N):
    """Exhaustive minimum of w^T M w over the simplex grid with step 1/N."""
    n = len(M)
    best = None
    for cut in itertools.combinations(range(N + n - 1), n - 1):
        parts, prev = [], -1
        for c in cut + (N + n - 1,):
            parts.append(c - prev - 1)
            prev = c
        e = sum(parts[i] * M[i][j] * parts[j] for i in range(n) for j in range(n) if parts[i] and parts[j])
        e = F(e, N * N)
        best = e if best is None or e < best else best
    return best


def test_criterion_9_frostman(capsys):
    with criterion(capsys, 9, "Frostman equalization"):
        rng = random.Random(109)
        grids = {1: 1, 2: 60, 3: 30, 4: 16, 5: 12, 6: 10}
        for _ in range(100):
            p = rng.choice([2, 3, 5])
            v = Place.prime(p)
            s = rng.randint(1, min(6, p**3))
            centers = rng.sample(range(p**3), s)
            disks = [Disk(v, F(c), F(-3 - rng.randint(0, 3))) for c in centers]
            kernel = DiskUnionKernel(v, disks)
            logcap, w, res = capacity_union(kernel)
            M = kernel.M
            assert sum(w) == 1 and all(x >= 0 for x in w)
            pot = [sum(M[i][j] * w[j] for j in range(s)) for i in range(s)]
            lam = res.energy
            for i in range(s):
                if w[i] > 0:
                    assert pot[i] == lam
                else:
                    assert pot[i] >= lam
            N = grids[s]
            brute = grid_min(M, N)
            gap = max(abs(x) for row in M for x in row) * F(s, N) ** 2
            assert lam <= brute <= lam + gap, (centers, lam, brute, gap)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
