"""Quick invariant suite behind `arithdyn selftest`."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .abcd import build_abcd_point, plucker_cross_ratio
from .berkovich import (
    DiskUnionKernel,
    Disk,
    StructureSpec,
    capacity_union,
    enumerate_components,
    pairwise_diameter,
    random_structure_spec,
    structure_energy,
)
from .dynamics import PolyMap, enumerate_preperiodic
from .fields import ARCH, ExactLog, Place, product_formula_check, support
from .local import canonical_height, lambda_crit_local

CHECKS: list = []


def check(fn: Callable) -> Callable:
    CHECKS.append(fn)
    return fn


def _rand_q(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-10**6, 10**6) or 1, rng.randint(1, 10**6))


@check
def product_formula(rng):
    for _ in range(200):
        if not product_formula_check(_rand_q(rng)).formal_is_zero():
            return False
    for _ in range(20):
        T = list({_rand_q(rng) for _ in range(rng.randint(2, 8))})
        if len(T) < 2:
            continue
        places = {ARCH} | {v for i, x in enumerate(T) for y in T[i + 1 :] for v in support(x - y)}
        total = ExactLog.zero()
        for v in places:
            total = total + pairwise_diameter(T, v) * v.r
        if not total.formal_is_zero():
            return False
    return True


@check
def preperiodic_census(rng):
    f = PolyMap.of([Fraction(-29, 16), 0, 1])
    pts = set(enumerate_preperiodic(f).points)
    return pts == {Fraction(s * a, 4) for a in (1, 3, 5, 7) for s in (1, -1)}


@check
def transformation_rule(rng):
    f = PolyMap.of([Fraction(1, 3), 0, 1])
    P = Fraction(2, 5)
    a = canonical_height(f, f(P)).enclosure()
    b = (canonical_height(f, P) * 2).enclosure()
    return abs(a.mid - b.mid) <= 2e-9 + a.rad + b.rad


@check
def critical_height(rng):
    v = Place.prime(3)
    lam = lambda_crit_local(PolyMap.of([Fraction(-25, 9), 0, 1]), v)
    return lam.is_exact and lam.as_log() == ExactLog.unit(v, 1)


@check
def capacity_chain(rng):
    f = PolyMap.of([Fraction(-25, 9), 0, 1])
    v = Place.prime(3)
    for m in (1, 2, 3):
        comps = enumerate_components(f, v, m)
        logcap, w, _ = capacity_union(DiskUnionKernel.from_components(v, comps))
        if logcap != ExactLog.unit(v, Fraction(1, 2**m)) or set(w) != {Fraction(1, 2**m)}:
            return False
    return True


@check
def energy_increment(rng):
    spec = StructureSpec(2, 1, [[0, 1], [1, 0]], [1, 1], [1, 0])
    if structure_energy(spec, 2).energy != Fraction(1, 2):
        return False
    for _ in range(10):
        s = random_structure_spec(rng, d=rng.choice([2, 3]), m0=rng.choice([1, 2]))
        inc = structure_energy(s, s.m0 + 3).increments
        if any(x < 0 for x in inc):
            return False
    return True


@check
def plucker(rng):
    for _ in range(500):
        q = set()
        while len(q) < 4:
            q.add(_rand_q(rng))
        if plucker_cross_ratio(*q, 1).residual != 0:
            return False
    P = build_abcd_point([(0, 1, 3, 4)])
    return P.coords == (-8, 9, -1) and sum(P.coords) == 0


@check
def frostman(rng):
    v = Place.prime(2)
    for _ in range(20):
        s = rng.randint(1, 5)
        centers = rng.sample(range(64), s)
        disks = [Disk(v, Fraction(c), Fraction(-6 - rng.randint(0, 3))) for c in centers]
        kern = DiskUnionKernel(v, disks)
        logcap, w, res = capacity_union(kern)
        pot = [sum(kern.M[i][j] * w[j] for j in range(s)) for i in range(s)]
        lam = res.energy
        if any((w[i] > 0 and pot[i] != lam) or pot[i] < lam for i in range(s)):
            return False
    return True


def run(seed: int = 0) -> list:
    """(name, passed, error) for every check."""
    out = []
    for fn in CHECKS:
        rng = random.Random(seed)
        try:
            out.append((fn.__name__, bool(fn(rng)), None))
        except Exception as exc:  # a crash is a failure of the suite
            out.append((fn.__name__, False, f"{type(exc).__name__}: {exc}"))
    return out
