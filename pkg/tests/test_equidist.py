import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithdyn.berkovich import enumerate_components, hsia
from arithdyn.dynamics import PolyMap
from arithdyn.equidist import (
    ComponentStats,
    Cluster,
    component_stats,
    equidist_verdict,
    global_report,
    is_eps_equidistributed,
    k_vector,
    pairwise_stat,
)
from arithdyn.fields import Place
from arithdyn.local import critical_report, delta_slice_check

P3 = Place.prime(3)
SIX = [F(5, 3), F(8, 3), F(11, 3), F(-5, 3), F(-2, 3), F(1, 3)]


def fake_stats(counts, degrees, d, m):
    clusters = [Cluster(F(i), [F(i)] * c, deg, F(0)) for i, (c, deg) in enumerate(zip(counts, degrees))]
    return ComponentStats(P3, m, d, clusters, sum(counts), [], sum(degrees) == d**m)


def test_six_point_census(f2559):
    stats = component_stats(f2559, SIX, P3, 1)
    assert stats.counts == [3, 3]
    assert [c.degree for c in stats.clusters] == [1, 1]
    assert [c.log_radius for c in stats.clusters] == [0, 0]
    assert stats.census_complete and not stats.unresolved
    assert [set(c.members) for c in stats.clusters] == [set(SIX[:3]), set(SIX[3:])]
    assert is_eps_equidistributed(stats, F(1, 10))
    assert k_vector(stats) == [F(1, 2), F(1, 2)]


def test_four_anchor_census(f2559):
    T = [F(1, 3), F(-1, 3), F(2, 3), F(-2, 3)]
    stats = component_stats(f2559, T, P3, 2)
    assert stats.counts == [1, 1, 1, 1]
    assert [c.degree for c in stats.clusters] == [1] * 4
    assert [c.log_radius for c in stats.clusters] == [-1] * 4
    assert stats.census_complete
    assert k_vector(stats) == [F(1, 4)] * 4


def test_unresolved_point(f2559):
    stats = component_stats(f2559, SIX + [F(1, 9)], P3, 1)
    assert stats.unresolved == [F(1, 9)] and stats.total == 7
    assert sum(stats.counts) == stats.total - len(stats.unresolved)
    v = equidist_verdict(stats, F(1, 10))
    assert v.verdict == "fail" and v.caveat


def test_zero_count_component_filled(f2559):
    stats = component_stats(f2559, SIX[:3], P3, 1)
    assert stats.counts == [3, 0] and stats.census_complete
    assert not stats.clusters[1].sampled
    assert not is_eps_equidistributed(stats, F(1, 2))


def test_verdict_hand_arithmetic():
    assert is_eps_equidistributed(fake_stats([3, 3], [1, 1], 2, 1), F(1, 10))
    assert not is_eps_equidistributed(fake_stats([6, 0], [1, 1], 2, 1), F(1, 10))
    # 2.7 < 3 < 3.3 holds, 4 vs (1 +/- 1/3)*3 = [2, 4] is on the boundary and fails strictly
    assert not is_eps_equidistributed(fake_stats([4, 2], [1, 1], 2, 1), F(1, 3))
    assert is_eps_equidistributed(fake_stats([4, 2], [1, 1], 2, 1), F(1, 3) + F(1, 10**9))
    with pytest.raises(ValueError):
        is_eps_equidistributed(fake_stats([3, 3], [1, 1], 2, 1), 0)


def test_incomplete_census_verdict():
    stats = fake_stats([1, 1], [1, 1], 2, 2)
    stats.unresolved = [F(7), F(8)]
    stats.total = 4
    assert not stats.census_complete
    assert equidist_verdict(stats, F(1, 2)).verdict == "incomplete"
    assert equidist_verdict(stats, F(3, 2)).verdict == "pass"


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(0, 12), min_size=2, max_size=6),
    st.fractions(min_value=F(1, 100), max_value=2),
    st.fractions(min_value=0, max_value=1),
)
def test_verdict_monotone_in_eps(counts, eps, more):
    if sum(counts) == 0:
        return
    stats = fake_stats(counts, [1] * len(counts), len(counts), 1)
    if is_eps_equidistributed(stats, eps):
        assert is_eps_equidistributed(stats, eps + more + F(1, 10**6))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.integers(1, 3)), min_size=1, max_size=6))
def test_k_vector_normalization(rows):
    counts = [c for c, _ in rows]
    degrees = [d for _, d in rows]
    if sum(counts) == 0:
        return
    stats = fake_stats(counts, degrees, sum(degrees), 1)
    k = k_vector(stats)
    assert sum(d * x for d, x in zip(degrees, k)) == 1
    assert all(x * stats.total * d == c for x, d, c in zip(k, degrees, counts))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(1, 40), st.data())
def test_near_fair_counts_pass(s, q, data):
    """Counts within 1 of |T|/s pass for every eps > s/|T|."""
    n = s * q + data.draw(st.integers(0, s - 1))
    base = [n // s] * s
    for i in range(n - sum(base)):
        base[i] += 1
    stats = fake_stats(base, [1] * s, s, 1)
    assert is_eps_equidistributed(stats, F(s, n) + F(1, 10**6))


def brute_log_diameter(T, v):
    pairs = list(itertools.permutations(T, 2))
    return sum(hsia(x, y, v).coefficient(v) for x, y in pairs) / len(pairs)


def test_pairwise_ratios(f2559):
    st6 = pairwise_stat(f2559, SIX, P3)
    assert st6.log_diameter.coefficient(P3) == brute_log_diameter(SIX, P3) == F(3, 5)
    assert st6.ratio == F(3, 5)
    assert pairwise_stat(f2559, [F(5, 3), F(8, 3), F(11, 3)], P3).ratio == 0
    conc = [F(5, 3), F(5, 3) + 3, F(5, 3) + 6]
    assert pairwise_stat(f2559, conc, P3).ratio < 0
    assert pairwise_stat(f2559, [F(5, 3), F(-5, 3)], P3).ratio == 1


def test_global_report_slice(f2559):
    rep = global_report(f2559, SIX, F(1, 10), F(9, 10))
    assert rep.slice_verdict is True and rep.passing == [P3]
    assert rep.slice_verdict == delta_slice_check(critical_report(f2559), rep.passing, F(9, 10))
    assert rep.kappa is not None and rep.kappa.lo > 0
    conc = global_report(f2559, SIX[:3], F(1, 10), F(9, 10))
    assert conc.slice_verdict is False and conc.passing == []


def test_global_report_empty_reference_set():
    rep = global_report(PolyMap.of([F(-1, 4), 0, 1]), [F(1, 2), F(-1, 2)], F(1, 10), F(1, 2))
    assert rep.note and "empty" in rep.note and rep.slice is None
