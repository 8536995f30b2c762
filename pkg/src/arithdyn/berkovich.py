"""Disks, filled-Julia-set components, Hsia kernel and capacities at finite places.

All log-radii and log-distances at a finite place v are rationals in units of
[v].  The archimedean place only enters through `hsia` / `pairwise_diameter`.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from . import polys
from .dynamics import PolyMap
from .fields import (
    MODE_Q,
    ExactLog,
    FieldError,
    Place,
    RatFunc,
    abs_log,
    coerce,
    element_to_str,
    factor_int,
    valuation,
    vp_int,
)
from .local import splitting_radius
from .nonarch import (
    NewtonPolygon,
    disk_image_data,
    log_abs,
    newton_polygon,
    polygon_of,
)
from .qp import QPResult, minimize_groups

__all__ = [
    "NewtonPolygon",
    "newton_polygon",
    "polygon_of",
    "hsia",
    "pairwise_diameter",
    "Disk",
    "disk_image",
    "FilledJuliaData",
    "same_component",
    "component_radius",
    "local_degree",
    "DiskUnionKernel",
    "capacity_union",
    "weighted_energy",
    "StructureSpec",
    "structure_energy",
]


class NotInLevelSet(FieldError):
    pass


# ---------------------------------------------------------------------------
# Hsia kernel on classical points


def hsia(x, y, v: Place) -> ExactLog:
    """log delta_v(x, y) = log|x - y|_v."""
    if x == y:
        raise FieldError("repeated points: log 0")
    return abs_log(x - y, v)


@lru_cache(maxsize=64)
def _differences(T: tuple) -> tuple:
    """(numerator, denominator) of x - y over unordered pairs, reused across places."""
    out = []
    for x, y in itertools.combinations(T, 2):
        q = x - y
        out.append((q.numerator, q.denominator))
    return tuple(out)


def pairwise_diameter(T: Sequence, v: Place) -> ExactLog:
    """log d_v(T) = (1/(n(n-1))) sum_{i != j} log|x_i - x_j|_v."""
    T = list(T)
    n = len(T)
    if n < 2:
        raise FieldError("need at least two points")
    if len(set(T)) != n:
        raise FieldError("repeated points: log 0")
    scale = Fraction(2, n * (n - 1))
    pairs = itertools.combinations(T, 2)
    if v.kind == "p" and not any(isinstance(x, RatFunc) for x in T):
        p, total = v.p, 0
        for num, den in _differences(tuple(Fraction(x) for x in T)):
            if num % p == 0:
                total -= vp_int(num, p)
            elif den % p == 0:
                total += vp_int(den, p)
        return ExactLog.unit(v, total * scale)
    if not v.is_archimedean:
        return ExactLog.unit(v, -sum(valuation(x - y, v) for x, y in pairs) * scale)
    if any(isinstance(x, RatFunc) for x in T):
        total = ExactLog.zero()
        for x, y in pairs:
            total = total + hsia(x, y, v)
        return total * scale
    # real place of Q: |a/b - c/d| = |ad - cb| / (bd); each denominator is factored once
    T = [Fraction(x) for x in T]
    exps: Counter = Counter()
    for x in T:
        for p, e in factor_int(x.denominator):
            exps[p] -= (n - 1) * e
    for x, y in itertools.combinations(T, 2):
        for p, e in factor_int(x.numerator * y.denominator - y.numerator * x.denominator):
            exps[p] += e
    return ExactLog({Place.prime(p): e * scale for p, e in exps.items()})


# ---------------------------------------------------------------------------
# disks


@dataclass(frozen=True)
class Disk:
    """Closed disk D(center, e^{log_radius [v]}); log_radius None is a point."""

    place: Place
    center: object
    log_radius: Fraction | None
    closed: bool = True

    def contains_point(self, x) -> bool:
        if x == self.center:
            return True
        if self.log_radius is None:
            return False
        return log_abs(x - self.center, self.place) <= self.log_radius

    def contains_disk(self, other: "Disk") -> bool:
        if not self.contains_point(other.center):
            return False
        if other.log_radius is None:
            return True
        return self.log_radius is not None and other.log_radius <= self.log_radius

    def to_json(self) -> dict:
        return {
            "place": self.place.to_json(),
            "center": element_to_str(self.center),
            "log_radius": None if self.log_radius is None else str(self.log_radius),
            "closed": self.closed,
        }


def disk_image(f: PolyMap, D: Disk) -> Disk:
    """f(D(c, r)) = D(f(c), max_k |f_k(c)| r^k)."""
    if D.place.is_archimedean:
        raise FieldError("disk images are computed at finite places")
    if D.log_radius is None:
        return Disk(D.place, f(D.center), None)
    fc, s = disk_image_data(f.coeffs, coerce(D.center, f.mode), Fraction(D.log_radius), D.place)
    return Disk(D.place, fc, s)


def _image_chain(f: PolyMap, D: Disk, m: int) -> Disk:
    for _ in range(m):
        D = disk_image(f, D)
    return D


@dataclass
class FilledJuliaData:
    """The minimal disk E = D(sigma, e^{g - L}) containing the filled Julia set at v."""

    f: PolyMap
    place: Place
    g: Fraction  # splitting radius, units of [v]
    E: Disk

    @classmethod
    def of(cls, f: PolyMap, v: Place) -> "FilledJuliaData":
        if v.is_archimedean:
            raise FieldError("components are computed at finite places")
        if v.in_S(f.d):
            raise FieldError("centered-disk identity unavailable at places dividing primes <= d")
        g = splitting_radius(f, v).coefficient(v)
        Lu = -f.scale_valuation(v)
        return cls(f, v, g, Disk(v, f.center, g - Lu))

    def disk_in_level(self, D: Disk, m: int) -> bool:
        """D subset of E_m = f^{-m}(E)  iff  f^m(D) subset of E."""
        return self.E.contains_disk(_image_chain(self.f, D, m))

    def point_in_level(self, x, m: int) -> bool:
        return self.disk_in_level(Disk(self.place, coerce(x, self.f.mode), None), m)

    def disk_meets_level(self, D: Disk, m: int) -> bool:
        """D meets E_m  iff  f^m(D) meets E (two disks meet iff one contains the other)."""
        img = _image_chain(self.f, D, m)
        dist = log_abs(img.center - self.E.center, self.place)
        if dist is None:
            return True
        lim = self.E.log_radius if img.log_radius is None else max(img.log_radius, self.E.log_radius)
        return dist <= lim

    def require(self, x, m: int):
        if not self.point_in_level(x, m):
            raise NotInLevelSet(f"{element_to_str(x)} is not in level-{m} set")


def same_component(f: PolyMap, x, y, m: int, v: Place, data: FilledJuliaData | None = None) -> bool:
    data = data or FilledJuliaData.of(f, v)
    x, y = coerce(x, f.mode), coerce(y, f.mode)
    data.require(x, m)
    data.require(y, m)
    if x == y:
        return True
    return data.disk_in_level(Disk(v, x, log_abs(x - y, v)), m)


def component_radius(f: PolyMap, x, m: int, v: Place, data: FilledJuliaData | None = None) -> Fraction:
    """Largest rho with f^m(D(x, e^rho)) inside E: backward min over the orbit of x."""
    data = data or FilledJuliaData.of(f, v)
    x = coerce(x, f.mode)
    data.require(x, m)
    orbit = [x]
    for _ in range(m - 1):
        orbit.append(f(orbit[-1]))
    Y = data.E.log_radius
    for j in range(m - 1, -1, -1):
        ts = polys.taylor_shift(f.coeffs, orbit[j])
        best = None
        for k in range(1, len(ts)):
            if ts[k] == 0:
                continue
            cand = (Y - log_abs(ts[k], v)) / k
            if best is None or cand < best:
                best = cand
        Y = best
    return Y


def local_degree(f: PolyMap, x, m: int, v: Place, data: FilledJuliaData | None = None) -> int:
    """Degree of f^m on the level-m component through x.

    Counts roots w of f^m(x + w) - sigma with |w| within the component radius,
    sigma being the center of E.
    """
    data = data or FilledJuliaData.of(f, v)
    rho = component_radius(f, x, m, v, data)
    x = coerce(x, f.mode)
    F = polys.taylor_shift(f.coeffs, x)
    F = tuple(F)
    for _ in range(m - 1):
        F = polys.compose(f.coeffs, F)
    F = polys.sub(F, (data.E.center,))
    poly = newton_polygon([None if c == 0 else valuation(c, v) for c in F])
    return poly.count_roots_with_valuation_at_least(-rho)


def weierstrass_degree(f: PolyMap, x, m: int, v: Place, data: FilledJuliaData | None = None) -> int:
    """Degree by a second route: product over the orbit of the dominant Taylor index."""
    data = data or FilledJuliaData.of(f, v)
    rho = component_radius(f, x, m, v, data)
    x = coerce(x, f.mode)
    deg = 1
    s = rho
    for _ in range(m):
        ts = polys.taylor_shift(f.coeffs, x)
        vals = [(k, k * s + log_abs(ts[k], v)) for k in range(1, len(ts)) if ts[k] != 0]
        top = max(val for _, val in vals)
        deg *= max(k for k, val in vals if val == top)
        s = top
        x = ts[0]
    return deg


@dataclass
class Component:
    anchor: object
    log_radius: Fraction
    degree: int

    def disk(self, v: Place) -> Disk:
        return Disk(v, self.anchor, self.log_radius)

    def to_json(self) -> dict:
        return {"anchor": element_to_str(self.anchor), "log_radius": str(self.log_radius), "degree": self.degree}


def component_of(f: PolyMap, x, m: int, v: Place, data: FilledJuliaData | None = None) -> Component:
    data = data or FilledJuliaData.of(f, v)
    return Component(coerce(x, f.mode), component_radius(f, x, m, v, data), local_degree(f, x, m, v, data))


def enumerate_components(f: PolyMap, v: Place, m: int, max_nodes: int = 200_000) -> list:
    """Level-m components meeting Q_p, each anchored at a rational point (Q only).

    Residue-class descent from E: a disk inside E_m lies in one component; a
    disk missing E_m is dropped; otherwise it is split into its p subdisks.
    """
    if f.mode != MODE_Q:
        raise FieldError("component enumeration needs a finite residue field (Q mode)")
    data = FilledJuliaData.of(f, v)
    p = v.p
    r0 = data.E.log_radius
    start_r = r0.numerator // r0.denominator  # floor: rational points of E lie in D(c, p^floor)
    found: list = []
    stack = [(Fraction(data.E.center), start_r)]
    nodes = 0
    while stack:
        c, r = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise RuntimeError("component enumeration exceeded node budget")
        D = Disk(v, c, Fraction(r))
        if not data.disk_meets_level(D, m):
            continue
        if data.disk_in_level(D, m):
            if not any(comp.disk(v).contains_point(c) for comp in found):
                found.append(component_of(f, c, m, v, data))
            continue
        step = Fraction(p) ** (-r)  # D(c, p^r) = c + p^{-r} Z_p
        for i in range(p - 1, -1, -1):
            stack.append((c + i * step, r - 1))
    found.sort(key=lambda comp: comp.anchor)
    return found


# ---------------------------------------------------------------------------
# kernels and capacities


@dataclass
class DiskUnionKernel:
    """Disjoint disks B_1..B_s and M_ii = -log diam B_i, M_ij = -log delta(B_i, B_j)."""

    place: Place
    disks: list
    M: list = field(default_factory=list)

    def __post_init__(self):
        s = len(self.disks)
        if s == 0:
            raise FieldError("empty disk union")
        v = self.place
        M = [[Fraction(0)] * s for _ in range(s)]
        for i, Bi in enumerate(self.disks):
            if Bi.log_radius is None:
                raise FieldError("kernels need disks of positive radius")
            M[i][i] = -Fraction(Bi.log_radius)
            for j in range(i):
                Bj = self.disks[j]
                dist = log_abs(Bi.center - Bj.center, v) if Bi.center != Bj.center else None
                if dist is None or dist <= max(Bi.log_radius, Bj.log_radius):
                    raise FieldError(f"disks {j} and {i} overlap")
                M[i][j] = M[j][i] = -dist
        self.M = M

    @classmethod
    def from_components(cls, v: Place, comps: Sequence[Component]) -> "DiskUnionKernel":
        return cls(v, [c.disk(v) for c in comps])

    def to_json(self) -> dict:
        return {
            "place": self.place.to_json(),
            "disks": [D.to_json() for D in self.disks],
            "M": [[str(x) for x in row] for row in self.M],
        }


def capacity_union(kernel: DiskUnionKernel):
    """(log gamma as ExactLog, equilibrium weights, QP result)."""
    res = minimize_groups(kernel.M, [0] * len(kernel.disks), [Fraction(1)])
    return ExactLog.unit(kernel.place, -res.energy), res.weights, res


def weighted_energy(kernel: DiskUnionKernel, groups: Sequence[int], k: Sequence) -> tuple:
    """Minimal energy with prescribed masses k_g on each group of disks."""
    k = [Fraction(x) for x in k]
    if any(x < 0 for x in k) or sum(k) != 1:
        raise ValueError("k must be a probability vector")
    if len(groups) != len(kernel.disks):
        raise ValueError("one group label per disk")
    res = minimize_groups(kernel.M, list(groups), k)
    return ExactLog.unit(kernel.place, res.energy), res


def transfinite_bound(kernel: DiskUnionKernel, T: Sequence) -> tuple:
    """Upper bound for log d_v(T) when T lies in the union of the kernel's disks.

    Comparing each point with the Gauss point of its disk gives
    sum_{i != j} log|x_i - x_j| <= n^2 log gamma - sum_i log diam B(x_i).
    Returns (log d_v(T), bound) as ExactLogs.
    """
    v = kernel.place
    n = len(T)
    logcap, _, _ = capacity_union(kernel)
    radii = Fraction(0)
    for x in T:
        idx = next((i for i, D in enumerate(kernel.disks) if D.contains_point(x)), None)
        if idx is None:
            raise FieldError(f"{element_to_str(x)} is outside the disk union")
        radii += kernel.disks[idx].log_radius
    bound = (logcap * (n * n) - ExactLog.unit(v, radii)) * Fraction(1, n * (n - 1))
    return pairwise_diameter(T, v), bound


# ---------------------------------------------------------------------------
# m0-structures


class UnrealizableSpec(ValueError):
    pass


@dataclass
class StructureSpec:
    """Normalized level-m0 profile: r[i][j] log-distances / g, degrees, weights k."""

    d: int
    m0: int
    r: list
    degrees: list
    k: list

    def __post_init__(self):
        self.r = [[Fraction(x) for x in row] for row in self.r]
        self.k = [Fraction(x) for x in self.k]
        self.degrees = [int(x) for x in self.degrees]

    @property
    def s(self) -> int:
        return len(self.degrees)

    @property
    def u(self) -> list:
        return [Fraction(di, self.d**self.m0) for di in self.degrees]

    def violations(self) -> list:
        out = []
        s, r, top = self.s, self.r, self.d**self.m0
        if len(r) != s or any(len(row) != s for row in r):
            return ["r must be an s x s matrix"]
        if len(self.k) != s:
            out.append("k must have one entry per component")
        if sum(self.degrees) != top:
            out.append(f"degrees sum to {sum(self.degrees)}, expected d^m0 = {top}")
        if any(di < 1 for di in self.degrees):
            out.append("degrees must be positive")
        if any(x < 0 for x in self.k) or sum(self.k) != 1:
            out.append("k must be a probability vector")
        for i in range(s):
            for j in range(s):
                if r[i][j] != r[j][i]:
                    out.append(f"r not symmetric at ({i},{j})")
                if not (-top <= r[i][j] <= 1):
                    out.append(f"r[{i}][{j}] = {r[i][j]} outside [-d^m0, 1]")
                if i != j and not r[i][i] < r[i][j]:
                    out.append(f"disk {i} not disjoint from {j}: r[{i}][{i}] >= r[{i}][{j}]")
        for i, j, l in itertools.permutations(range(s), 3):
            if r[i][l] > max(r[i][j], r[j][l]):
                out.append(f"ultrametric inequality fails on ({i},{j},{l})")
        u = self.u
        for i in range(s):
            pot = sum(u[j] * r[i][j] for j in range(s))
            if pot != Fraction(1, top):
                out.append(f"capacity normalization fails at {i}: sum_j u_j r_ij = {pot}, expected 1/d^m0")
        return out

    def check(self):
        bad = self.violations()
        if bad:
            raise UnrealizableSpec("; ".join(bad))

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "m0": self.m0,
            "r": [[str(x) for x in row] for row in self.r],
            "degrees": self.degrees,
            "k": [str(x) for x in self.k],
        }


@dataclass
class StructureEnergy:
    m: int
    energy: Fraction  # I_m in units of g
    enclosure: tuple  # (lo, hi) for the limit, units of g
    increments: list

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "energy": str(self.energy),
            "enclosure": [str(self.enclosure[0]), str(self.enclosure[1])],
            "increments": [str(x) for x in self.increments],
        }


def _self_energies(spec: StructureSpec, m: int) -> list:
    """Energy of the level-m set inside each level-m0 component, from equal potentials.

    The equilibrium measure of the level-m set gives mass u_i to component i
    and has constant potential -1/d^m (units of g), which pins each
    component's self-energy c_i(m).
    """
    u = spec.u
    s = spec.s
    out = []
    for i in range(s):
        cross = sum(u[j] * (-spec.r[i][j]) for j in range(s) if j != i)
        out.append((Fraction(-1, spec.d**m) - cross) / u[i])
    return out


def structure_level_energy(spec: StructureSpec, m: int) -> Fraction:
    """I(mu_{k,m}) in units of g for m >= m0."""
    if m < spec.m0:
        raise ValueError("level must be at least m0")
    c = _self_energies(spec, m)
    s = spec.s
    k = spec.k
    total = sum(k[i] * k[i] * c[i] for i in range(s))
    total += sum(k[i] * k[j] * (-spec.r[i][j]) for i in range(s) for j in range(s) if i != j)
    return total


def structure_energy(spec: StructureSpec, m: int, rule: str = "dynamical") -> StructureEnergy:
    """I_m and the enclosure [I_m, I_m + d^m0/d^m] of the limit energy (units of g)."""
    if rule != "dynamical":
        raise ValueError(f"unknown refinement rule {rule!r}")
    spec.check()
    energies = [structure_level_energy(spec, j) for j in range(spec.m0, m + 1)]
    increments = [b - a for a, b in zip(energies, energies[1:])]
    for j, inc in zip(range(spec.m0, m), increments):
        bound = spec.d**spec.m0 * (Fraction(1, spec.d**j) - Fraction(1, spec.d ** (j + 1)))
        if not (0 <= inc <= bound):
            raise AssertionError(f"refinement increment {inc} outside [0, {bound}] at level {j}")
    I_m = energies[-1]
    tail = Fraction(spec.d**spec.m0, spec.d**m)
    return StructureEnergy(m, I_m, (I_m, I_m + tail), increments)


def mesh_kernel_matrix(spec: StructureSpec, m: int) -> tuple:
    """Explicit self-similar mesh for a multiplicity-free spec (all degrees 1).

    Level m = q*m0 disks are words i_1..i_q; copy i is E scaled by e^{(r_ii - 1) g}.
    Returns (M in units of g, top-level group of each disk).
    """
    if any(di != 1 for di in spec.degrees):
        raise ValueError("the self-similar mesh needs all degrees equal to 1")
    if m % spec.m0:
        raise ValueError("mesh levels are multiples of m0")
    q = m // spec.m0
    words = list(itertools.product(range(spec.s), repeat=q))
    r = spec.r
    n = len(words)
    M = [[Fraction(0)] * n for _ in range(n)]
    for a, wa in enumerate(words):
        for b, wb in enumerate(words):
            shift = Fraction(0)
            t = 0
            while t < q and wa[t] == wb[t]:
                shift += r[wa[t]][wa[t]] - 1
                t += 1
            if t == q:
                M[a][b] = -(shift + 1)  # own radius: scaled E, whose log-radius is 1
            else:
                M[a][b] = -(shift + r[wa[t]][wb[t]])
    groups = [w[0] for w in words]
    return M, groups


def random_structure_spec(rng, d: int = 2, m0: int = 1, s: int | None = None, tries: int = 1000) -> StructureSpec:
    """A random realizable spec: random ultrametric tree, radii from the capacity identity."""
    top = d**m0
    for _ in range(tries):
        n = s or rng.randint(2, top)
        degrees = [1] * n
        for _ in range(top - n):
            degrees[rng.randrange(n)] += 1
        clusters = [[i] for i in range(n)]
        r = [[Fraction(0)] * n for _ in range(n)]
        height = Fraction(1)
        while len(clusters) > 1:
            a, b = rng.sample(range(len(clusters)), 2)
            A, B = clusters[a], clusters[b]
            for i in A:
                for j in B:
                    r[i][j] = r[j][i] = height
            clusters = [c for t, c in enumerate(clusters) if t not in (a, b)] + [A + B]
            height = height - Fraction(rng.randint(1, 4), 8 * top)
        # the last merge happened at the lowest height: reverse so the root has height 1
        vals = sorted({r[i][j] for i in range(n) for j in range(n) if i != j})
        remap = dict(zip(vals, reversed(vals)))
        for i in range(n):
            for j in range(n):
                if i != j:
                    r[i][j] = remap[r[i][j]]
        u = [Fraction(di, top) for di in degrees]
        for i in range(n):
            cross = sum(u[j] * r[i][j] for j in range(n) if j != i)
            r[i][i] = (Fraction(1, top) - cross) / u[i]
        k = [Fraction(rng.randint(0, 5)) for _ in range(n)]
        if sum(k) == 0:
            k[0] = Fraction(1)
        total = sum(k)
        k = [x / total for x in k]
        spec = StructureSpec(d, m0, r, degrees, k)
        if not spec.violations():
            return spec
    raise RuntimeError("could not sample a realizable structure")
