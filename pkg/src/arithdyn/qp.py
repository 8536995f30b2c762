"""Exact convex quadratic minimization over products of simplices.

minimize w^T M w  subject to  sum_{i in group g} w_i = k_g,  w >= 0

with rational M and k.  A primal active-set method in Fraction arithmetic;
every KKT system is solved exactly and must be nonsingular.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class SingularSystemError(ArithmeticError):
    pass


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination with exact pivoting; raises on singular systems."""
    n = len(A)
    M = [list(row) + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularSystemError("singular KKT system")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col] / pv
                row_r, row_c = M[r], M[col]
                for c in range(col, n + 1):
                    row_r[c] -= factor * row_c[c]
    return [M[i][n] / M[i][i] for i in range(n)]


@dataclass
class QPResult:
    weights: list
    energy: Fraction
    multipliers: dict  # group -> Lagrange multiplier of the group constraint (energy units)
    iterations: int


def minimize_groups(M: Sequence[Sequence], groups: Sequence[int], k: Sequence, max_iter: int = 10_000) -> QPResult:
    """Exact minimizer of w^T M w with prescribed group masses.

    `groups[i]` is the group index of coordinate i; `k[g]` its mass.
    M must be positive definite on {p : group sums of p vanish}.
    """
    n = len(M)
    M = [[Fraction(x) for x in row] for row in M]
    k = [Fraction(x) for x in k]
    if any(x < 0 for x in k):
        raise ValueError("group masses must be nonnegative")
    members: dict = {}
    for i, g in enumerate(groups):
        members.setdefault(g, []).append(i)
    if set(members) != set(range(len(k))):
        raise ValueError("every group needs at least one coordinate")
    w = [Fraction(0)] * n
    fixed = set()
    for g, idx in members.items():
        if k[g] == 0:
            fixed.update(idx)
        else:
            for i in idx:
                w[i] = k[g] / len(idx)
    active = set(fixed)
    live_groups = [g for g in sorted(members) if k[g] != 0]
    for it in range(max_iter):
        free = [i for i in range(n) if i not in active]
        gs = [g for g in live_groups if any(i in free for i in members[g])]
        gindex = {g: j for j, g in enumerate(gs)}
        Mw = [sum(M[i][j] * w[j] for j in range(n)) for i in range(n)]
        size = len(free) + len(gs)
        A = [[Fraction(0)] * size for _ in range(size)]
        rhs = [Fraction(0)] * size
        for a, i in enumerate(free):
            for b, j in enumerate(free):
                A[a][b] = 2 * M[i][j]
            col = len(free) + gindex[groups[i]]
            A[a][col] = Fraction(1)
            A[col][a] = Fraction(1)
            rhs[a] = -2 * Mw[i]
        sol = solve_exact(A, rhs)
        p = dict(zip(free, sol[: len(free)]))
        nu = {g: -sol[len(free) + gindex[g]] for g in gs}
        if all(x == 0 for x in p.values()):
            worst, worst_val = None, Fraction(0)
            for i in active - fixed:
                g = groups[i]
                mu = 2 * Mw[i] - nu.get(g, 2 * Mw[i])
                if mu < worst_val:
                    worst, worst_val = i, mu
            if worst is None:
                energy = sum(w[i] * Mw[i] for i in range(n))
                return QPResult(w, energy, {g: nu[g] / 2 for g in gs}, it)
            active.discard(worst)
            continue
        alpha, block = Fraction(1), None
        for i, pi in p.items():
            if pi < 0:
                ratio = -w[i] / pi
                if ratio < alpha:
                    alpha, block = ratio, i
        for i, pi in p.items():
            w[i] += alpha * pi
        if block is not None:
            w[block] = Fraction(0)
            active.add(block)
    raise RuntimeError("active-set iteration limit reached")


def minimize_simplex(M: Sequence[Sequence]) -> QPResult:
    return minimize_groups(M, [0] * len(M), [Fraction(1)])
