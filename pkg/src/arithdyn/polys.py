"""Dense univariate polynomials over an exact field.

A polynomial a_0 + a_1 X + ... + a_n X^n is a tuple (a_0, ..., a_n) with
a_n != 0; the zero polynomial is the empty tuple.  Coefficients may be any
exact field elements supporting + - * / and comparison with 0 (Fraction,
RatFunc).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = tuple


def trim(a: Sequence) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def degree(a: Poly) -> int:
    return len(a) - 1


def add(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    return trim([x + y for x, y in zip(a, b)] + list(a[len(b):]))


def neg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, neg(b))


def scale(a: Poly, c) -> Poly:
    if c == 0:
        return ()
    return tuple(x * c for x in a)


def mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return trim(out)


def power(a: Poly, n: int) -> Poly:
    result: Poly = (a[0] ** 0,) if a else (Fraction(1),)
    base = a
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return (), trim(r)
    lead = b[-1]
    q = [b[-1] * 0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] / lead
        q[k] = c
        if c != 0:
            for j in range(db + 1):
                r[k + j] = r[k + j] - c * b[j]
    return trim(q), trim(r[:db])


def rem(a: Poly, b: Poly) -> Poly:
    return divmod_poly(a, b)[1]


def quo(a: Poly, b: Poly) -> Poly:
    return divmod_poly(a, b)[0]


def monic(a: Poly) -> Poly:
    if not a:
        return a
    lead = a[-1]
    return tuple(x / lead for x in a)


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (the zero polynomial when both inputs vanish)."""
    a, b = trim(a), trim(b)
    while b:
        a, b = b, rem(a, b)
    return monic(a)


def xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with s*a + t*b = g monic."""
    one = (Fraction(1),)
    r0, r1 = trim(a), trim(b)
    s0, s1 = one, ()
    t0, t1 = (), one
    while r1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    if not r0:
        return (), (), ()
    lead = r0[-1]
    return monic(r0), scale(s0, 1 / lead), scale(t0, 1 / lead)


def evaluate(a: Poly, x):
    acc = x * 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def derivative(a: Poly) -> Poly:
    return trim([a[i] * i for i in range(1, len(a))])


def compose(a: Poly, b: Poly) -> Poly:
    """a(b(X))."""
    acc: Poly = ()
    for c in reversed(a):
        acc = add(mul(acc, b), (c,) if c != 0 else ())
    return acc


def taylor_shift(a: Poly, c) -> list:
    """Coefficients of a(c + X), by repeated synthetic division."""
    coeffs = list(a)
    n = len(coeffs)
    for k in range(n):
        for j in range(n - 2, k - 1, -1):
            coeffs[j] = coeffs[j] + c * coeffs[j + 1]
    return coeffs


def squarefree_part(a: Poly) -> Poly:
    g = gcd(a, derivative(a))
    return monic(quo(a, g)) if g else monic(a)


def mod_compose(f: Poly, g: Poly, modulus: Poly) -> Poly:
    """f(g) reduced modulo `modulus`, Horner style."""
    acc: Poly = ()
    for c in reversed(f):
        acc = rem(add(mul(acc, g), (c,) if c != 0 else ()), modulus)
    return acc


def charpoly(matrix: list[list]) -> Poly:
    """Characteristic polynomial det(X*I - A) by Faddeev-LeVerrier (char 0)."""
    n = len(matrix)
    if n == 0:
        return (Fraction(1),)
    zero = matrix[0][0] * 0
    one = zero + 1
    coeffs = [zero] * (n + 1)
    coeffs[n] = one
    prev = [[zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        cur = _matmul(matrix, prev)
        c_prev = coeffs[n - k + 1]
        for i in range(n):
            cur[i][i] = cur[i][i] + c_prev
        am = _matmul(matrix, cur)
        trace = zero
        for i in range(n):
            trace = trace + am[i][i]
        coeffs[n - k] = -trace / k
        prev = cur
    return trim(coeffs)


def _matmul(a, b):
    n = len(a)
    m = len(b[0])
    zero = a[0][0] * 0
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        row = a[i]
        for k in range(len(b)):
            x = row[k]
            if x == 0:
                continue
            bk = b[k]
            for j in range(m):
                out[i][j] = out[i][j] + x * bk[j]
    return out
