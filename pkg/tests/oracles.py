"""Independent reference computations used by the tests.

Everything here is plain Python over ``fractions.Fraction``: no flint, no
code from the package under test.
"""

from __future__ import annotations

import random
from fractions import Fraction


def det(M: list[list]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination.

    Rational entries are first scaled to integers, so every division is exact.
    """
    n = len(M)
    if n == 0:
        return Fraction(1)
    M = [[Fraction(v) for v in row] for row in M]
    dens = [_row_den(row) for row in M]
    A = [[int(v * d) for v in row] for row, d in zip(M, dens)]
    scale = 1
    for d in dens:
        scale *= d
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                assert num % prev == 0
                A[i][j] = num // prev
        prev = A[k][k]
    return Fraction(sign * A[n - 1][n - 1]) / scale


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _row_den(row: list[Fraction]) -> int:
    den = 1
    for v in row:
        den = den * v.denominator // _gcd(den, v.denominator)
    return den


def psc(a: list, b: list, j: int) -> Fraction:
    """Principal subresultant coefficient of index ``j`` (formal degrees)."""
    m, n = len(a) - 1, len(b) - 1
    width = m + n - j
    rows = []
    for k in range(n - j):
        rows.append([0] * k + list(a) + [0] * (width - k - len(a)))
    for k in range(m - j):
        rows.append([0] * k + list(b) + [0] * (width - k - len(b)))
    size = m + n - 2 * j
    return det([r[:size] for r in rows])


def resultant(a: list, b: list) -> Fraction:
    return psc(a, b, 0)


def peval(coeffs: list, x) -> Fraction:
    """Horner evaluation; ``coeffs`` highest degree first."""
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def trim(a: list) -> list:
    i = 0
    while i < len(a) and a[i] == 0:
        i += 1
    return a[i:]


def prem_div(a: list, b: list) -> list:
    """Remainder of ``a`` by ``b`` over Q (highest degree first)."""
    a = [Fraction(c) for c in trim(a)]
    b = [Fraction(c) for c in trim(b)]
    while len(a) >= len(b) and a:
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = trim(a[1:]) if a[0] == 0 else trim(a)
    return a


def derivative(a: list) -> list:
    n = len(a) - 1
    return [c * (n - i) for i, c in enumerate(a[:-1])]


def sturm_sequence(a: list) -> list[list]:
    seq = [trim(a), trim(derivative(trim(a)))]
    while seq[-1]:
        r = prem_div(seq[-2], seq[-1])
        seq.append([-c for c in r] if r else [])
    return [s for s in seq if s]


def _variations(vals) -> int:
    vals = [v for v in vals if v != 0]
    return sum(1 for u, v in zip(vals, vals[1:]) if (u < 0) != (v < 0))


def sturm_count(a: list, lo, hi) -> int:
    """Number of distinct real roots of ``a`` in ``(lo, hi]``."""
    seq = sturm_sequence(a)
    return _variations([peval(s, Fraction(lo)) for s in seq]) - _variations([peval(s, Fraction(hi)) for s in seq])


def cauchy_bound(a: list) -> Fraction:
    a = trim(a)
    return 1 + max(abs(Fraction(c) / a[0]) for c in a[1:]) if len(a) > 1 else Fraction(1)


def real_root_count(a: list) -> int:
    B = cauchy_bound(a)
    return sturm_count(a, -B, B)


def random_rational(rng: random.Random, lo=-2, hi=2, den: int = 64) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_points(seed: int, n: int, count: int, lo=-2, hi=2, den: int = 64) -> list[tuple[Fraction, ...]]:
    rng = random.Random(seed)
    return [tuple(random_rational(rng, lo, hi, den) for _ in range(n)) for _ in range(count)]
