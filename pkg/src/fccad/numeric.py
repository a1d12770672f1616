"""Exact rationals, univariate integer polynomials and real algebraic numbers.

Rationals are :class:`flint.fmpq` values throughout the package.  A real
algebraic number is a squarefree primitive integer polynomial together with an
open isolating interval whose endpoints are dyadic rationals.
"""

from __future__ import annotations

import functools
from fractions import Fraction

import flint

fmpq = flint.fmpq
fmpz_poly = flint.fmpz_poly
fmpq_poly = flint.fmpq_poly

ZERO = fmpq(0)
ONE = fmpq(1)
HALF = fmpq(1, 2)


def to_rational(value) -> fmpq:
    """Convert an int, Fraction, fmpq or text such as ``"-3/4"`` or ``"0.25"``."""
    if isinstance(value, fmpq):
        return value
    if isinstance(value, (int, flint.fmpz)):
        return fmpq(int(value))
    if isinstance(value, Fraction):
        return fmpq(value.numerator, value.denominator)
    if isinstance(value, str):
        f = Fraction(value.strip())
        return fmpq(f.numerator, f.denominator)
    raise TypeError(f"cannot convert {value!r} to a rational")


def to_fraction(q: fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def rational_str(q: fmpq) -> str:
    """Fractional text rendering, ``"-3/4"`` or ``"5"``."""
    q = to_rational(q)
    if q.q == 1:
        return str(int(q.p))
    return f"{int(q.p)}/{int(q.q)}"


def rational_decimal(q: fmpq, digits: int = 12) -> str:
    """Decimal rendering truncated toward zero to ``digits`` places."""
    q = to_rational(q)
    sign = "-" if q < 0 else ""
    p, d = abs(int(q.p)), int(q.q)
    whole, rest = divmod(p, d)
    frac = (rest * 10**digits) // d
    text = f"{whole}.{frac:0{digits}d}".rstrip("0").rstrip(".")
    return sign + text


def sign(value) -> int:
    return (value > 0) - (value < 0)


def floor_q(q: fmpq) -> int:
    return int(q.p) // int(q.q)


def dyadic_below(q: fmpq, bits: int) -> fmpq:
    """Largest multiple of 2**-bits strictly below ``q``."""
    scale = 1 << bits
    n = floor_q(q * scale)
    if fmpq(n, scale) == q:
        n -= 1
    return fmpq(n, scale)


def dyadic_above(q: fmpq, bits: int) -> fmpq:
    scale = 1 << bits
    n = floor_q(q * scale) + 1
    return fmpq(n, scale)


def simple_between(lo: fmpq, hi: fmpq) -> fmpq:
    """A dyadic rational with few bits strictly inside ``(lo, hi)``."""
    if lo >= hi:
        raise ValueError("empty interval")
    n = floor_q(lo) + 1
    if n < hi:
        # prefer the integer closest to zero
        m = floor_q(hi)
        if fmpq(m) == hi:
            m -= 1
        if n <= 0 <= m:
            return ZERO
        return fmpq(n) if n > 0 else fmpq(m)
    bits = 1
    while True:
        scale = 1 << bits
        n = floor_q(lo * scale) + 1
        cand = fmpq(n, scale)
        if cand < hi:
            return cand
        bits += 1


# ---------------------------------------------------------------------------
# univariate polynomials


def as_integer_poly(f) -> fmpz_poly:
    """Primitive integer polynomial with the same roots as ``f``."""
    if isinstance(f, fmpz_poly):
        g = f
    else:
        if not isinstance(f, fmpq_poly):
            f = fmpq_poly([to_rational(c) for c in f])
        g = fmpz_poly([int(c) for c in (f * f.denom()).coeffs()]) if not f.is_zero() else fmpz_poly([])
    return normalize(g)


def normalize(g: fmpz_poly) -> fmpz_poly:
    if g.is_zero():
        return g
    c = g.content()
    if c != 1:
        g = fmpz_poly([int(a) // int(c) for a in g.coeffs()])
    if g.leading_coefficient() < 0:
        g = -g
    return g


def squarefree(g: fmpz_poly) -> fmpz_poly:
    """Primitive squarefree part with positive leading coefficient."""
    g = normalize(g)
    if g.degree() <= 0:
        return fmpz_poly([1]) if not g.is_zero() else g
    d = g.gcd(g.derivative())
    if d.degree() > 0:
        g = normalize(g // d)  # exact
    return g


def irreducible_factors(g: fmpz_poly) -> list[fmpz_poly]:
    """Distinct irreducible factors of positive degree, normalized."""
    if g.degree() <= 0:
        return []
    _, facs = g.factor()
    return [normalize(f) for f, _ in facs]


def int_coeffs(f) -> list[int]:
    return [int(c) for c in f.coeffs()]


def _variations(coeffs) -> int:
    count = 0
    last = 0
    for c in coeffs:
        if c:
            s = 1 if c > 0 else -1
            if last and s != last:
                count += 1
            last = s
    return count


_T_PLUS_1 = fmpz_poly([1, 1])


def _shift1(c: list[int]) -> list[int]:
    """Coefficients (low to high) of c(t + 1), padded to the input length."""
    out = [int(x) for x in fmpz_poly(c)(_T_PLUS_1).coeffs()]
    return out + [0] * (len(c) - len(out))


def _descartes_unit(c: list[int]) -> int:
    """Descartes bound for roots in (0, 1)."""
    return _variations(_shift1(c[::-1]))


def _isolate_unit(c: list[int]) -> list[tuple]:
    """Isolate roots in (0, 1) of a squarefree integer polynomial.

    Returns items ``("point", a, k)`` for an exact root ``a / 2**k`` and
    ``("open", a, k)`` for an isolating interval ``(a/2**k, (a+1)/2**k)``.
    """
    out = []
    stack = [(c, 0, 0)]
    while stack:
        q, a, k = stack.pop()
        v = _descartes_unit(q)
        if v == 0:
            continue
        if v == 1:
            out.append(("open", a, k))
            continue
        d = len(q) - 1
        left = [q[i] << (d - i) for i in range(d + 1)]
        right = _shift1(left)
        if right[0] == 0:
            out.append(("point", 2 * a + 1, k + 1))
            right = right[1:]
            left = left  # midpoint is t=1 for left half, excluded from its open interval
        stack.append((right, 2 * a + 1, k + 1))
        stack.append((left, 2 * a, k + 1))
    return out


def _compose_affine(f: fmpz_poly, lo: fmpq, width: fmpq) -> list[int]:
    """Integer coefficients of f(lo + width*t) up to a positive factor."""
    g = fmpq_poly(int_coeffs(f))(fmpq_poly([lo, width]))
    g = g * g.denom()
    return [int(x) for x in g.coeffs()]


def _isolate_in(f: fmpz_poly, lo: fmpq, hi: fmpq) -> list[tuple[fmpq, fmpq | None]]:
    """Isolate roots of squarefree ``f`` in the open interval (lo, hi).

    Each result is ``(r, None)`` for an exact rational root ``r`` or
    ``(a, b)`` for an open isolating interval.
    """
    width = hi - lo
    c = _compose_affine(f, lo, width)
    res = []
    for kind, a, k in _isolate_unit(c):
        scale = fmpq(1, 1 << k)
        if kind == "point":
            res.append((lo + width * a * scale, None))
        else:
            res.append((lo + width * a * scale, lo + width * (a + 1) * scale))
    res.sort(key=lambda t: t[0])
    return res


def root_bound(f: fmpz_poly) -> fmpq:
    """Power of two strictly exceeding the modulus of every root (Cauchy)."""
    c = int_coeffs(f)
    lead = abs(c[-1])
    m = max((abs(x) for x in c[:-1]), default=0)
    bound = 1 + (m + lead - 1) // lead
    return fmpq(1 << bound.bit_length())


def count_roots(f, lo, hi) -> int:
    """Number of distinct real roots of ``f`` in the open interval (lo, hi)."""
    g = squarefree(as_integer_poly(f))
    if g.degree() <= 0:
        return 0
    lo, hi = to_rational(lo), to_rational(hi)
    return len(_isolate_in(g, lo, hi))


def eval_interval(coeffs, lo: fmpq, hi: fmpq) -> tuple[fmpq, fmpq]:
    """Interval Horner enclosure of a polynomial (coefficients low to high)."""
    n = len(coeffs)
    if n == 0:
        return ZERO, ZERO
    a = b = fmpq(coeffs[-1])
    for i in range(n - 2, -1, -1):
        p1, p2, p3, p4 = a * lo, a * hi, b * lo, b * hi
        c = coeffs[i]
        a = min(p1, p2, p3, p4) + c
        b = max(p1, p2, p3, p4) + c
    return a, b


# ---------------------------------------------------------------------------
# real algebraic numbers


class RealAlgebraic:
    """A real root of a squarefree primitive integer polynomial.

    The value never changes; ``refine`` returns an equal number with a tighter
    interval.  Internally the interval may be tightened in place as a cache.
    """

    __slots__ = ("poly", "_lo", "_hi", "_exact", "_slo")

    def __init__(self, poly, lo, hi, *, exact: fmpq | None = None, check: bool = True):
        poly = squarefree(as_integer_poly(poly))
        lo, hi = to_rational(lo), to_rational(hi)
        self.poly = poly
        self._lo, self._hi = lo, hi
        self._exact = exact
        if poly.degree() == 1 and exact is None:
            a, b = int_coeffs(poly)
            self._exact = fmpq(-a, b)
        if check:
            if not lo < hi:
                raise ValueError("isolating interval must be nonempty")
            if poly.degree() < 1:
                raise ValueError("defining polynomial must be nonconstant")
            if poly(lo) == 0 or poly(hi) == 0:
                raise ValueError("interval endpoint is a root")
            if len(_isolate_in(poly, lo, hi)) != 1:
                raise ValueError("interval does not isolate exactly one root")
        self._slo = sign(poly(lo))

    @classmethod
    def from_rational(cls, value) -> RealAlgebraic:
        r = to_rational(value)
        n = floor_q(r)
        poly = fmpz_poly([-int(r.p), int(r.q)])
        return cls(poly, fmpq(n - 1), fmpq(n + 1), exact=r, check=False)

    # -- access ---------------------------------------------------------
    @property
    def interval(self) -> tuple[fmpq, fmpq]:
        return self._lo, self._hi

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def is_rational(self) -> bool:
        return self._exact is not None

    def rational(self) -> fmpq:
        if self._exact is None:
            raise ValueError("not a rational number")
        return self._exact

    def __float__(self) -> float:
        if self._exact is not None:
            return float(int(self._exact.p)) / float(int(self._exact.q))
        self._tighten(fmpq(1, 1 << 60))
        m = (self._lo + self._hi) / 2
        return float(int(m.p)) / float(int(m.q))

    # -- refinement -----------------------------------------------------
    def _bisect(self) -> None:
        lo, hi = self._lo, self._hi
        if self._exact is not None:
            r = self._exact
            w = (hi - lo) / 8
            bits = 1
            while fmpq(1, 1 << bits) > w:
                bits += 1
            self._lo, self._hi = dyadic_below(r, bits), dyadic_above(r, bits)
            if self._lo < lo:
                self._lo = lo
            if self._hi > hi:
                self._hi = hi
            return
        mid = (lo + hi) / 2
        s = sign(self.poly(mid))
        if s == 0:  # only possible for reducible input; nudge off the point
            raise AssertionError("squarefree irreducible polynomial vanished at a dyadic point")
        if s == self._slo:
            self._lo = mid
        else:
            self._hi = mid

    def _tighten(self, width: fmpq) -> None:
        while self._hi - self._lo > width:
            self._bisect()

    def refine(self, bits: int = 1) -> RealAlgebraic:
        """Equal number whose interval is at most ``2**-bits`` of the original."""
        out = RealAlgebraic(self.poly, self._lo, self._hi, exact=self._exact, check=False)
        target = (self._hi - self._lo) / (1 << bits)
        out._tighten(target)
        return out

    # -- comparison -----------------------------------------------------
    def compare_rational(self, q: fmpq) -> int:
        q = to_rational(q)
        if self._exact is not None:
            return sign(self._exact - q)
        if q <= self._lo:
            return 1
        if q >= self._hi:
            return -1
        s = sign(self.poly(q))
        if s == 0:
            raise AssertionError("irrational root equal to a rational")
        # q inside the interval: root lies left of q iff sign changes in (lo, q)
        return -1 if s != self._slo else 1

    def __repr__(self) -> str:
        return render_real(self)

    def __eq__(self, other) -> bool:
        if isinstance(other, RealAlgebraic):
            return ran_compare(self, other) == 0
        return NotImplemented

    def __lt__(self, other) -> bool:
        return ran_compare(self, other) < 0

    def __hash__(self) -> int:
        if self._exact is not None:
            return hash(("q", int(self._exact.p), int(self._exact.q)))
        return hash(("ra", tuple(int_coeffs(self.poly))))


def render_poly1(f: fmpz_poly, var: str = "x") -> str:
    terms = []
    for i, c in reversed(list(enumerate(int_coeffs(f)))):
        if c == 0:
            continue
        mag = abs(c)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        if not terms:
            terms.append(("-" if c < 0 else "") + body)
        else:
            terms.append(("- " if c < 0 else "+ ") + body)
    return " ".join(terms) if terms else "0"


def render_real(a: RealAlgebraic, var: str = "x") -> str:
    """``"root of <poly> in (<lo>,<hi>)"``, or the rational itself."""
    if a.is_rational():
        return rational_str(a.rational())
    lo, hi = a.interval
    return f"root of {render_poly1(a.poly, var)} in ({rational_str(lo)},{rational_str(hi)})"


def _common_root(a: RealAlgebraic, b: RealAlgebraic) -> bool:
    g = a.poly.gcd(b.poly)
    if g.degree() < 1:
        return False
    lo = max(a._lo, b._lo)
    hi = min(a._hi, b._hi)
    if lo >= hi:
        return False
    return len(_isolate_in(normalize(g), lo, hi)) > 0


def ran_compare(a: RealAlgebraic, b: RealAlgebraic) -> int:
    """Exact order of two real algebraic numbers: -1, 0 or 1."""
    if a._exact is not None and b._exact is not None:
        return sign(a._exact - b._exact)
    if a._exact is not None:
        return -b.compare_rational(a._exact)
    if b._exact is not None:
        return a.compare_rational(b._exact)
    if a._hi <= b._lo:
        return -1
    if b._hi <= a._lo:
        return 1
    if _common_root(a, b):
        return 0
    while True:
        if a._hi <= b._lo:
            return -1
        if b._hi <= a._lo:
            return 1
        if a._hi - a._lo >= b._hi - b._lo:
            a._bisect()
        else:
            b._bisect()


def isolate_roots(p) -> list[RealAlgebraic]:
    """All distinct real roots of a univariate polynomial, in increasing order.

    ``p`` may be an integer or rational flint polynomial, a coefficient list
    (low to high) or a univariate :class:`fccad.poly.MultiPoly`.
    """
    if hasattr(p, "univariate_coeffs"):
        p = p.univariate_coeffs()
    g = as_integer_poly(p)
    if g.is_zero():
        raise ValueError("zero polynomial has no isolated roots")
    roots: list[RealAlgebraic] = []
    for f in irreducible_factors(g):
        roots.extend(roots_of_irreducible(f))
    roots.sort(key=functools.cmp_to_key(ran_compare))
    for a, b in zip(roots, roots[1:]):
        # roots of different factors: make the intervals disjoint as well
        while b.interval[0] < a.interval[1]:
            a._bisect()
            b._bisect()
    return roots


def roots_of_irreducible(f: fmpz_poly) -> list[RealAlgebraic]:
    if f.degree() == 1:
        a, b = int_coeffs(f)
        return [RealAlgebraic.from_rational(fmpq(-a, b))]
    bound = root_bound(f)
    out = []
    for lo, hi in _isolate_in(f, -bound, bound):
        if hi is None:  # pragma: no cover - irreducible of degree >= 2
            out.append(RealAlgebraic.from_rational(lo))
        else:
            out.append(RealAlgebraic(f, lo, hi, check=False))
    return out


def _upper_edge(a: RealAlgebraic) -> fmpq:
    return a._exact if a._exact is not None else a._hi


def _lower_edge(a: RealAlgebraic) -> fmpq:
    return a._exact if a._exact is not None else a._lo


def rational_between(a: RealAlgebraic, b: RealAlgebraic) -> fmpq:
    """A short rational strictly between ``a < b``."""
    while True:
        hi, lo = _upper_edge(a), _lower_edge(b)
        if hi < lo:
            return simple_between(hi, lo)
        a._bisect()
        b._bisect()


def rational_below(a: RealAlgebraic) -> fmpq:
    """An integer strictly below ``a``, close to it."""
    a._tighten(ONE)
    if a._exact is not None:
        return fmpq(-floor_q(-a._exact) - 1)
    return fmpq(floor_q(a._lo))


def rational_above(a: RealAlgebraic) -> fmpq:
    a._tighten(ONE)
    if a._exact is not None:
        return fmpq(floor_q(a._exact) + 1)
    return fmpq(-floor_q(-a._hi))
