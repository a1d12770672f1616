"""Exact arithmetic at real algebraic points.

A sample point stores every coordinate in one simple extension ``Q(theta)``
(a primitive element), so evaluating a polynomial at the point is exact
reduction modulo the minimal polynomial of ``theta`` followed by a sign
decision through interval refinement.  Each coordinate also keeps its own
univariate :class:`RealAlgebraic` value for comparisons and printing.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import flint

from .numeric import (
    ONE,
    RealAlgebraic,
    ZERO,
    as_integer_poly,
    fmpq,
    fmpq_poly,
    fmpz_poly,
    int_coeffs,
    irreducible_factors,
    isolate_roots,
    ran_compare,
    roots_of_irreducible,
    sign,
    to_rational,
)
from .poly import MultiPoly

_X = fmpq_poly([0, 1])
_CTX1 = flint.fmpq_mpoly_ctx.get(("_th",), "lex")
_CTX2 = flint.fmpq_mpoly_ctx.get(("_th", "_t"), "lex")


def _to_mpoly1(e: fmpq_poly) -> flint.fmpq_mpoly:
    return _CTX1.from_dict({(i,): c for i, c in enumerate(e.coeffs()) if c != 0})


def _from_mpoly1(m: flint.fmpq_mpoly) -> fmpq_poly:
    d = m.to_dict()
    if not d:
        return fmpq_poly([])
    n = max(e[0] for e in d) + 1
    cs = [ZERO] * n
    for e, c in d.items():
        cs[e[0]] = c
    return fmpq_poly(cs)


def _interval_eval(e: fmpq_poly, lo: fmpq, hi: fmpq) -> tuple[fmpq, fmpq]:
    cs = e.coeffs()
    if not cs:
        return ZERO, ZERO
    # centred Horner form keeps the enclosure tight for narrow intervals
    m = (lo + hi) / 2
    r = (hi - lo) / 2
    shifted = e(fmpq_poly([m, 1])).coeffs()
    a = b = shifted[-1]
    for c in reversed(shifted[:-1]):
        p1, p2 = a * -r, b * r
        p3, p4 = a * r, b * -r
        a = min(p1, p2, p3, p4) + c
        b = max(p1, p2, p3, p4) + c
    return a, b


class NumberField:
    """``Q(theta)`` for a real algebraic ``theta``; elements are ``fmpq_poly``."""

    __slots__ = ("theta", "mu", "degree")

    def __init__(self, theta: RealAlgebraic):
        self.theta = theta
        mu = fmpq_poly(int_coeffs(theta.poly))
        self.mu = mu / mu.leading_coefficient()
        self.degree = mu.degree()

    @classmethod
    def rationals(cls) -> NumberField:
        return _RATIONALS

    def is_rational(self) -> bool:
        return self.degree == 1

    def reduce(self, e: fmpq_poly) -> fmpq_poly:
        if e.degree() >= self.degree:
            return e % self.mu
        return e

    def const(self, q) -> fmpq_poly:
        return fmpq_poly([to_rational(q)])

    def inv(self, e: fmpq_poly) -> fmpq_poly:
        if e.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        if e.degree() == 0:
            return fmpq_poly([ONE / e.coeffs()[0]])
        g, s, _ = e.xgcd(self.mu)
        return self.reduce(s / g.coeffs()[0])

    def enclosure(self, e: fmpq_poly) -> tuple[fmpq, fmpq]:
        if e.degree() <= 0:
            c = e.coeffs()[0] if e.degree() == 0 else ZERO
            return c, c
        if self.degree == 1:
            v = e(self.theta.rational())
            return v, v
        lo, hi = self.theta.interval
        return _interval_eval(e, lo, hi)

    def sign(self, e: fmpq_poly) -> int:
        """Exact sign of the element ``e(theta)``."""
        e = self.reduce(e)
        if e.is_zero():
            return 0
        if e.degree() == 0:
            return sign(e.coeffs()[0])
        if self.degree == 1:
            return sign(e(self.theta.rational()))
        th = self.theta
        while True:
            lo, hi = th.interval
            a, b = _interval_eval(e, lo, hi)
            if a > 0:
                return 1
            if b < 0:
                return -1
            th._tighten((hi - lo) / 4)

    def to_real(self, e: fmpq_poly) -> RealAlgebraic:
        """The element as a univariate real algebraic number."""
        e = self.reduce(e)
        if e.degree() <= 0:
            return RealAlgebraic.from_rational(e.coeffs()[0] if e.degree() == 0 else ZERO)
        if e.degree() == 1 and e.coeffs()[1] == 1 and e.coeffs()[0] == 0:
            return self.theta
        # norm of w - e(theta): its roots are the conjugates of the value
        th, w = _CTX2.gens()
        mu = _CTX2.from_dict({(i, 0): c for i, c in enumerate(self.mu.coeffs())})
        ew = _CTX2.from_dict({(i, 0): c for i, c in enumerate(e.coeffs())})
        res = mu.resultant(w - ew, "_th")
        uni = fmpq_poly([res.to_dict().get((0, j), ZERO) for j in range(res.degrees()[1] + 1)])
        cands = []
        for f in irreducible_factors(as_integer_poly(uni)):
            cands.extend(isolate_roots(f))
        return _match(cands, lambda: self.enclosure(e), self.theta)


_RATIONALS = NumberField(RealAlgebraic.from_rational(0))


def _match(cands: list[RealAlgebraic], enclose, *refine: RealAlgebraic) -> RealAlgebraic:
    """The unique candidate whose value lies in the shrinking enclosure."""
    while True:
        lo, hi = enclose()
        hits = [c for c in cands if not (c.interval[1] <= lo or c.interval[0] >= hi)]
        hits = [c for c in hits if _meets(c, lo, hi)]
        if len(hits) == 1:
            return hits[0]
        if not hits:
            raise AssertionError("no algebraic candidate matches the enclosure")
        for c in hits:
            c._tighten((c.interval[1] - c.interval[0]) / 4)
        for r in refine:
            a, b = r.interval
            r._tighten((b - a) / 4)


def _meets(c: RealAlgebraic, lo: fmpq, hi: fmpq) -> bool:
    # an exact rational candidate is inside the closed enclosure or not at all
    if c.is_rational():
        return lo <= c.rational() <= hi
    return True


# ---------------------------------------------------------------------------
# polynomials over a number field (coefficient lists, low degree first)


def kp_trim(a: list) -> list:
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def kp_monic(K: NumberField, a: list) -> list:
    inv = K.inv(a[-1])
    return [K.reduce(c * inv) for c in a]


def kp_divmod(K: NumberField, a: list, b: list) -> tuple[list, list]:
    a = kp_trim(a)
    b = kp_trim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    inv = K.inv(b[-1])
    db = len(b) - 1
    quot = [fmpq_poly([])] * max(0, len(a) - db)
    r = list(a)
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        c = K.reduce(r[-1] * inv)
        quot[k] = c
        for i in range(db + 1):
            r[k + i] = K.reduce(r[k + i] - c * b[i])
        r = kp_trim(r)
    return quot, r


def kp_gcd(K: NumberField, a: list, b: list) -> list:
    a, b = kp_trim(a), kp_trim(b)
    while b:
        _, r = kp_divmod(K, a, b)
        a, b = b, r
    return kp_monic(K, a) if a else a


def kp_deriv(a: list) -> list:
    return kp_trim([a[i] * i for i in range(1, len(a))])


def kp_eval(K: NumberField, a: list, q: fmpq) -> fmpq_poly:
    acc = fmpq_poly([])
    for c in reversed(a):
        acc = K.reduce(acc * q + c)
    return acc


def kp_sturm(K: NumberField, a: list) -> list[list]:
    seq = [a, kp_deriv(a)]
    while seq[-1] and len(seq[-1]) > 1:
        _, r = kp_divmod(K, seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def kp_sturm_count(K: NumberField, seq: list[list], lo: fmpq, hi: fmpq) -> int:
    def var(q):
        signs = [K.sign(kp_eval(K, s, q)) for s in seq]
        signs = [s for s in signs if s]
        return sum(1 for u, v in zip(signs, signs[1:]) if u != v)

    return var(lo) - var(hi)


def kp_to_mpoly(a: list) -> flint.fmpq_mpoly:
    d = {}
    for j, c in enumerate(a):
        for i, v in enumerate(c.coeffs()):
            if v != 0:
                d[(i, j)] = v
    return _CTX2.from_dict(d)


def _univariate_from_ctx2(m: flint.fmpq_mpoly, var: int) -> fmpq_poly:
    d = m.to_dict()
    if not d:
        return fmpq_poly([])
    n = max(e[var] for e in d) + 1
    cs = [ZERO] * n
    for e, c in d.items():
        cs[e[var]] += c
    return fmpq_poly(cs)


def kp_norm(K: NumberField, a: list) -> fmpq_poly:
    """``Res_theta(mu, a)``: a rational polynomial vanishing at all roots of ``a``."""
    if K.is_rational():
        return fmpq_poly([c.coeffs()[0] if not c.is_zero() else ZERO for c in a])
    mu = _CTX2.from_dict({(i, 0): c for i, c in enumerate(K.mu.coeffs())})
    res = mu.resultant(kp_to_mpoly(a), "_th")
    return _univariate_from_ctx2(res, 1)


# ---------------------------------------------------------------------------
# sample points


@dataclass(frozen=True)
class LiftRoot:
    """A real root of a polynomial specialized at a point.

    ``factor`` is a polynomial over the point's field that vanishes at the root
    (used to extend the field when the root becomes a coordinate).
    """

    value: RealAlgebraic
    factor: tuple


class AlgebraicPoint:
    """A point of R^k whose coordinates lie in a common field Q(theta)."""

    __slots__ = ("field", "coords", "reals", "_images", "_memo")

    def __init__(self, field: NumberField, coords, reals):
        self.field = field
        self.coords = tuple(coords)
        self.reals = tuple(reals)
        self._images = None
        self._memo = {}

    @classmethod
    def origin(cls) -> AlgebraicPoint:
        return cls(_RATIONALS, (), ())

    @classmethod
    def from_rationals(cls, values) -> AlgebraicPoint:
        qs = [to_rational(v) for v in values]
        return cls(_RATIONALS, [fmpq_poly([q]) for q in qs], [RealAlgebraic.from_rational(q) for q in qs])

    @classmethod
    def from_reals(cls, values) -> AlgebraicPoint:
        pt = cls.origin()
        for v in values:
            if isinstance(v, RealAlgebraic):
                if v.is_rational():
                    pt = pt.extend_rational(v.rational())
                else:
                    pt = pt.extend_real(v)
            else:
                pt = pt.extend_rational(v)
        return pt

    def __len__(self) -> int:
        return len(self.coords)

    def __repr__(self) -> str:
        return "AlgebraicPoint(" + ", ".join(repr(r) for r in self.reals) + ")"

    def is_rational(self) -> bool:
        return all(r.is_rational() for r in self.reals)

    def prefix(self, k: int) -> AlgebraicPoint:
        """The projection onto the first ``k`` coordinates."""
        if k == len(self.coords):
            return self
        key = ("prefix", k)
        if key not in self._memo:
            self._memo[key] = AlgebraicPoint(self.field, self.coords[:k], self.reals[:k])
        return self._memo[key]

    def roots(self, p: MultiPoly) -> list[LiftRoot] | None:
        """Memoized :func:`roots_at` over this point."""
        key = ("roots", p.key())
        if key not in self._memo:
            self._memo[key] = roots_at(p, self)
        return self._memo[key]

    def rationals(self) -> list[fmpq]:
        return [r.rational() for r in self.reals]

    def floats(self) -> list[float]:
        return [float(r) for r in self.reals]

    # -- extension --------------------------------------------------------
    def extend_rational(self, q) -> AlgebraicPoint:
        q = to_rational(q)
        return AlgebraicPoint(self.field, self.coords + (fmpq_poly([q]),), self.reals + (RealAlgebraic.from_rational(q),))

    def extend_real(self, value: RealAlgebraic) -> AlgebraicPoint:
        """Append an arbitrary real algebraic coordinate."""
        if value.is_rational():
            return self.extend_rational(value.rational())
        f = fmpq_poly(int_coeffs(value.poly))
        factor = tuple(fmpq_poly([c]) for c in f.coeffs())
        return self.extend_root(LiftRoot(value, factor))

    def extend_root(self, root: LiftRoot) -> AlgebraicPoint:
        tau = root.value
        if tau.is_rational():
            return self.extend_rational(tau.rational())
        K = self.field
        if K.is_rational():
            L = NumberField(tau)
            return AlgebraicPoint(L, self.coords + (_X,), self.reals + (tau,))
        h = kp_trim(root.factor)
        if len(h) == 2:
            h = kp_monic(K, h)
            elem = K.reduce(-h[0])
            return AlgebraicPoint(K, self.coords + (elem,), self.reals + (tau,))
        L, theta_L, tau_L = _primitive_element(K, h, tau)
        coords = tuple(L.reduce(c(theta_L)) if c.degree() > 0 else c for c in self.coords)
        return AlgebraicPoint(L, coords + (tau_L,), self.reals + (tau,))

    # -- evaluation -------------------------------------------------------
    def _image_list(self, n: int):
        if self._images is None:
            self._images = [_to_mpoly1(c) for c in self.coords]
        return self._images

    def evaluate(self, p: MultiPoly) -> fmpq_poly:
        """``p`` at this point as an element of the point's field."""
        k = len(self.coords)
        if p.level() > k:
            raise ValueError(f"missing coordinate for variable {p.variables[p.level() - 1]!r}")
        if p.is_constant():
            return fmpq_poly([p.constant_value()])
        if self.field.degree == 1:
            vals = self._rational_values()
            n = len(p.variables)
            args = (vals + [ZERO] * n)[:n]
            return fmpq_poly([p.raw(*args)])
        imgs = self._image_list(k)
        n = len(p.variables)
        zero = _CTX1.from_dict({})
        args = imgs[:n] + [zero] * (n - min(n, k))
        m = p.raw.compose(*args[:n], ctx=_CTX1)
        return self.field.reduce(_from_mpoly1(m))

    def _rational_values(self) -> list:
        vals = self._memo.get("q")
        if vals is None:
            vals = [c.coeffs()[0] if not c.is_zero() else ZERO for c in self.coords]
            self._memo["q"] = vals
        return vals

    def sign(self, p: MultiPoly) -> int:
        if self.field.degree == 1:
            k = len(self.coords)
            if p.level() > k:
                raise ValueError(f"missing coordinate for variable {p.variables[p.level() - 1]!r}")
            n = len(p.variables)
            vals = self._rational_values()
            v = p.raw(*(vals + [ZERO] * n)[:n]) if n else p.constant_value()
            return (v > 0) - (v < 0)
        return self.field.sign(self.evaluate(p))

    def specialize(self, p: MultiPoly) -> list:
        """Substitute the coordinates into ``p``; coefficients in the next variable."""
        k = len(self.coords)
        if p.level() > k + 1:
            raise ValueError(f"missing coordinate for variable {p.variables[p.level() - 1]!r}")
        n = len(p.variables)
        if self.field.degree == 1:
            vals = self._rational_values()
            m = p.raw.subs({i: vals[i] for i in range(min(k, n))}) if k else p.raw
            coeffs: dict[int, fmpq] = {}
            for e, c in m.to_dict().items():
                j = e[k] if k < n else 0
                coeffs[j] = coeffs.get(j, ZERO) + c
            if not coeffs:
                return []
            return kp_trim([fmpq_poly([coeffs.get(j, ZERO)]) for j in range(max(coeffs) + 1)])
        th, t = _CTX2.gens()
        imgs = [_CTX2.from_dict({(i, 0): c for i, c in enumerate(e.coeffs()) if c != 0}) for e in self.coords]
        zero = _CTX2.from_dict({})
        args = (imgs + [t] + [zero] * n)[:n]
        m = p.raw.compose(*args, ctx=_CTX2)
        d = m.to_dict()
        if not d:
            return []
        deg = max(e[1] for e in d)
        rows = [dict() for _ in range(deg + 1)]
        for (i, j), c in d.items():
            rows[j][i] = c
        K = self.field
        out = []
        for row in rows:
            if row:
                cs = [ZERO] * (max(row) + 1)
                for i, c in row.items():
                    cs[i] = c
                out.append(K.reduce(fmpq_poly(cs)))
            else:
                out.append(fmpq_poly([]))
        return kp_trim(out)


def sign_at(p: MultiPoly, point: AlgebraicPoint) -> int:
    """Exact sign of ``p`` at ``point`` (-1, 0 or 1)."""
    return point.sign(p)


def roots_at(p: MultiPoly, point: AlgebraicPoint) -> list[LiftRoot] | None:
    """Distinct real roots of ``p(point, t)`` in increasing order.

    Returns ``None`` when ``p`` vanishes identically over the point.
    """
    f = point.specialize(p)
    if not f:
        return None
    if len(f) == 1:
        return []
    K = point.field
    if K.is_rational():
        uni = fmpq_poly([c.coeffs()[0] if not c.is_zero() else ZERO for c in f])
        out = []
        for g in irreducible_factors(as_integer_poly(uni)):
            fac = tuple(fmpq_poly([c]) for c in g.coeffs())
            for r in roots_of_irreducible(g):
                out.append(LiftRoot(r, fac))
        out.sort(key=functools.cmp_to_key(lambda a, b: ran_compare(a.value, b.value)))
        return out
    f = kp_monic(K, f)
    g = kp_gcd(K, f, kp_deriv(f))
    if len(g) > 1:
        f, _ = kp_divmod(K, f, g)
        f = kp_monic(K, f)
    norm = kp_norm(K, f)
    out = []
    for gz in irreducible_factors(as_integer_poly(norm)):
        gk = [fmpq_poly([c]) for c in gz.coeffs()]
        h = kp_gcd(K, f, gk)
        if len(h) < 2:
            continue
        reals = isolate_roots(gz)
        if len(h) == len(gk):
            out.extend(LiftRoot(r, tuple(h)) for r in reals)
            continue
        seq = kp_sturm(K, h)
        for r in reals:
            lo, hi = r.interval
            if kp_sturm_count(K, seq, lo, hi) == 1:
                out.append(LiftRoot(r, tuple(h)))
    out.sort(key=functools.cmp_to_key(lambda a, b: ran_compare(a.value, b.value)))
    return out


def _primitive_element(K: NumberField, h: list, tau: RealAlgebraic):
    """Field ``L = K(tau)`` with images of theta and tau, for ``h(tau) = 0``."""
    H = kp_to_mpoly(h)  # in (theta, t)
    th, s = _CTX2.gens()
    mu2 = _CTX2.from_dict({(i, 0): c for i, c in enumerate(K.mu.coeffs())})
    for k in itertools.chain.from_iterable((j, -j) for j in itertools.count(1)):
        shifted = H.compose(th, s - k * th, ctx=_CTX2)
        R = _univariate_from_ctx2(mu2.resultant(shifted, "_th"), 1)
        if R.degree() < 1:
            continue
        if R.gcd(R.derivative()).degree() > 0:
            continue
        break
    cands = []
    for f in irreducible_factors(as_integer_poly(R)):
        cands.extend(isolate_roots(f))
    theta = K.theta

    def enclose():
        a, b = tau.interval
        c, d = theta.interval
        lo1, hi1 = (k * c, k * d) if k > 0 else (k * d, k * c)
        return a + lo1, b + hi1

    psi = _match(cands, enclose, tau, theta)
    L = NumberField(psi)
    # theta is the unique common root of mu(X) and h(X, psi - k X) over L
    X, S = _CTX2.gens()  # X plays theta, S plays psi
    hx = H.compose(X, S - k * X, ctx=_CTX2)
    d = hx.to_dict()
    deg = max(e[0] for e in d)
    rows = [dict() for _ in range(deg + 1)]
    for (i, j), c in d.items():
        rows[i][j] = c
    poly_x = []
    for row in rows:
        cs = [ZERO] * (max(row) + 1 if row else 1)
        for j, c in row.items():
            cs[j] = c
        poly_x.append(L.reduce(fmpq_poly(cs)))
    mu_x = [fmpq_poly([c]) for c in K.mu.coeffs()]
    g = kp_gcd(L, mu_x, kp_trim(poly_x))
    if len(g) != 2:
        raise AssertionError("primitive element construction did not separate the conjugates")
    theta_L = L.reduce(-g[0])
    tau_L = L.reduce(_X - k * theta_L)
    return L, theta_L, tau_L
