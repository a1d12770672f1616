"""Sparse exact multivariate polynomials and elimination tools.

:class:`MultiPoly` wraps a ``flint.fmpq_mpoly`` over an explicit ordered tuple
of variable names.  The last variable with positive degree is the *main*
variable; CAD treats a polynomial as univariate in it.
"""

from __future__ import annotations

from math import gcd as igcd

import flint

from .numeric import fmpq, fmpq_poly, rational_str, to_rational


def context(variables) -> flint.fmpq_mpoly_ctx:
    variables = tuple(variables)
    if not variables:
        variables = ("_",)
    return flint.fmpq_mpoly_ctx.get(variables, "lex")


class MultiPoly:
    """Immutable polynomial with rational coefficients over ordered variables."""

    __slots__ = ("_p", "_vars", "_key", "_hash", "_level")

    def __init__(self, p: flint.fmpq_mpoly, variables: tuple[str, ...] | None = None):
        self._p = p
        self._vars = tuple(variables) if variables is not None else tuple(p.context().names())
        self._key = None
        self._hash = None
        self._level = None

    # -- construction ---------------------------------------------------
    @classmethod
    def from_terms(cls, variables, terms: dict) -> MultiPoly:
        variables = tuple(variables)
        ctx = context(variables)
        clean = {}
        for exps, c in terms.items():
            c = to_rational(c)
            if c != 0:
                e = tuple(exps) if variables else (0,)
                clean[e] = clean.get(e, fmpq(0)) + c
        return cls(ctx.from_dict({e: c for e, c in clean.items() if c != 0}), variables)

    @classmethod
    def constant(cls, variables, value) -> MultiPoly:
        variables = tuple(variables)
        return cls(context(variables).constant(to_rational(value)), variables)

    @classmethod
    def var(cls, variables, name: str) -> MultiPoly:
        variables = tuple(variables)
        return cls(context(variables).gens()[variables.index(name)], variables)

    def _wrap(self, p) -> MultiPoly:
        return MultiPoly(p, self._vars)

    # -- basic data -----------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def raw(self) -> flint.fmpq_mpoly:
        return self._p

    @property
    def terms(self) -> dict:
        if not self._vars:
            return {(): c for c in self._p.to_dict().values()}
        return dict(self._p.to_dict())

    def key(self):
        if self._key is None:
            items = sorted((e, (int(c.p), int(c.q))) for e, c in self._p.to_dict().items())
            self._key = (self._vars, tuple(items))
        return self._key

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self._vars == other._vars and self._p == other._p
        if isinstance(other, (int, fmpq)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.is_constant()

    def constant_value(self) -> fmpq:
        if not self._p.is_constant():
            raise ValueError("polynomial is not constant")
        d = self._p.to_dict()
        return next(iter(d.values())) if d else fmpq(0)

    def degree(self, var) -> int:
        """Degree in ``var`` (name or index); -1 for the zero polynomial."""
        if self._p.is_zero():
            return -1
        return self._p.degrees()[self._index(var)]

    def degrees(self) -> tuple[int, ...]:
        return tuple(self._p.degrees())

    def total_degree(self) -> int:
        return -1 if self._p.is_zero() else int(self._p.total_degree())

    def level(self) -> int:
        """1-based index of the main variable; 0 for constants."""
        if self._level is None:
            lv = 0
            if not (self._p.is_zero() or self._p.is_constant()):
                degs = self._p.degrees()
                for i in range(len(degs) - 1, -1, -1):
                    if degs[i] > 0:
                        lv = i + 1
                        break
            self._level = lv
        return self._level

    def main_variable(self) -> str | None:
        lv = self.level()
        return self._vars[lv - 1] if lv else None

    def _index(self, var) -> int:
        return var if isinstance(var, int) else self._vars.index(var)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other._vars != self._vars:
                raise ValueError("polynomials over different variable orders")
            return other._p
        return to_rational(other)

    def __add__(self, other):
        return self._wrap(self._p + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self._p - self._coerce(other))

    def __rsub__(self, other):
        return self._wrap(self._coerce(other) - self._p)

    def __mul__(self, other):
        return self._wrap(self._p * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self._p)

    def __pow__(self, k: int):
        return self._wrap(self._p**k)

    def exquo(self, other: MultiPoly) -> MultiPoly:
        """Exact quotient; raises ArithmeticError when a remainder is left."""
        o = self._coerce(other)
        if isinstance(o, fmpq):
            if o == 0:
                raise ZeroDivisionError("division by zero polynomial")
            return self._wrap(self._p / o)
        if o.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        try:
            return self._wrap(self._p / o)
        except Exception as exc:  # flint DomainError
            raise ArithmeticError("exact division has a nonzero remainder") from exc

    def derivative(self, var) -> MultiPoly:
        return self._wrap(self._p.derivative(self._index(var)))

    def gcd(self, other: MultiPoly) -> MultiPoly:
        return self._wrap(self._p.gcd(self._coerce(other)))

    # -- coefficients ---------------------------------------------------
    def coefficients(self, var) -> list[MultiPoly]:
        """Coefficients in ``var``, lowest degree first."""
        i = self._index(var)
        d = self.degree(i)
        if d < 0:
            return []
        groups: list[dict] = [dict() for _ in range(d + 1)]
        for exps, c in self._p.to_dict().items():
            e = list(exps)
            k = e[i]
            e[i] = 0
            groups[k][tuple(e)] = c
        ctx = self._p.context()
        return [self._wrap(ctx.from_dict(g)) for g in groups]

    def leading_coefficient(self, var) -> MultiPoly:
        i = self._index(var)
        d = self.degree(i)
        if d < 0:
            return self
        ctx = self._p.context()
        g = {}
        for exps, c in self._p.to_dict().items():
            if exps[i] == d:
                e = list(exps)
                e[i] = 0
                g[tuple(e)] = c
        return self._wrap(ctx.from_dict(g))

    def univariate_coeffs(self) -> fmpq_poly:
        lv = self.level()
        if lv == 0:
            return fmpq_poly([self.constant_value()])
        i = lv - 1
        if any(d > 0 for j, d in enumerate(self._p.degrees()) if j != i):
            raise ValueError("polynomial is not univariate")
        return fmpq_poly([c.constant_value() for c in self.coefficients(i)])

    # -- substitution ---------------------------------------------------
    def evaluate(self, values: dict) -> MultiPoly:
        """Substitute rationals for some variables (by name)."""
        if not values:
            return self
        sub = {k: to_rational(v) for k, v in values.items()}
        return self._wrap(self._p.subs(sub))

    def value_at(self, values: dict) -> fmpq:
        return self.evaluate(values).constant_value()

    def rebase(self, variables) -> MultiPoly:
        """The same polynomial over a different variable tuple (by name)."""
        variables = tuple(variables)
        if variables == self._vars:
            return self
        pos = []
        degs = self._p.degrees() if not self._p.is_zero() else [0] * len(self._vars)
        for name, d in zip(self._vars, degs):
            if name in variables:
                pos.append(variables.index(name))
            elif d > 0:
                raise ValueError(f"variable {name!r} missing from target order")
            else:
                pos.append(None)
        terms = {}
        n = len(variables)
        for exps, c in self._p.to_dict().items():
            e = [0] * n
            for j, k in enumerate(exps):
                if k:
                    e[pos[j]] = k
            terms[tuple(e)] = c
        return MultiPoly(context(variables).from_dict(terms), variables)

    def substitute(self, images: list[MultiPoly]) -> MultiPoly:
        """Compose: variable i is replaced by ``images[i]``."""
        target = images[0]._vars
        p = self._p.compose(*[im._p for im in images], ctx=context(target))
        return MultiPoly(p, target)

    # -- normal forms ---------------------------------------------------
    def canonical(self) -> MultiPoly:
        """Integer primitive associate with positive leading coefficient.

        The leading term is the largest exponent vector compared from the last
        variable to the first.
        """
        d = self._p.to_dict()
        if not d:
            return self
        den = 1
        num = 0
        for c in d.values():
            q = int(c.q)
            den = den * q // igcd(den, q)
            num = igcd(num, int(c.p))
        lead = max(d, key=lambda e: e[::-1])
        factor = fmpq(den, num)
        if d[lead] < 0:
            factor = -factor
        if factor == 1:
            return self
        return self._wrap(self._p * factor)

    # -- rendering ------------------------------------------------------
    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"MultiPoly({render(self)!r}, {self._vars!r})"


def render(p: MultiPoly) -> str:
    """Canonical text: graded lexicographic term order, e.g. ``x^2*y - 2*y + 1``."""
    d = p.raw.to_dict()
    if not d:
        return "0"
    names = p.variables
    items = sorted(d.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))
    parts = []
    for exps, c in items:
        mono = "*".join(
            (names[i] if k == 1 else f"{names[i]}^{k}") for i, k in enumerate(exps) if k and names
        )
        mag = abs(c)
        if not mono:
            body = rational_str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{rational_str(mag)}*{mono}"
        neg = c < 0
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# univariate-in-main-variable operations


def _lc(p, i):
    return p.leading_coefficient(i)


def prem(a: MultiPoly, b: MultiPoly, var) -> MultiPoly:
    """Pseudo-remainder: ``lc(b)**(deg a - deg b + 1) * a`` modulo ``b``."""
    i = a._index(var)
    db = b.degree(i)
    if db < 0:
        raise ZeroDivisionError("pseudo-division by zero")
    da = a.degree(i)
    if da < db:
        return a
    x = MultiPoly(a.raw.context().gens()[i], a.variables)
    lb = _lc(b, i)
    r = a
    e = da - db + 1
    while not r.is_zero():
        dr = r.degree(i)
        if dr < db:
            break
        lr = _lc(r, i)
        t = lr * b
        if dr > db:
            t = t * x ** (dr - db)
        r = lb * r - t
        e -= 1
    if e:
        r = r * lb**e
    return r


def _require_positive_degree(p, q, i):
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of a zero polynomial")
    if p.degree(i) < 1 or q.degree(i) < 1:
        raise ValueError("resultant needs positive degree in the elimination variable")


def subresultant_chain(p: MultiPoly, q: MultiPoly, var) -> dict[int, MultiPoly]:
    """Subresultant polynomials ``S_j`` for ``0 <= j < deg q`` (plus ``S_q``).

    Requires ``deg p >= deg q > 0`` in ``var``.  Missing indices are zero.
    """
    i = p._index(var)
    a, b = p, q
    da, db = a.degree(i), b.degree(i)
    chain: dict[int, MultiPoly] = {}
    s = _lc(b, i) ** (da - db)
    chain[db] = b * _lc(b, i) ** (da - db - 1) if da > db else b
    a, b = b, prem(a, -b, i)
    while True:
        if b.is_zero():
            return chain
        d, e = a.degree(i), b.degree(i)
        chain[d - 1] = b
        delta = d - e
        if delta > 1:
            lb = _lc(b, i)
            c = (b * lb ** (delta - 1)).exquo(s ** (delta - 1))
            chain[e] = c
        else:
            c = b
        if e == 0:
            return chain
        b = prem(a, -b, i).exquo(s**delta * _lc(a, i))
        a = c
        s = _lc(a, i)


def psc_sequence(p: MultiPoly, q: MultiPoly, var) -> list[MultiPoly]:
    """Principal subresultant coefficients ``psc_0 .. psc_min(deg p, deg q)``.

    ``psc_0`` is the resultant.  Argument order follows the Sylvester-matrix
    convention (rows of ``p`` first).
    """
    i = p._index(var)
    _require_positive_degree(p, q, i)
    dp, dq = p.degree(i), q.degree(i)
    swap = dp < dq
    a, b = (q, p) if swap else (p, q)
    m, n = max(dp, dq), min(dp, dq)
    zero = MultiPoly.constant(p.variables, 0)
    chain = subresultant_chain(a, b, i)
    out = []
    for j in range(n + 1):
        s = chain.get(j)
        if s is None or s.degree(i) != j:
            c = zero
        else:
            c = _lc(s, i)
        if j == n:
            c = _lc(b, i) ** (m - n)
        if swap:
            # Sylvester rows swapped: sign (-1)^((m-j)(n-j))
            if ((m - j) * (n - j)) % 2:
                c = -c
        out.append(c)
    return out


def _divides(d: MultiPoly, p: MultiPoly) -> bool:
    try:
        p.exquo(d)
        return True
    except ArithmeticError:
        return False


def resultant(p: MultiPoly, q: MultiPoly, var) -> MultiPoly:
    """Sylvester resultant of ``p`` and ``q`` with respect to ``var``."""
    return psc_sequence(p, q, var)[0]


def discriminant(p: MultiPoly, var) -> MultiPoly:
    """``resultant(p, dp/dvar)`` without dividing by the leading coefficient."""
    return resultant(p, p.derivative(var), var)


def content(p: MultiPoly, var) -> MultiPoly:
    """Gcd of the coefficients of ``p`` in ``var`` (canonical associate)."""
    g = None
    for c in p.coefficients(var):
        if c.is_zero():
            continue
        g = c if g is None else g.gcd(c)
        if g.is_constant():
            return MultiPoly.constant(p.variables, 1)
    if g is None:
        return MultiPoly.constant(p.variables, 0)
    return g.canonical()


def primitive_part(p: MultiPoly, var) -> MultiPoly:
    c = content(p, var)
    if c.is_zero():
        return p
    return p.exquo(c).canonical()


def squarefree_part(p: MultiPoly, var) -> MultiPoly:
    """``p / gcd(p, dp/dvar)`` as a canonical integer-primitive polynomial."""
    if p.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    if p.is_constant():
        return MultiPoly.constant(p.variables, 1)
    dp = p.derivative(var)
    if dp.is_zero():
        return p.canonical()
    g = p.gcd(dp)
    if not g.is_constant():
        p = p.exquo(g)
    return p.canonical()


def full_squarefree(p: MultiPoly) -> MultiPoly:
    """Squarefree part with respect to all variables jointly."""
    if p.is_constant():
        return MultiPoly.constant(p.variables, 1) if not p.is_zero() else p
    _, facs = p.raw.factor_squarefree()
    out = MultiPoly.constant(p.variables, 1)
    for f, _ in facs:
        out = out * MultiPoly(f, p.variables)
    return out.canonical()
