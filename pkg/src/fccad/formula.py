"""First-order formulas over the reals with sign and indexed-root atoms.

Grammar (whitespace insensitive)::

    formula := quant* disj
    quant   := ("A" | "E") ident "."
    disj    := conj ("\\/" conj)*
    conj    := lit ("/\\" lit)*
    lit     := "~"? ("(" formula ")" | atom)
    atom    := poly relop poly | ident relop "root(" int "," poly ")" | "true" | "false"
    relop   := "=" | "!=" | "<" | "<=" | ">" | ">="

Polynomials use ``+ - * / ^`` with integer literals; ``/`` only divides by a
nonzero constant.  ``v < root(j, p)`` compares ``v`` with the ``j``-th
smallest distinct real root of ``p`` viewed as a polynomial in ``v`` with the
earlier variables fixed.  If that root does not exist the atom is false.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .algebraic import AlgebraicPoint
from .numeric import fmpq, ran_compare
from .poly import MultiPoly

RELATIONS = ("=", "!=", "<", "<=", ">", ">=")
NEGATED = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
FLIPPED = {"=": "=", "!=": "!=", "<": ">", ">": "<", "<=": ">=", ">=": "<="}


def holds(rel: str, s: int) -> bool:
    """Whether an ordering result ``s`` (sign or comparison) satisfies ``rel``."""
    if rel == "=":
        return s == 0
    if rel == "!=":
        return s != 0
    if rel == "<":
        return s < 0
    if rel == "<=":
        return s <= 0
    if rel == ">":
        return s > 0
    return s >= 0


class Formula:
    """Base class of formula nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)

    def __and__(self, other: Formula) -> Formula:
        return conj(self, other)

    def __or__(self, other: Formula) -> Formula:
        return disj(self, other)

    def __invert__(self) -> Formula:
        return neg(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    """``poly rel 0``."""

    poly: MultiPoly
    rel: str


@dataclass(frozen=True)
class RootAtom(Formula):
    """``var rel root(ordinal, poly)`` with ordinals counted from 1."""

    var: str
    rel: str
    ordinal: int
    poly: MultiPoly


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Quantified(Formula):
    """A prenex prefix of blocks ``(kind, variables)`` over a quantifier-free matrix."""

    blocks: tuple
    matrix: Formula

    @property
    def bound(self) -> tuple[str, ...]:
        return tuple(v for _, vs in self.blocks for v in vs)


TRUE = Const(True)
FALSE = Const(False)


def conj(*args: Formula) -> Formula:
    """Flattened conjunction with constant folding."""
    out = []
    for a in args:
        if isinstance(a, Const):
            if not a.value:
                return FALSE
            continue
        if isinstance(a, And):
            out.extend(a.args)
        else:
            out.append(a)
    out = list(dict.fromkeys(out))
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*args: Formula) -> Formula:
    """Flattened disjunction with constant folding."""
    out = []
    for a in args:
        if isinstance(a, Const):
            if a.value:
                return TRUE
            continue
        if isinstance(a, Or):
            out.extend(a.args)
        else:
            out.append(a)
    out = list(dict.fromkeys(out))
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def conj_all(args: Iterable[Formula]) -> Formula:
    return conj(*args)


def disj_all(args: Iterable[Formula]) -> Formula:
    return disj(*args)


# ---------------------------------------------------------------------------
# normalization


def nnf(f: Formula) -> Formula:
    """Negation normal form.  Negated root atoms stay as ``Not(RootAtom)``."""
    if isinstance(f, Quantified):
        return Quantified(f.blocks, nnf(f.matrix))
    return _nnf(f, False)


def _nnf(f: Formula, negate: bool) -> Formula:
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Atom):
        return Atom(f.poly, NEGATED[f.rel]) if negate else f
    if isinstance(f, RootAtom):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return _nnf(f.arg, not negate)
    if isinstance(f, And):
        parts = [_nnf(a, negate) for a in f.args]
        return disj(*parts) if negate else conj(*parts)
    if isinstance(f, Or):
        parts = [_nnf(a, negate) for a in f.args]
        return conj(*parts) if negate else disj(*parts)
    raise ValueError("quantifier inside a quantifier-free position")


def normalize(f: Formula) -> Formula:
    return nnf(f)


def desugar(f: Formula) -> Formula:
    """Rewrite every sign atom with the primitives ``p = 0`` and ``p > 0``."""
    if isinstance(f, Quantified):
        return Quantified(f.blocks, desugar(f.matrix))
    if isinstance(f, Atom):
        p, r = f.poly, f.rel
        if r in ("=", ">"):
            return f
        if r == "!=":
            return Not(Atom(p, "="))
        if r == "<":
            return Atom(-p, ">")
        if r == ">=":
            return Or((Atom(p, ">"), Atom(p, "=")))
        return Or((Atom(-p, ">"), Atom(p, "=")))
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, And):
        return And(tuple(desugar(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(desugar(a) for a in f.args))
    return f


def atoms(f: Formula) -> Iterator[Formula]:
    if isinstance(f, (Atom, RootAtom)):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from atoms(a)
    elif isinstance(f, Quantified):
        yield from atoms(f.matrix)


def polynomials_of(f: Formula) -> list[MultiPoly]:
    """Distinct nonconstant polynomials of all atoms, in canonical form."""
    seen: dict = {}
    for a in atoms(f):
        p = a.poly.canonical()
        if not p.is_constant():
            seen.setdefault(p.key(), p)
    return list(seen.values())


def max_level(f: Formula) -> int:
    """Number of leading variables the formula depends on."""
    lv = 0
    for a in atoms(f):
        lv = max(lv, a.poly.level())
        if isinstance(a, RootAtom):
            lv = max(lv, a.poly.variables.index(a.var) + 1)
    return lv


def rename(f: Formula, names, variables) -> Formula:
    """Map the i-th variable of every atom to ``names[i]`` in the order ``variables``."""
    variables = tuple(variables)
    cache: dict = {}

    def image(p: MultiPoly) -> MultiPoly:
        key = p.variables
        if key not in cache:
            cache[key] = [MultiPoly.var(variables, nm) for nm in names[: len(key)]]
        return p.substitute(cache[key])

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return Atom(image(g.poly), g.rel)
        if isinstance(g, RootAtom):
            k = g.poly.variables.index(g.var)
            return RootAtom(names[k], g.rel, g.ordinal, image(g.poly))
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, And):
            return And(tuple(walk(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(walk(a) for a in g.args))
        return g

    if isinstance(f, Quantified):
        raise ValueError("rename expects a quantifier-free formula")
    return walk(f)


def rebase(f: Formula, variables) -> Formula:
    """The same formula with polynomials over another variable tuple (by name)."""
    variables = tuple(variables)

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.poly.rebase(variables), g.rel)
        if isinstance(g, RootAtom):
            return RootAtom(g.var, g.rel, g.ordinal, g.poly.rebase(variables))
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, And):
            return And(tuple(walk(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(walk(a) for a in g.args))
        if isinstance(g, Quantified):
            return Quantified(g.blocks, walk(g.matrix))
        return g

    return walk(f)


# ---------------------------------------------------------------------------
# evaluation


def _root_compare(a: RootAtom, point: AlgebraicPoint) -> bool:
    k = a.poly.variables.index(a.var)
    roots = point.prefix(k).roots(a.poly)
    if roots is None or len(roots) < a.ordinal:
        return False
    return holds(a.rel, ran_compare(point.reals[k], roots[a.ordinal - 1].value))


def evaluate_at(f: Formula, point: AlgebraicPoint) -> bool:
    """Exact truth value of a quantifier-free formula at ``point``."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return holds(f.rel, point.sign(f.poly))
    if isinstance(f, RootAtom):
        if f.poly.variables.index(f.var) >= len(point):
            raise ValueError(f"missing coordinate for variable {f.var!r}")
        return _root_compare(f, point)
    if isinstance(f, Not):
        return not evaluate_at(f.arg, point)
    if isinstance(f, And):
        return all(evaluate_at(a, point) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate_at(a, point) for a in f.args)
    raise ValueError("cannot evaluate a formula with an unevaluated quantifier")


def partial_eval(f: Formula, point: AlgebraicPoint) -> bool | None:
    """Three-valued evaluation: ``None`` when the prefix does not decide ``f``."""
    k = len(point)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        if f.poly.level() > k:
            return None
        return holds(f.rel, point.sign(f.poly))
    if isinstance(f, RootAtom):
        if f.poly.variables.index(f.var) >= k:
            return None
        return _root_compare(f, point)
    if isinstance(f, Not):
        v = partial_eval(f.arg, point)
        return None if v is None else not v
    if isinstance(f, And):
        unknown = False
        for a in f.args:
            v = partial_eval(a, point)
            if v is False:
                return False
            if v is None:
                unknown = True
        return None if unknown else True
    if isinstance(f, Or):
        unknown = False
        for a in f.args:
            v = partial_eval(a, point)
            if v is True:
                return True
            if v is None:
                unknown = True
        return None if unknown else False
    raise ValueError("cannot evaluate a formula with an unevaluated quantifier")


def evaluate_rational(f: Formula, values) -> bool:
    return evaluate_at(f, AlgebraicPoint.from_rationals(values))


# ---------------------------------------------------------------------------
# rendering


def render(f: Formula) -> str:
    if isinstance(f, Quantified):
        head = " ".join(f"{kind} {v}." for kind, vs in f.blocks for v in vs)
        return f"{head} {render(f.matrix)}"
    return _render(f, 0)


def _render(f: Formula, ctx: int) -> str:
    # ctx: 0 top/disjunct, 1 conjunct, 2 negated operand
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"{f.poly} {f.rel} 0"
    if isinstance(f, RootAtom):
        return f"{f.var} {f.rel} root({f.ordinal}, {f.poly})"
    if isinstance(f, Not):
        return "~" + _render(f.arg, 2)
    if isinstance(f, And):
        s = " /\\ ".join(_render(a, 1) for a in f.args)
        return f"({s})" if ctx >= 2 else s
    if isinstance(f, Or):
        s = " \\/ ".join(_render(a, 0) for a in f.args)
        return f"({s})" if ctx >= 1 else s
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# parsing


class FormulaSyntaxError(ValueError):
    """Malformed formula text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>/\\|\\/|!=|<=|>=|[-+*/^()=<>~.,]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", *_linecol(text, i))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        i = m.end()
    toks.append(_Tok("end", "", n))
    return toks


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.vars = variables
        self.toks = _tokenize(text)
        self.i = 0

    # -- helpers ----------------------------------------------------------
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: _Tok | None = None) -> FormulaSyntaxError:
        tok = tok or self.tok
        return FormulaSyntaxError(message, *_linecol(self.text, tok.pos))

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "id") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r} but found {found!r}")
        return tok

    # -- formulas ---------------------------------------------------------
    def formula(self) -> Formula:
        blocks: list[tuple[str, list[str]]] = []
        quant_toks = []
        while (
            self.tok.kind == "id"
            and self.tok.text in ("A", "E")
            and self.peek().kind == "id"
            and self.peek(2).text == "."
        ):
            kind = self.tok.text
            self.i += 1
            vt = self.tok
            if vt.text not in self.vars:
                raise self.error(f"undeclared variable {vt.text!r}", vt)
            self.i += 2
            quant_toks.append(vt)
            if blocks and blocks[-1][0] == kind:
                blocks[-1][1].append(vt.text)
            else:
                blocks.append((kind, [vt.text]))
        body = self.disj()
        if not blocks:
            return body
        bound = [t.text for t in quant_toks]
        expected = list(self.vars[len(self.vars) - len(bound):])
        if len(set(bound)) != len(bound) or bound != expected:
            bad = next((t for t, e in zip(quant_toks, expected) if t.text != e), quant_toks[0])
            raise self.error(
                "quantified variables must be the trailing variables in declared order", bad
            )
        return Quantified(tuple((k, tuple(vs)) for k, vs in blocks), body)

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.accept("\\/"):
            parts.append(self.conj())
        return disj(*parts) if len(parts) > 1 else parts[0]

    def conj(self) -> Formula:
        parts = [self.lit()]
        while self.accept("/\\"):
            parts.append(self.lit())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def lit(self) -> Formula:
        if self.accept("~"):
            return neg(self.lit())
        if self.tok.text == "(":
            save = self.i
            self.i += 1
            try:
                inner = self.formula()
                self.expect(")")
                if self.tok.text not in ("+", "-", "*", "/", "^") + RELATIONS:
                    if isinstance(inner, Quantified):
                        raise self.error("quantifiers are only allowed in prenex position")
                    return inner
            except FormulaSyntaxError as exc:
                first = exc
            else:
                first = None
            self.i = save
            try:
                return self.atom()
            except FormulaSyntaxError as exc:
                # report whichever reading got further into the text
                if first is not None and (first.line, first.column) > (exc.line, exc.column):
                    raise first from None
                raise
        return self.atom()

    def atom(self) -> Formula:
        tok = self.tok
        if tok.kind == "id" and tok.text in ("true", "false"):
            self.i += 1
            return TRUE if tok.text == "true" else FALSE
        if tok.kind == "id" and self.peek().text in RELATIONS and self.peek(2).text == "root":
            var = tok.text
            if var not in self.vars:
                raise self.error(f"undeclared variable {var!r}", tok)
            self.i += 1
            rel = self.tok.text
            self.i += 1
            return self.root_atom(var, rel)
        lhs = self.poly()
        rt = self.tok
        if rt.text not in RELATIONS:
            raise self.error(f"expected a relation but found {rt.text or 'end of input'!r}")
        self.i += 1
        if self.tok.text == "root":
            raise self.error("indexed root must be compared with a single variable", rt)
        rhs = self.poly()
        return Atom(lhs - rhs, rt.text)

    def root_atom(self, var: str, rel: str) -> Formula:
        self.expect("root")
        self.expect("(")
        nt = self.tok
        if nt.kind != "num" or int(nt.text) < 1:
            raise self.error("root ordinal must be a positive integer")
        self.i += 1
        self.expect(",")
        p = self.poly()
        self.expect(")")
        k = self.vars.index(var)
        if p.level() > k + 1:
            raise self.error(f"root polynomial depends on variables after {var!r}", nt)
        return RootAtom(var, rel, int(nt.text), p)

    # -- polynomials ------------------------------------------------------
    def poly(self) -> MultiPoly:
        acc = self.term()
        while self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> MultiPoly:
        acc = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.tok
            self.i += 1
            rhs = self.unary()
            if op.text == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise self.error("division only by a nonzero constant", op)
                acc = acc * (1 / rhs.constant_value())
        return acc

    def unary(self) -> MultiPoly:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.primary()
        if self.accept("^"):
            et = self.tok
            if et.kind != "num":
                raise self.error("exponent must be a nonnegative integer literal")
            self.i += 1
            base = base ** int(et.text)
        return base

    def primary(self) -> MultiPoly:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return MultiPoly.constant(self.vars, fmpq(int(tok.text)))
        if tok.kind == "id":
            if tok.text not in self.vars:
                raise self.error(f"undeclared variable {tok.text!r}", tok)
            self.i += 1
            return MultiPoly.var(self.vars, tok.text)
        if self.accept("("):
            p = self.poly()
            self.expect(")")
            return p
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")


def parse(text: str, variables) -> Formula:
    """Parse ``text`` over the declared variable order, in negation normal form."""
    variables = tuple(variables)
    p = _Parser(text, variables)
    f = p.formula()
    if p.tok.kind != "end":
        raise p.error(f"unexpected {p.tok.text!r} after the formula")
    return nnf(f)


def parse_poly(text: str, variables) -> MultiPoly:
    variables = tuple(variables)
    p = _Parser(text, variables)
    out = p.poly()
    if p.tok.kind != "end":
        raise p.error(f"unexpected {p.tok.text!r} after the polynomial")
    return out
