"""Sign-invariant cylindrical algebraic decomposition.

Projection is the Hong improvement of the Collins operator: leading
coefficients and principal subresultant coefficients of every reductum with
its derivative, and of every reductum of ``f`` with every later ``g``.
Lifting isolates the real roots of each level's polynomials over each cell's
sample point.  Cells carry a bit index (``0`` section, ``1`` sector), a
per-level description by indexed roots, a sign signature and named truth
flags.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable

from .algebraic import AlgebraicPoint, LiftRoot
from .formula import (
    FALSE,
    TRUE,
    Atom,
    Formula,
    RootAtom,
    conj,
    disj,
    evaluate_at,
    polynomials_of,
)
from .numeric import (
    RealAlgebraic,
    rational_above,
    rational_below,
    rational_between,
    rational_str,
    ran_compare,
    ZERO,
)
from .poly import MultiPoly, content, full_squarefree, psc_sequence


class NoFiniteBound(ValueError):
    """Requested top or bottom of a cell that is unbounded on that side."""


# ---------------------------------------------------------------------------
# projection

_PSC_CACHE: dict = {}


def poly_order_key(p: MultiPoly):
    lv = p.level()
    main = p.degree(lv - 1) if lv else 0
    return (main, p.total_degree(), len(p.terms), str(p))


def reducta(f: MultiPoly, i: int) -> list[MultiPoly]:
    """Reducta of positive degree, stopping after a constant leading coefficient."""
    out = []
    g = f
    while not g.is_zero() and g.degree(i) >= 1:
        out.append(g)
        lc = g.leading_coefficient(i)
        if lc.is_constant():
            break
        g = g - lc * MultiPoly.var(g.variables, g.variables[i]) ** g.degree(i)
    return out


def _psc(p: MultiPoly, q: MultiPoly, i: int) -> list[MultiPoly]:
    key = (p.key(), q.key(), i)
    hit = _PSC_CACHE.get(key)
    if hit is None:
        hit = psc_sequence(p, q, i)
        _PSC_CACHE[key] = hit
    return hit


def split_factors(p: MultiPoly) -> list[MultiPoly]:
    """Primitive squarefree pieces of ``p``, one per level (contents split off)."""
    out = []
    while not p.is_constant():
        lv = p.level()
        c = content(p, lv - 1)
        pp = p.exquo(c) if not c.is_constant() else p
        out.append(full_squarefree(pp))
        p = c
    return out


def normalize_family(polys: Iterable[MultiPoly]) -> dict[int, dict]:
    """Split a family into primitive squarefree pieces grouped by level."""
    levels: dict[int, dict] = {}
    for p in polys:
        if p.is_constant():
            continue
        for q in split_factors(p):
            levels.setdefault(q.level(), {})[q.key()] = q
    return levels


def project(polys: Iterable[MultiPoly], k: int) -> list[MultiPoly]:
    """Projection of level-``k`` polynomials (1-based) into the earlier variables.

    Polynomials not involving ``x_k`` pass through unchanged; output pieces
    are primitive, squarefree, deduplicated and nonconstant.
    """
    i = k - 1
    raw = []
    family = []
    for p in polys:
        if p.is_constant():
            continue
        if p.degree(i) <= 0:
            raw.append(p)
        else:
            family.append(p)
    family.sort(key=poly_order_key)
    red = {f.key(): reducta(f, i) for f in family}
    for f in family:
        for g in red[f.key()]:
            raw.append(g.leading_coefficient(i))
            if g.degree(i) >= 2:
                raw.extend(_psc(g, g.derivative(i), i))
    for a, f in enumerate(family):
        for g in family[a + 1:]:
            for fr in red[f.key()]:
                raw.extend(_psc(fr, g, i))
    out: dict = {}
    for lv, ps in normalize_family(raw).items():
        out.update(ps)
    return sorted(out.values(), key=poly_order_key)


def projection_sets(polys: Iterable[MultiPoly], n: int) -> list[list[MultiPoly]]:
    """Level sets ``P_1 .. P_n`` of the full projection closure."""
    levels = normalize_family(polys)
    for k in range(n, 1, -1):
        for q in project(levels.get(k, {}).values(), k):
            levels.setdefault(q.level(), {})[q.key()] = q
    return [sorted(levels.get(k, {}).values(), key=poly_order_key) for k in range(1, n + 1)]


# ---------------------------------------------------------------------------
# cells


@dataclass(frozen=True)
class Bound:
    """The ``ordinal``-th real root (from below, from 1) of ``poly`` over the base."""

    poly: MultiPoly
    ordinal: int

    def to_json(self) -> dict:
        return {"poly": str(self.poly), "root": self.ordinal}


@dataclass(frozen=True)
class LevelDescription:
    kind: str  # "section" or "sector"
    lower: Bound | None = None
    upper: Bound | None = None

    @property
    def bound(self) -> Bound:
        return self.lower

    def to_json(self) -> dict:
        if self.kind == "section":
            return {"type": "section", **self.lower.to_json()}
        return {
            "type": "sector",
            "lower": self.lower.to_json() if self.lower else None,
            "upper": self.upper.to_json() if self.upper else None,
        }


class Cell:
    """A cell of a cylindrical decomposition."""

    __slots__ = (
        "index",
        "sample",
        "description",
        "signature",
        "flags",
        "parent",
        "children",
        "id",
        "origin",
        "_formula",
        "_linear",
        "_root_stack",
        "variables",
    )

    def __init__(self, index, sample, description, signature, parent=None):
        self.index: tuple[int, ...] = tuple(index)
        self.sample: AlgebraicPoint = sample
        self.description: tuple[LevelDescription, ...] = tuple(description)
        self.signature: tuple[int, ...] = tuple(signature)
        self.flags: dict[str, bool] = {}
        self.parent: Cell | None = parent
        self.children: list[Cell] = []
        self.id = -1
        self.origin: int | None = None
        self._formula = None
        self._linear = {}
        self._root_stack = None
        self.variables: tuple[str, ...] | None = None

    @property
    def level(self) -> int:
        return len(self.index)

    @property
    def dimension(self) -> int:
        return sum(self.index)

    def is_section(self) -> bool:
        return self.index[-1] == 0

    def siblings(self) -> list[Cell]:
        return self.parent.children if self.parent is not None else self._root_stack

    def neighbor(self, offset: int) -> Cell | None:
        """The cell ``offset`` places above in the same stack, if any."""
        stack = self.siblings()
        i = next(j for j, c in enumerate(stack) if c is self) + offset
        return stack[i] if 0 <= i < len(stack) else None

    def __repr__(self) -> str:
        return f"Cell({self.index}, {self.sample!r})"


def _merge_roots(found: list[tuple[LiftRoot, Bound, int]]):
    """Sort roots and group equal ones; keep the preferred bound per group."""
    found.sort(key=functools.cmp_to_key(lambda a, b: ran_compare(a[0].value, b[0].value) or a[2] - b[2]))
    groups: list[list] = []
    for item in found:
        if groups and ran_compare(groups[-1][0][0].value, item[0].value) == 0:
            groups[-1].append(item)
        else:
            groups.append([item])
    out = []
    for g in groups:
        best = min(g, key=lambda t: t[2])
        root = min(g, key=lambda t: len(t[0].factor))[0]
        out.append((root, best[1]))
    return out


def stack_roots(sample: AlgebraicPoint, polys: list[MultiPoly]) -> list[tuple[LiftRoot, Bound]]:
    """Distinct real roots of ``polys`` over ``sample``, each with its preferred bound."""
    found = []
    for rank, p in enumerate(polys):
        rs = sample.roots(p)
        if not rs:
            continue
        for j, r in enumerate(rs):
            found.append((r, Bound(p, j + 1), rank))
    return _merge_roots(found)


def stack_samples(sample: AlgebraicPoint, polys: list[MultiPoly], sections: bool = True):
    """``(bit, point, description)`` for each cell of the stack over ``sample``."""
    roots = stack_roots(sample, polys)
    if not roots:
        yield 1, sample.extend_rational(ZERO), LevelDescription("sector")
        return
    yield 1, sample.extend_rational(rational_below(roots[0][0].value)), LevelDescription("sector", None, roots[0][1])
    for a, (r, b) in enumerate(roots):
        if sections:
            yield 0, sample.extend_root(r), LevelDescription("section", b)
        if a + 1 < len(roots):
            r2, b2 = roots[a + 1]
            q = rational_between(r.value, r2.value)
            yield 1, sample.extend_rational(q), LevelDescription("sector", b, b2)
    yield 1, sample.extend_rational(rational_above(roots[-1][0].value)), LevelDescription("sector", roots[-1][1], None)


def lift_stack(
    base: Cell | None, sample: AlgebraicPoint, polys: list[MultiPoly], signature_polys: list[MultiPoly]
) -> list[Cell]:
    """The stack over a cell with sample ``sample`` for the given polynomials."""
    prefix = base.index if base else ()
    desc = base.description if base else ()
    cells = []
    for bit, pt, d in stack_samples(sample, polys):
        sig = tuple(pt.sign(p) for p in signature_polys) if signature_polys else ()
        cells.append(Cell(prefix + (bit,), pt, desc + (d,), sig, base))
    return cells


class Decomposition:
    """A complete sign-invariant CAD of R^n with its projection sets."""

    def __init__(self, variables, levels: list[list[MultiPoly]], base: list[Cell]):
        self.variables = tuple(variables)
        self.levels = levels
        self.base = base
        for c in base:
            c._root_stack = base
        self._by_level: list[list[Cell]] = []
        layer = base
        while layer:
            self._by_level.append(layer)
            layer = [c for cell in layer for c in cell.children]
        for layer in self._by_level:
            for i, c in enumerate(layer):
                c.id = i
                c.variables = self.variables

    @property
    def n(self) -> int:
        return len(self.variables)

    def cells(self, level: int | None = None) -> list[Cell]:
        """Cells of the given level (default: top level), bottom-to-top, level order."""
        lv = self.n if level is None else level
        return list(self._by_level[lv - 1])

    def all_cells(self) -> list[Cell]:
        return [c for layer in self._by_level for c in layer]

    def polynomials(self) -> list[MultiPoly]:
        return [p for ps in self.levels for p in ps]

    def max_degree(self) -> int:
        return max((p.total_degree() for p in self.polynomials()), default=0)

    def cells_with_index(self, prefix, last: int) -> list[Cell]:
        want = tuple(prefix) + (last,)
        return [c for c in self.cells() if c.index == want]

    def tag(self, name: str, f: Formula) -> None:
        for c in self.cells():
            c.flags[name] = evaluate_at(f, c.sample)

    def flagged(self, name: str) -> list[Cell]:
        return [c for c in self.cells() if c.flags.get(name)]

    def locate(self, point: AlgebraicPoint, level: int | None = None) -> Cell:
        """The cell of the given level containing ``point``."""
        lv = self.n if level is None else level
        stack = self.base
        cell = None
        for k in range(lv):
            cell = _find_in_stack(stack, point, k)
            stack = cell.children
        return cell

    def to_json(self) -> dict:
        return decomposition_to_json(self)


def _compare_with_bound(point: AlgebraicPoint, k: int, b: Bound) -> int:
    roots = point.prefix(k).roots(b.poly)
    if roots is None or len(roots) < b.ordinal:
        raise AssertionError("point lies outside the base cell of a section")
    return ran_compare(point.reals[k], roots[b.ordinal - 1].value)


def _find_in_stack(stack: list[Cell], point: AlgebraicPoint, k: int) -> Cell:
    lo, hi = 0, len(stack) // 2  # sections sit at odd positions 1, 3, ..
    # binary search over sections
    while lo < hi:
        mid = (lo + hi) // 2
        sec = stack[2 * mid + 1]
        c = _compare_with_bound(point, k, sec.description[k].lower)
        if c == 0:
            return sec
        if c < 0:
            hi = mid
        else:
            lo = mid + 1
    return stack[2 * lo]


def build_cad(polys: Iterable[MultiPoly], variables) -> Decomposition:
    """Sign-invariant CAD of R^n for ``polys`` (any levels)."""
    variables = tuple(variables)
    n = len(variables)
    polys = [p.rebase(variables) if p.variables != variables else p for p in polys]
    levels = projection_sets(polys, n)
    origin = AlgebraicPoint.origin()
    base = lift_stack(None, origin, levels[0], levels[0])
    layer = base
    for k in range(1, n):
        nxt = []
        for cell in layer:
            cell.children = lift_stack(cell, cell.sample, levels[k], levels[k])
            nxt.extend(cell.children)
        layer = nxt
    return Decomposition(variables, levels, base)


def trivial_cad(variables) -> Decomposition:
    return build_cad([], variables)


def refine_with(D: Decomposition, G: Formula, name: str | None = None) -> Decomposition:
    """A CAD compatible with ``G`` and with every cell of ``D``.

    Truth flags of ``D`` are inherited through the containing cell, which is
    also recorded as ``origin`` (its position among ``D``'s top cells).
    """
    from .formula import Quantified

    if isinstance(G, Quantified):
        raise ValueError("refinement needs a quantifier-free formula")
    extra = [p.rebase(D.variables) if p.variables != D.variables else p for p in polynomials_of(G)]
    E = build_cad(D.polynomials() + extra, D.variables)
    for c in E.cells():
        host = D.locate(c.sample)
        c.origin = host.id
        c.flags = dict(host.flags)
        if name is not None:
            c.flags[name] = evaluate_at(G, c.sample)
    return E


# ---------------------------------------------------------------------------
# cell descriptions


def _linear_sign(cell: Cell, k: int, p: MultiPoly) -> int:
    """Sign of the main coefficient if ``p`` is linear in ``x_k`` over the base, else 0."""
    key = (k, p.key())
    if key not in cell._linear:
        spec = cell.sample.prefix(k).specialize(p)
        s = 0
        if len(spec) == 2:
            s = cell.sample.field.sign(spec[1])
        cell._linear[key] = s
    return cell._linear[key]


def _bound_atom(cell: Cell, k: int, b: Bound, rel: str) -> Formula:
    s = _linear_sign(cell, k, b.poly)
    if s:
        return Atom(b.poly if s > 0 else -b.poly, rel)
    return RootAtom(b.poly.variables[k], rel, b.ordinal, b.poly)


def level_formula(cell: Cell, k: int) -> Formula:
    d = cell.description[k]
    if d.kind == "section":
        return _bound_atom(cell, k, d.lower, "=")
    parts = []
    if d.lower is not None:
        parts.append(_bound_atom(cell, k, d.lower, ">"))
    if d.upper is not None:
        parts.append(_bound_atom(cell, k, d.upper, "<"))
    return conj(*parts)


def cell_to_formula(cell: Cell) -> Formula:
    """Extended formula satisfied exactly by the points of ``cell``."""
    if cell._formula is None:
        cell._formula = conj(*(level_formula(cell, k) for k in range(cell.level)))
    return cell._formula


def _run_formula(stack: list[Cell], i: int, j: int, k: int) -> Formula:
    """Description at level ``k`` of the consecutive stack cells ``i..j``."""
    if i == j:
        return level_formula(stack[i], k)
    first, last = stack[i], stack[j]
    parts = []
    d = first.description[k]
    if d.kind == "section":
        parts.append(_bound_atom(first, k, d.lower, ">="))
    elif d.lower is not None:
        parts.append(_bound_atom(first, k, d.lower, ">"))
    d = last.description[k]
    if d.kind == "section":
        parts.append(_bound_atom(last, k, d.lower, "<="))
    elif d.upper is not None:
        parts.append(_bound_atom(last, k, d.upper, "<"))
    return conj(*parts)


def union_formula(stack: list[Cell], chosen, depth: int) -> Formula:
    """Compact description of the union of the chosen cells of level ``depth``.

    ``stack`` is a stack of a (possibly partially lifted) stack tree;
    ``chosen(cell)`` selects top cells.  Consecutive cells whose parts above
    are described identically are merged into one interval.
    """
    if not stack:
        return FALSE
    k = stack[0].level - 1
    profiles = []
    for c in stack:
        if c.level == depth:
            profiles.append(TRUE if chosen(c) else FALSE)
        else:
            profiles.append(union_formula(c.children, chosen, depth))
    parts = []
    i = 0
    while i < len(stack):
        if profiles[i] == FALSE:
            i += 1
            continue
        j = i
        while j + 1 < len(stack) and profiles[j + 1] == profiles[i]:
            j += 1
        parts.append(conj(_run_formula(stack, i, j, k), profiles[i]))
        i = j + 1
    return disj(*parts)


def base_formula(cell: Cell, k: int) -> Formula:
    """Description of the projection of ``cell`` onto the first ``k`` variables."""
    return conj(*(level_formula(cell, j) for j in range(k)))


def _graph(cell: Cell, k: int, b: Bound | None) -> Formula:
    if b is None:
        raise NoFiniteBound("the cell has no finite bound on that side")
    return conj(base_formula(cell, k), _bound_atom(cell, k, b, "="))


def top(cell: Cell, closure=None) -> Formula:
    """Top of a cell: the upper bounding graph of a sector, or for a section
    the part of its closure over the top of the last sector level below."""
    return _top_bottom(cell, "upper", closure)


def bottom(cell: Cell, closure=None) -> Formula:
    return _top_bottom(cell, "lower", closure)


def _top_bottom(cell: Cell, side: str, closure) -> Formula:
    n = cell.level
    if cell.index[-1] == 1:
        d = cell.description[-1]
        return _graph(cell, n - 1, getattr(d, side))
    ks = [k for k in range(n) if cell.index[k] == 1]
    if not ks:
        raise NoFiniteBound("a point cell has no top or bottom")
    k = ks[-1]
    d = cell.description[k]
    graph = _graph(cell, k, getattr(d, side))
    if closure is None:
        from .frontier import closure as closure_of
        closure = closure_of
    return conj(closure(cell_to_formula(cell), _vars(cell)), graph)


def _vars(cell: Cell) -> tuple[str, ...]:
    if cell.variables is not None:
        return cell.variables[: cell.level]
    for d in cell.description:
        if d.lower is not None:
            return d.lower.poly.variables
        if d.upper is not None:
            return d.upper.poly.variables
    raise ValueError("cell description carries no variables")


# ---------------------------------------------------------------------------
# JSON


def real_to_json(r: RealAlgebraic):
    if r.is_rational():
        return rational_str(r.rational())
    from .numeric import render_poly1

    lo, hi = r.interval
    return {"poly": render_poly1(r.poly), "interval": [rational_str(lo), rational_str(hi)]}


def cell_to_json(cell: Cell, variables) -> dict:
    out = {
        "id": cell.id,
        "level": cell.level,
        "index": list(cell.index),
        "sample": [real_to_json(r) for r in cell.sample.reals],
        "description": [d.to_json() for d in cell.description],
        "signature": list(cell.signature),
        "flags": dict(sorted(cell.flags.items())),
        "formula": str(cell_to_formula(cell)),
    }
    if cell.origin is not None:
        out["origin"] = cell.origin
    return out


def decomposition_to_json(D: Decomposition) -> dict:
    return {
        "variables": list(D.variables),
        "dimension": D.n,
        "polynomials": [[str(p) for p in ps] for ps in D.levels],
        "cells": [cell_to_json(c, D.variables) for c in D.all_cells()],
    }
