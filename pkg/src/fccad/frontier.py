"""Frontier and closure of semialgebraic sets.

``fr(S) = cl(S) \\ S`` is available by two independent routes.

``method="reference"`` eliminates the quantifiers of
``not S(x) and forall e > 0 exists y (S(y) and |x - y|^2 < e^2)`` with the
generic CAD engine.  It needs ``2n + 1`` variables and is only practical for
small ``n <= 2`` instances.

``method="fast"`` (the default) decomposes ``S`` and works cell by cell.  For
a cell ``C`` over the base cell ``B``, ``cl(C)`` meets the cylinder over ``B``
only in ``C`` and, for a sector, its bounding graphs; everything else lies
over ``fr(B)``, which is found recursively.  Membership in ``cl(C)`` over
``fr(B)`` is decided exactly by :class:`ClosureOracle`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebraic import AlgebraicPoint
from .cad import (
    Cell,
    NoFiniteBound,
    bottom,
    build_cad,
    cell_to_formula,
    lift_stack,
    normalize_family,
    poly_order_key,
    project,
    projection_sets,
    stack_samples,
    top,
    union_formula,
)
from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Formula,
    Or,
    Quantified,
    conj,
    disj,
    evaluate_at,
    neg,
    nnf,
    partial_eval,
    polynomials_of,
    rebase,
    rename,
)
from .numeric import fmpq
from .poly import MultiPoly
from .qe import PrenexTask, qe


def _fresh(variables: tuple[str, ...]) -> tuple[str, tuple[str, ...]]:
    taken = set(variables)
    e = "_e"
    while e in taken:
        e += "_"
    ys = []
    for v in variables:
        y = f"_y_{v}"
        while y in taken:
            y += "_"
        ys.append(y)
    return e, tuple(ys)


def _check_input(S: Formula) -> None:
    if isinstance(S, Quantified):
        raise ValueError("frontier needs a quantifier-free formula")


# ---------------------------------------------------------------------------
# reference route


def frontier_reference(S: Formula, variables) -> Formula:
    """``fr(S)`` through generic quantifier elimination."""
    _check_input(S)
    variables = tuple(variables)
    e, ys = _fresh(variables)
    allvars = variables + (e,) + ys
    Sy = rename(S, ys, allvars)
    ev = MultiPoly.var(allvars, e)
    dist = MultiPoly.constant(allvars, 0)
    for x, y in zip(variables, ys):
        dist = dist + (MultiPoly.var(allvars, x) - MultiPoly.var(allvars, y)) ** 2
    matrix = disj(Atom(ev, "<="), conj(Sy, Atom(dist - ev**2, "<")))
    task = PrenexTask(allvars, ("A",) + ("E",) * len(ys), matrix)
    cl = qe(task)
    return conj(neg(rebase(S, variables)), rebase(cl, variables))


# ---------------------------------------------------------------------------
# exact closure test


def _eps_coefficients(q: MultiPoly, i: int) -> list[MultiPoly]:
    """Coefficients of ``q`` in variable ``i`` up to the first nonzero constant."""
    out = []
    for c in q.coefficients(i):
        out.append(c)
        if c.is_constant() and not c.is_zero():
            break
    return out


def small_eps(point: AlgebraicPoint, coeff_lists: list[list[MultiPoly]]) -> fmpq:
    """A dyadic ``e`` with no root of any listed polynomial in ``(0, e]`` over ``point``.

    Each list holds the coefficients ``c_0, c_1, ..`` of a polynomial in ``e``.
    With ``c_k`` the first coefficient not vanishing at the point and
    ``0 < e < 1``, the tail is at most ``e^(k+1) * sum |c_j|``, so
    ``e < |c_k| / sum |c_j|`` leaves the sign of ``c_k`` in charge.
    """
    K = point.field
    eps = fmpq(1, 2)
    for cs in coeff_lists:
        vals = [point.evaluate(c) for c in cs]
        k = next((j for j, v in enumerate(vals) if K.sign(v) != 0), None)
        if k is None:
            continue
        lo, hi = K.enclosure(vals[k])  # sign() left it clear of zero
        low = min(abs(lo), abs(hi))
        tail = fmpq(0)
        for v in vals[k + 1:]:
            a, b = K.enclosure(v)
            tail += max(abs(a), abs(b))
        if tail == 0:
            continue
        bound = low / tail
        while eps >= bound:
            eps /= 2
    return eps


class ClosureOracle:
    """Decides ``x in cl(T)`` for a quantifier-free ``T`` over ``R^n``.

    The test is ``exists y (T(y) and |x_i - y_i| < e for all i)`` for small
    ``e > 0``.  Projecting away ``y`` leaves polynomials in ``(x, e)``; on any
    connected set of ``x`` where all their ``e``-coefficients (``family``)
    have constant signs the answer is constant, and one ``e`` below every
    positive root decides it.
    """

    def __init__(self, T: Formula, variables: tuple[str, ...]):
        self.T = T
        self.vars = variables
        n = self.n = len(variables)
        e, ys = _fresh(variables)
        allvars = variables + (e,) + ys
        Ty = rename(T, ys, allvars)
        ev = MultiPoly.var(allvars, e)
        box = []
        for x, y in zip(variables, ys):
            d = MultiPoly.var(allvars, y) - MultiPoly.var(allvars, x)
            box += [Atom(d - ev, "<"), Atom(d + ev, ">")]
        self.matrix = conj(Ty, *box)
        levels = normalize_family(polynomials_of(self.matrix))
        for k in range(2 * n + 1, n + 1, -1):
            for q in project(levels.get(k, {}).values(), k):
                levels.setdefault(q.level(), {})[q.key()] = q
        self.ylevels = [sorted(levels.get(k, {}).values(), key=poly_order_key) for k in range(n + 2, 2 * n + 2)]
        eps_polys = sorted(levels.get(n + 1, {}).values(), key=poly_order_key)
        self.coeff_lists = [_eps_coefficients(q, n) for q in eps_polys]
        fam = [p for k in range(1, n + 1) for p in levels.get(k, {}).values()]
        fam += [c for cs in self.coeff_lists for c in cs]
        fam += polynomials_of(T)
        seen = {}
        for p in fam:
            if not p.is_constant():
                q = p.rebase(variables).canonical()
                seen.setdefault(q.key(), q)
        self.family = list(seen.values())

    def _exists(self, point: AlgebraicPoint) -> bool:
        v = partial_eval(self.matrix, point)
        if v is not None:
            return v
        k = len(point) - self.n - 1
        for _, pt, _ in stack_samples(point, self.ylevels[k]):
            if self._exists(pt):
                return True
        return False

    def __call__(self, x: AlgebraicPoint) -> bool:
        if evaluate_at(self.T, x):
            return True
        eps = small_eps(x, self.coeff_lists)
        return self._exists(x.extend_rational(eps))


_CLOSED = {"<": "<=", ">": ">=", "=": "=", "<=": "<=", ">=": ">="}


def closed_relaxation(f: Formula) -> Formula:
    """A closed set containing ``cl(f)``: every strict sign condition is relaxed.

    Root atoms are dropped (replaced by true), which keeps the result a superset.
    """

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return TRUE if g.rel == "!=" else Atom(g.poly, _CLOSED[g.rel])
        if isinstance(g, And):
            return conj(*(go(a) for a in g.args))
        if isinstance(g, Or):
            return disj(*(go(a) for a in g.args))
        if isinstance(g, Const):
            return g
        return TRUE

    return go(nnf(f))


def limit_cells(T: Formula, variables, over: Formula | None) -> LimitPart:
    """Cells of an auxiliary decomposition making up ``cl(T) \\ T`` above ``over``.

    ``over`` is a formula in the first ``n - 1`` variables (``None`` means
    everywhere).  Only the part of the auxiliary decomposition above it is
    lifted; its polynomials join the family so that it is a union of cells.
    """
    variables = tuple(variables)
    n = len(variables)
    oracle = ClosureOracle(T, variables)
    fam = list(oracle.family)
    if over is not None:
        fam += [p.rebase(variables) for p in polynomials_of(over)]
    # bounds from T itself come first so that merged pieces stay readable
    own = [q.key() for q in (p.rebase(variables).canonical() for p in polynomials_of(T))]
    rank = {key: i for i, key in enumerate(own)}
    levels = [
        sorted(ps, key=lambda p: (rank.get(p.key(), len(rank)), poly_order_key(p)))
        for ps in projection_sets(fam, n)
    ]
    # necessary for membership, and constant on the auxiliary cells
    relax = closed_relaxation(T)
    out: list[Cell] = []

    def lift(cell: Cell | None, sample: AlgebraicPoint, k: int) -> list[Cell]:
        stack = lift_stack(cell, sample, levels[k], [])
        for child in stack:
            child.variables = variables
            if partial_eval(relax, child.sample) is False:
                continue
            if k + 1 < n:
                if over is not None and partial_eval(over, child.sample) is False:
                    continue
                child.children = lift(child, child.sample, k + 1)
            elif not evaluate_at(T, child.sample) and oracle(child.sample):
                out.append(child)
        return stack

    roots = lift(None, AlgebraicPoint.origin(), 0)
    return LimitPart(roots, out, n)


@dataclass
class LimitPart:
    """Chosen top cells of a partially lifted auxiliary stack tree."""

    roots: list[Cell]
    cells: list[Cell]
    depth: int

    @property
    def formula(self) -> Formula:
        chosen = {id(c) for c in self.cells}
        return union_formula(self.roots, lambda c: id(c) in chosen, self.depth)

    @property
    def points(self) -> list[AlgebraicPoint]:
        return [c.sample for c in self.cells]


def frontier_direct(S: Formula, variables) -> Formula:
    """``fr(S)`` from one global auxiliary decomposition (no cell structure)."""
    _check_input(S)
    variables = tuple(variables)
    return limit_cells(rebase(S, variables), variables, None).formula


# ---------------------------------------------------------------------------
# cell frontiers


@dataclass
class CellFrontier:
    """``fr(C)`` split into the bounding graphs and the part over ``fr(B)``."""

    graphs: list[Formula]
    graph_points: list[AlgebraicPoint]
    limit_formula: Formula
    limit_points: list[AlgebraicPoint]

    @property
    def formula(self) -> Formula:
        return disj(*self.graphs, self.limit_formula)

    @property
    def points(self) -> list[AlgebraicPoint]:
        return self.graph_points + self.limit_points


_CELL_CACHE: dict = {}


def cell_frontier(cell: Cell) -> CellFrontier:
    """Frontier of a cell of a decomposition (uses its base cells)."""
    T = cell_to_formula(cell)
    variables = _cell_variables(cell)
    key = (T, variables)
    hit = _CELL_CACHE.get(key)
    if hit is not None:
        return hit
    graphs = []
    points = []
    if cell.index[-1] == 1:
        for side, off in ((bottom, -1), (top, 1)):
            try:
                graphs.append(rebase(side(cell), variables))
            except NoFiniteBound:
                continue
            points.append(cell.neighbor(off).sample)
    limit, limit_points = FALSE, []
    if cell.level > 1:
        over = cell_frontier(cell.parent).formula
        if over != FALSE:
            part = limit_cells(rebase(T, variables), variables, rebase(over, variables))
            limit, limit_points = part.formula, part.points
    hit = CellFrontier(graphs, points, limit, limit_points)
    _CELL_CACHE[key] = hit
    return hit


def _cell_variables(cell: Cell) -> tuple[str, ...]:
    if cell.variables is None:
        raise ValueError("cell does not belong to a decomposition")
    return cell.variables[: cell.level]


def frontier_of_cell(cell: Cell, variables, method: str = "fast") -> Formula:
    """``fr(C)`` as a formula over ``variables`` (all levels of the decomposition)."""
    variables = tuple(variables)
    if method == "fast":
        return rebase(cell_frontier(cell).formula, variables)
    return frontier(cell_to_formula(cell), variables, method)


@dataclass
class SetFrontier:
    formula: Formula
    points: list[AlgebraicPoint] = field(default_factory=list)


_SET_CACHE: dict = {}


def frontier_points(S: Formula, variables) -> SetFrontier:
    """Frontier of an arbitrary set through a decomposition adapted to it."""
    _check_input(S)
    variables = tuple(variables)
    key = (S, variables)
    hit = _SET_CACHE.get(key)
    if hit is not None:
        return hit
    S = rebase(S, variables)
    D = build_cad(polynomials_of(S), variables)
    D.tag("S", S)
    parts = []
    points = []
    for c in D.flagged("S"):
        cf = cell_frontier(c)
        parts.append(cf.formula)
        points.extend(p for p in cf.points if not evaluate_at(S, p))
    f = FALSE if not parts else nnf(conj(neg(S), disj(*parts)))
    hit = SetFrontier(rebase(f, variables) if f != FALSE else FALSE, points)
    _SET_CACHE[key] = hit
    return hit


def frontier(S: Formula, variables, method: str = "fast") -> Formula:
    """A formula satisfied exactly by ``cl(S) \\ S``.

    ``method`` is ``"fast"`` (cell-structured), ``"direct"`` (one global
    auxiliary decomposition) or ``"reference"`` (generic elimination).
    """
    if method == "fast":
        return frontier_points(S, variables).formula
    if method == "direct":
        return frontier_direct(S, variables)
    if method == "reference":
        return frontier_reference(S, variables)
    raise ValueError(f"unknown frontier method {method!r}")


def closure(S: Formula, variables, method: str = "fast") -> Formula:
    """A formula satisfied exactly by ``cl(S)``."""
    return disj(S, frontier(S, variables, method))


def clear_cache() -> None:
    _CELL_CACHE.clear()
    _SET_CACHE.clear()
