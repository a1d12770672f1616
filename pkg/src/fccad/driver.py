"""Refinement to the frontier condition and an independent checker.

The main loop walks the index prefixes of length ``n - 1`` from ``(1,..,1)``
down to ``(0,..,0)``.  At each prefix the frontiers of the cells with that
prefix are collected from the current decomposition, which is then refined
by them.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field

from .algebraic import AlgebraicPoint
from .cad import (
    Cell,
    Decomposition,
    build_cad,
    cell_to_formula,
    real_to_json,
    refine_with,
    trivial_cad,
)
from .formula import FALSE, Formula, disj, evaluate_at, parse, parse_poly, polynomials_of, rebase
from .frontier import cell_frontier, frontier_points
from .numeric import RealAlgebraic, as_integer_poly, to_rational


class InvariantError(AssertionError):
    """An internal property that the algorithm relies on does not hold."""


Prefix = tuple[int, ...]

log = logging.getLogger(__name__)


def decrement(M: Prefix) -> Prefix | None:
    """The lexicographic predecessor of ``M`` among 0/1 tuples of its length."""
    bits = list(M)
    i = len(bits) - 1
    while i >= 0 and bits[i] == 0:
        bits[i] = 1
        i -= 1
    if i < 0:
        return None
    bits[i] = 0
    return tuple(bits)


def prefixes(n: int) -> list[Prefix]:
    """All prefixes of length ``n - 1`` in descending order."""
    out = []
    M: Prefix | None = (1,) * (n - 1)
    while M is not None:
        out.append(M)
        M = decrement(M)
    return out


@dataclass
class FrontierSet:
    formula: Formula
    points: list[AlgebraicPoint]
    cells: int


def frontier_set(D: Decomposition, P: Prefix, check: bool = True) -> FrontierSet:
    """Frontiers of the ``(P, 0)`` sections and the non-graph frontier parts of the ``(P, 1)`` sectors.

    With ``check`` every known frontier point is located in ``D`` and must lie
    in a cell of index below ``(P, 0)``.
    """
    P = tuple(P)
    if len(P) != D.n - 1:
        raise ValueError(f"prefix must have length {D.n - 1}")
    parts: list[Formula] = []
    points: list[AlgebraicPoint] = []
    sections = D.cells_with_index(P, 0)
    sectors = D.cells_with_index(P, 1)
    for c in sections + sectors:
        t0 = time.perf_counter()
        cf = cell_frontier(c)
        if c.is_section():
            parts.append(cf.formula)
            points.extend(cf.points)
        else:
            parts.append(cf.limit_formula)
            points.extend(cf.limit_points)
        log.debug("cell %d %s: %.2fs", c.id, c.index, time.perf_counter() - t0)
    if check:
        check_below(D, points, P + (0,))
    f = disj(*parts)
    return FrontierSet(rebase(f, D.variables) if f != FALSE else FALSE, points, len(sections) + len(sectors))


def check_below(D: Decomposition, points, bound: Prefix) -> None:
    """Raise unless every point lies in a cell of index lexicographically below ``bound``."""
    for p in points:
        home = D.locate(p)
        if not home.index < tuple(bound):
            raise InvariantError(f"frontier point {p.floats()} lies in a cell of index {home.index}, not below {bound}")


@dataclass
class FCResult:
    decomposition: Decomposition
    iterations: list[dict]
    initial: Decomposition


def fc_algorithm(S: Formula, variables, *, timings: bool = False, check: bool = True) -> FCResult:
    """A CAD compatible with ``S`` whose cells satisfy the frontier condition.

    The flag ``"S"`` on the output cells records membership in ``S``.
    """
    variables = tuple(variables)
    S = rebase(S, variables)
    D = refine_with(trivial_cad(variables), S, "S")
    initial = D
    stats = []
    for P in prefixes(len(variables)):
        log.info("prefix %s: %d cells", P, len(D.cells()))
        t0 = time.perf_counter()
        F = frontier_set(D, P, check=check)
        before = {p.key() for p in D.polynomials()}
        D = refine_with(D, F.formula)
        fresh = sum(1 for p in D.polynomials() if p.key() not in before)
        stats.append(
            {
                "prefix": list(P),
                "newPolys": fresh,
                "cellsAfter": len(D.cells()),
                "polynomials": len(D.polynomials()),
                "maxDegree": D.max_degree(),
                "millis": round(1000 * (time.perf_counter() - t0)) if timings else None,
            }
        )
    return FCResult(D, stats, initial)


# ---------------------------------------------------------------------------
# checker


@dataclass
class CheckCell:
    """A cell as seen by the checker: its set, an interior sample and its index."""

    id: int
    index: tuple[int, ...]
    formula: Formula
    sample: AlgebraicPoint
    source: Cell | None = None

    def frontier(self, variables) -> tuple[Formula, list[AlgebraicPoint]]:
        if self.source is not None:
            cf = cell_frontier(self.source)
            return rebase(cf.formula, variables), cf.points
        sf = frontier_points(self.formula, variables)
        return sf.formula, sf.points


@dataclass
class Verdict:
    cell: int
    index: tuple[int, ...]
    satisfied: bool
    witness_cell: int | None = None
    witness_point: AlgebraicPoint | None = None

    def to_json(self) -> dict:
        out = {"cell": self.cell, "index": list(self.index)}
        if self.satisfied:
            out["verdict"] = "satisfied"
        else:
            out["verdict"] = "violated"
            out["witnessCell"] = self.witness_cell
            out["witnessPoint"] = [real_to_json(r) for r in self.witness_point.reals]
        return out


@dataclass
class FrontierReport:
    mode: str
    verdicts: list[Verdict]
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.satisfied for v in self.verdicts)

    @property
    def violations(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.satisfied]

    def to_json(self) -> dict:
        return {"mode": self.mode, "cells": [v.to_json() for v in self.verdicts], "stats": self.stats}


def cells_of(D: Decomposition) -> list[CheckCell]:
    return [CheckCell(c.id, c.index, cell_to_formula(c), c.sample, c) for c in D.cells()]


def real_from_json(value) -> RealAlgebraic:
    if isinstance(value, str):
        return RealAlgebraic.from_rational(to_rational(value))
    p = parse_poly(value["poly"], ("x",))
    lo, hi = (to_rational(s) for s in value["interval"])
    return RealAlgebraic(as_integer_poly(p.univariate_coeffs()), lo, hi)


def cells_from_json(data: dict) -> tuple[tuple[str, ...], list[CheckCell]]:
    """Top-level cells of an exported decomposition."""
    variables = tuple(data["variables"])
    n = len(variables)
    out = []
    for c in data["cells"]:
        if c["level"] != n:
            continue
        point = AlgebraicPoint.from_reals([real_from_json(v) for v in c["sample"]])
        out.append(CheckCell(c["id"], tuple(c["index"]), parse(c["formula"], variables), point))
    return variables, out


def _locate(cells: list[CheckCell], p: AlgebraicPoint) -> CheckCell | None:
    hits = [c for c in cells if evaluate_at(c.formula, p)]
    if len(hits) != 1:
        if not hits:
            return None
        raise InvariantError(f"point {p.floats()} lies in {len(hits)} cells")
    return hits[0]


def check_frontier_condition(
    D: Decomposition | tuple,
    mode: str = "symbolic",
    *,
    probes: int = 64,
    depth: int = 20,
    seed: int = 7,
    symbolic_limit: int = 2,
    only=None,
) -> FrontierReport:
    """Decide, per cell, whether its frontier is a union of cells.

    ``D`` is a decomposition or a pair ``(variables, cells)`` as returned by
    :func:`cells_from_json`.  The symbolic mode is exact; the sampling mode
    checks frontier points found by construction and by random probes.
    ``only`` restricts the verdicts to the cells with those ids.
    """
    if isinstance(D, Decomposition):
        variables, cells = D.variables, cells_of(D)
        stats = {"cells": len(cells), "polynomials": len(D.polynomials()), "maxDegree": D.max_degree()}
        locate = lambda p: _by_id(cells, D.locate(p).id)  # noqa: E731
    else:
        variables, cells = D
        stats = {"cells": len(cells)}
        locate = lambda p: _locate(cells, p)  # noqa: E731
    targets = cells if only is None else [c for c in cells if c.id in set(only)]
    n = len(variables)
    if mode == "symbolic":
        if n > symbolic_limit:
            raise ValueError(f"symbolic check is limited to n <= {symbolic_limit}")
        verdicts = _check_symbolic(variables, cells, targets, locate)
    elif mode == "sampling":
        verdicts = _check_sampling(variables, targets, locate, probes, depth, seed)
    else:
        raise ValueError(f"unknown checker mode {mode!r}")
    return FrontierReport(mode, verdicts, stats)


def _by_id(cells: list[CheckCell], i: int) -> CheckCell:
    c = cells[i]
    assert c.id == i
    return c


def _check_symbolic(variables, cells: list[CheckCell], targets: list[CheckCell], locate) -> list[Verdict]:
    frontiers = [c.frontier(variables)[0] for c in targets]
    # a common refinement of all cells and all frontiers decides every pair
    polys = [p for c in cells for p in polynomials_of(c.formula)]
    polys += [p for f in frontiers for p in polynomials_of(f)]
    R = build_cad(polys, variables)
    homes = []
    for r in R.cells():
        home = locate(r.sample)
        if home is None:
            raise InvariantError(f"point {r.sample.floats()} lies in no cell")
        homes.append(home)
    verdicts = []
    for c, fr in zip(targets, frontiers):
        inside: dict[int, AlgebraicPoint] = {}
        outside: set[int] = set()
        for r, home in zip(R.cells(), homes):
            if evaluate_at(fr, r.sample):
                inside.setdefault(home.id, r.sample)
            else:
                outside.add(home.id)
        bad = sorted(i for i in inside if i in outside)
        if bad:
            verdicts.append(Verdict(c.id, c.index, False, bad[0], inside[bad[0]]))
        else:
            verdicts.append(Verdict(c.id, c.index, True))
    return verdicts


def _random_points(rng: random.Random, n: int, count: int, depth: int) -> list[AlgebraicPoint]:
    scale = 1 << depth
    out = []
    for _ in range(count):
        vals = [to_rational(f"{rng.randint(-2 * scale, 2 * scale)}/{scale}") for _ in range(n)]
        out.append(AlgebraicPoint.from_rationals(vals))
    return out


def _check_sampling(variables, cells, locate, probes: int, depth: int, seed: int) -> list[Verdict]:
    rng = random.Random(seed)
    n = len(variables)
    verdicts = []
    for c in cells:
        fr, known = c.frontier(variables)
        found = list(known)
        if fr != FALSE:
            found += [p for p in _random_points(rng, n, probes, depth) if evaluate_at(fr, p)]
        verdict = Verdict(c.id, c.index, True)
        for p in found:
            if not evaluate_at(fr, p):
                raise InvariantError(f"constructed frontier point {p.floats()} misses the frontier formula")
            home = locate(p)
            if home is None:
                raise InvariantError(f"point {p.floats()} lies in no cell")
            if not evaluate_at(fr, home.sample):
                verdict = Verdict(c.id, c.index, False, home.id, p)
                break
        log.debug("checked cell %d %s: %d points, %s", c.id, c.index, len(found), "ok" if verdict.satisfied else "violated")
        verdicts.append(verdict)
    return verdicts
