"""Shared test utilities that do use the package (points, probes, comparison)."""

from __future__ import annotations

import random
from fractions import Fraction

from fccad.algebraic import AlgebraicPoint
from fccad.cad import Cell
from fccad.formula import Formula, evaluate_at
from fccad.numeric import RealAlgebraic, fmpq, rational_above, rational_below, rational_between

from oracles import random_points


def q(f: Fraction) -> fmpq:
    return fmpq(f.numerator, f.denominator)


def rational_probes(seed: int, n: int, count: int, lo=-2, hi=2, den: int = 64) -> list[AlgebraicPoint]:
    return [AlgebraicPoint.from_rationals([q(v) for v in p]) for p in random_points(seed, n, count, lo, hi, den)]


def _root(point: AlgebraicPoint, bound):
    return point.roots(bound.poly)[bound.ordinal - 1]


def point_in_cell(cell: Cell, rng: random.Random) -> AlgebraicPoint:
    """A random point of ``cell`` built level by level from its description."""
    pt = AlgebraicPoint.origin()
    for d in cell.description:
        if d.kind == "section":
            pt = pt.extend_root(_root(pt, d.lower))
            continue
        lo = _root(pt, d.lower).value if d.lower is not None else None
        hi = _root(pt, d.upper).value if d.upper is not None else None
        if lo is None and hi is None:
            v = fmpq(rng.randint(-64, 64), rng.choice([1, 2, 4, 8]))
        elif lo is None:
            v = rational_below(hi) - fmpq(rng.randint(0, 16), 4)
        elif hi is None:
            v = rational_above(lo) + fmpq(rng.randint(0, 16), 4)
        else:
            a = rational_between(lo, hi)
            lo_q = rational_between(lo, RealAlgebraic.from_rational(a))
            hi_q = rational_between(RealAlgebraic.from_rational(a), hi)
            t = fmpq(rng.randint(0, 64), 64)
            v = lo_q + t * (hi_q - lo_q)
        pt = pt.extend_rational(v)
    return pt


def disagreements(f: Formula, g: Formula, points) -> list[AlgebraicPoint]:
    return [p for p in points if evaluate_at(f, p) != evaluate_at(g, p)]


_CONNECTIVES = ["/\\", "\\/"]
_ATOM_POLYS_1 = ["y^2 - x", "x*y - 1", "y - x^2", "y^2 + x*y - 1", "2*y - x + 1", "y^3 - y - x"]
_ATOM_POLYS_2 = ["z^2 + y^2 - x", "x*z - y", "z - y^2", "y*z - 1", "z^2 - x*y", "y + z - x"]


def random_prenex_text(rng: random.Random) -> tuple[str, tuple[str, ...]]:
    """A random prenex task over 1-2 free and 1-2 quantified variables."""
    free = ("x",) if rng.random() < 0.5 else ("x", "w")
    two = rng.random() < 0.5
    bound = ("y", "z") if two else ("y",)
    pool = list(_ATOM_POLYS_1) + (list(_ATOM_POLYS_2) if two else [])
    if len(free) == 2:
        pool += ["y - w", "x + w*y", "w^2 - y"]
    atoms = [f"{rng.choice(pool)} {rng.choice(['<', '<=', '=', '>', '!='])} 0" for _ in range(rng.randint(1, 3))]
    body = atoms[0]
    for a in atoms[1:]:
        body = f"({body}) {rng.choice(_CONNECTIVES)} ({a})"
    prefix = " ".join(f"{rng.choice('AE')} {v}." for v in bound)
    return f"{prefix} {body}", free + bound
