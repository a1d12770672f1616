import random
from fractions import Fraction as F

import pytest

from fccad.algebraic import AlgebraicPoint
from fccad.cad import (
    NoFiniteBound,
    RootAtom,
    bottom,
    build_cad,
    cell_to_formula,
    decomposition_to_json,
    project,
    refine_with,
    top,
    trivial_cad,
)
from fccad.formula import TRUE, Atom, disj, evaluate_at, parse, parse_poly
from fccad.frontier import closure

from helpers import disagreements, point_in_cell, rational_probes

V2 = ("x", "y")
V3 = ("x", "y", "z")
S_TEXT = "(-1<x /\\ x<1) /\\ (y>x /\\ y>-x /\\ y<1) /\\ ((y*z-x=0 /\\ x>=0) \\/ (y*z+x=0 /\\ x<=0))"
S_T = "-1 < x /\\ x < 1 /\\ y = 1 /\\ (z = x /\\ x >= 0 \\/ z = -x /\\ x < 0)"


def P(text, variables=V2):
    return parse_poly(text, variables)


def _same_up_to_unit(p, q) -> bool:
    return p.canonical() == q.canonical()


def test_projection_of_the_circle():
    out = project([P("x^2 + y^2 - 1")], 2)
    assert any(_same_up_to_unit(p, P("x^2 - 1")) for p in out)


def test_projection_of_a_line_is_trivial():
    assert project([P("y - x")], 2) == []
    assert project([], 2) == []


def test_build_cad_examples():
    D = build_cad([parse_poly("x^2 - 2", ("x",))], ("x",))
    assert [c.index for c in D.cells()] == [(1,), (0,), (1,), (0,), (1,)]
    assert [c.index for c in trivial_cad(("x",)).cells()] == [(1,)]
    C = build_cad([P("x^2 + y^2 - 1")], V2)
    assert len(C.cells()) == 13
    assert [len(b.children) for b in C.cells(1)] == [1, 3, 5, 3, 1]


def test_refine_with_examples():
    D = build_cad([P("x^2 + y^2 - 1")], V2)
    E = refine_with(D, TRUE)
    assert [c.index for c in E.cells()] == [c.index for c in D.cells()]
    assert [c.sample.floats() for c in E.cells()] == [c.sample.floats() for c in D.cells()]
    R = refine_with(trivial_cad(("x",)), parse("x > 0", ("x",)), "G")
    assert len(R.cells()) == 3
    assert [c.flags["G"] for c in R.cells()] == [False, False, True]


def test_refine_with_rejects_quantifiers():
    with pytest.raises(ValueError):
        refine_with(trivial_cad(V2), parse("E y. y > x", V2))


def test_refinement_is_compatible_with_input_cells():
    D = build_cad([P("x^2 + y^2 - 1")], V2)
    E = refine_with(D, parse("y - x > 0", V2))
    formulas = [cell_to_formula(c) for c in D.cells()]
    for c in E.cells():
        hits = [i for i, f in enumerate(formulas) if evaluate_at(f, c.sample)]
        assert hits == [c.origin]


def test_cell_to_formula_examples():
    (only,) = trivial_cad(("x",)).cells()
    assert cell_to_formula(only) == TRUE
    D = build_cad([parse_poly("x^2 - 2", ("x",))], ("x",))
    f = cell_to_formula(D.cells()[3])
    assert isinstance(f, RootAtom) and f.rel == "=" and f.ordinal == 2


def test_example_set_is_a_union_of_flagged_cells():
    S = parse(S_TEXT, V3)
    D = refine_with(trivial_cad(V3), S, "S")
    union = disj(*(cell_to_formula(c) for c in D.flagged("S")))
    assert disagreements(S, union, rational_probes(4, 3, 300)) == []
    on_s = [AlgebraicPoint.from_rationals([F(x, 8), F(y, 8), F(abs(x), y)]) for x in range(-7, 8) for y in range(1, 8) if abs(x) < y]
    assert all(evaluate_at(S, p) and evaluate_at(union, p) for p in on_s)


@pytest.mark.parametrize(
    "polys, variables",
    [
        (["x^2 + y^2 - 1"], V2),
        (["y^2 - x^3", "x*y - 1"], V2),
        (["x*y*z - 1", "z^2 + x - y"], V3),
    ],
)
def test_partition_and_sign_invariance(polys, variables):
    D = build_cad([parse_poly(p, variables) for p in polys], variables)
    formulas = [cell_to_formula(c) for c in D.cells()]
    for pt in rational_probes(8, len(variables), 200):
        assert sum(evaluate_at(f, pt) for f in formulas) == 1
    rng = random.Random(1)
    flat = D.polynomials()
    for c, f in zip(D.cells(), formulas):
        want = [c.sample.sign(p) for p in flat]
        assert evaluate_at(f, c.sample)
        for _ in range(20 if len(variables) == 2 else 4):
            pt = point_in_cell(c, rng)
            assert evaluate_at(f, pt)
            assert [pt.sign(p) for p in flat] == want


def test_induced_decomposition():
    D = build_cad([parse_poly("x*y*z - 1", V3), parse_poly("x^2 + y^2 + z^2 - 4", V3)], V3)
    for k in (1, 2):
        lower = D.cells(k)
        upper = D.cells(k + 1)
        assert [c.parent for c in upper if c.parent is not None] == [b for b in lower for _ in b.children]
        for b in lower:
            bits = [c.index[-1] for c in b.children]
            assert bits[0] == 1 and bits[-1] == 1
            assert all(u != v for u, v in zip(bits, bits[1:]))
            assert all(c.index[:-1] == b.index for c in b.children)


def test_locate_matches_formulas():
    D = build_cad([P("x^2 + y^2 - 1"), P("y - x")], V2)
    formulas = [cell_to_formula(c) for c in D.cells()]
    for pt in rational_probes(2, 2, 100):
        c = D.locate(pt)
        assert evaluate_at(formulas[c.id], pt)


def test_bottom_of_disk_sector_is_lower_arc():
    D = build_cad([P("x^2 + y^2 - 1")], V2)
    (sector,) = [c for c in D.cells() if c.index == (1, 1) and evaluate_at(parse("x^2 + y^2 < 1", V2), c.sample)]
    b = bottom(sector)
    arc = parse("x^2 + y^2 = 1 /\\ y < 0", V2)
    pts = [point_in_cell(c, random.Random(3)) for c in D.cells() for _ in range(3)]
    assert disagreements(b, arc, pts + [c.sample for c in D.cells()]) == []
    roots = [a for a in _atoms(b) if isinstance(a, RootAtom)]
    assert roots and roots[0].ordinal == 1


def _atoms(f):
    if isinstance(f, (Atom, RootAtom)):
        yield f
    for a in getattr(f, "args", ()):
        yield from _atoms(a)


def test_unbounded_sides_and_points():
    (whole,) = trivial_cad(("x",)).cells()
    with pytest.raises(NoFiniteBound):
        top(whole)
    with pytest.raises(NoFiniteBound):
        bottom(whole)
    D = build_cad([P("x"), P("y")], V2)
    origin = [c for c in D.cells() if c.index == (0, 0)][0]
    with pytest.raises(NoFiniteBound, match="point cell"):
        top(origin)


def test_cells_with_index():
    D = refine_with(trivial_cad(V3), parse(S_TEXT, V3), "S")
    assert all(c.index == (1, 1, 1) for c in D.cells_with_index((1, 1), 1))
    assert len(D.cells_with_index((1, 1), 1)) + len(D.cells_with_index((1, 1), 0)) == sum(
        1 for c in D.cells() if c.index[:2] == (1, 1)
    )
    assert build_cad([], V2).cells_with_index((0,), 0) == []


def test_top_of_example_set_pieces():
    S = parse(S_TEXT, V3)
    D = refine_with(trivial_cad(V3), S, "S")
    pieces = D.flagged("S")
    tops = disj(*(top(c, closure) for c in pieces))
    on_top = [AlgebraicPoint.from_rationals([F(x, 8), 1, F(abs(x), 8)]) for x in range(-7, 8)]
    off = [AlgebraicPoint.from_rationals([F(x, 8), 1, F(abs(x), 8) + F(1, 16)]) for x in range(-7, 8)]
    assert all(evaluate_at(tops, p) for p in on_top)
    assert not any(evaluate_at(tops, p) for p in off)
    assert disagreements(tops, parse(S_T, V3), rational_probes(6, 3, 300) + on_top) == []


def test_json_export_is_deterministic():
    D = build_cad([P("x^2 + y^2 - 1")], V2)
    a, b = decomposition_to_json(D), decomposition_to_json(build_cad([P("x^2 + y^2 - 1")], V2))
    assert a == b
    cell = a["cells"][-1]
    assert set(cell) >= {"level", "index", "sample", "description", "signature", "flags"}
