import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fccad.algebraic import AlgebraicPoint
from fccad.formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    FormulaSyntaxError,
    Not,
    Or,
    Quantified,
    RootAtom,
    conj,
    desugar,
    disj,
    evaluate_at,
    evaluate_rational,
    neg,
    nnf,
    normalize,
    parse,
    parse_poly,
    partial_eval,
    polynomials_of,
)
from fccad.numeric import fmpq, isolate_roots

from oracles import random_points

V2 = ("x", "y")
V3 = ("x", "y", "z")
S_TEXT = "(-1<x /\\ x<1) /\\ (y>x /\\ y>-x /\\ y<1) /\\ ((y*z-x=0 /\\ x>=0) \\/ (y*z+x=0 /\\ x<=0))"


def test_conjunction_of_two_atoms():
    f = parse("x^2 + y^2 - 1 < 0 /\\ y > 0", V2)
    assert isinstance(f, And) and len(f.args) == 2
    assert all(isinstance(a, Atom) for a in f.args)


def test_prenex_existential():
    f = parse("E y. y^2 = x", V2)
    assert isinstance(f, Quantified) and f.blocks == (("E", ("y",)),)
    assert f.matrix == Atom(parse_poly("y^2 - x", V2), "=")


def test_example_set_polynomials():
    got = {str(p) for p in polynomials_of(parse(S_TEXT, V3))}
    want = {str(parse_poly(t, V3).canonical()) for t in ["x+1", "x-1", "y-x", "y+x", "y-1", "y*z-x", "y*z+x", "x"]}
    assert got == want


def test_polynomials_of_trivial_cases():
    assert polynomials_of(TRUE) == []
    assert len(polynomials_of(parse("x > 0 /\\ x = 0", ("x",)))) == 1


def test_literals():
    assert parse("true", ("x",)) == TRUE
    assert parse("~false", ("x",)) == TRUE
    assert conj(TRUE, FALSE) == FALSE and disj(FALSE, TRUE) == TRUE


def test_rational_literals_and_division():
    f = parse("x*3/4 - 1/2 >= 0", ("x",))
    assert evaluate_rational(f, [fmpq(2, 3)]) and not evaluate_rational(f, [fmpq(1, 2)])


@pytest.mark.parametrize(
    "text, message",
    [
        ("x > ", "unexpected"),
        ("x > 0 /\\ w < 1", "undeclared variable"),
        ("E x. x > y", "trailing variables"),
        ("x / y > 0", "nonzero constant"),
        ("x > 0 )", "unexpected"),
    ],
)
def test_syntax_errors(text, message):
    with pytest.raises(FormulaSyntaxError, match=message) as err:
        parse(text, V2)
    assert err.value.line == 1 and err.value.column >= 1


def test_error_position_on_later_line():
    with pytest.raises(FormulaSyntaxError) as err:
        parse("x > 0 /\\\n  y >> 1", V2)
    assert err.value.line == 2


def test_evaluate_examples():
    r2 = isolate_roots([-2, 0, 1])[1]
    assert evaluate_at(parse("x^2 - 2 = 0", ("x",)), AlgebraicPoint.from_reals([r2]))
    assert not evaluate_at(parse("x > 0", ("x",)), AlgebraicPoint.from_rationals([fmpq(-1, 3)]))


def test_root_atom_evaluation():
    f = parse("v = root(1, x*v - 1)", ("x", "v"))
    assert isinstance(f, RootAtom)
    assert evaluate_at(f, AlgebraicPoint.from_rationals([2, fmpq(1, 2)]))
    assert not evaluate_at(f, AlgebraicPoint.from_rationals([2, 1]))
    # no root over x = 0: the atom is false
    assert not evaluate_at(f, AlgebraicPoint.from_rationals([0, 0]))


def test_root_atom_ordinals():
    f = parse("y < root(2, y^2 - x)", V2)
    assert evaluate_at(f, AlgebraicPoint.from_rationals([4, 1]))
    assert not evaluate_at(f, AlgebraicPoint.from_rationals([4, 3]))


def test_unevaluated_quantifier_rejected():
    with pytest.raises(ValueError):
        evaluate_at(parse("E y. y = x", V2), AlgebraicPoint.from_rationals([0, 0]))


def test_partial_evaluation():
    f = parse("x > 0 /\\ y > 0", V2)
    assert partial_eval(f, AlgebraicPoint.from_rationals([-1])) is False
    assert partial_eval(f, AlgebraicPoint.from_rationals([1])) is None
    assert partial_eval(disj(f, parse("x < 0", V2)), AlgebraicPoint.from_rationals([-1])) is True


# random formulas ---------------------------------------------------------------

polys = st.sampled_from(["x", "y", "x - y", "x^2 + y^2 - 1", "x*y - 1/2", "y - x^2", "2*x + 3*y - 1"])
rels = st.sampled_from(["=", "!=", "<", "<=", ">", ">="])
atom_text = st.builds(lambda p, r: f"{p} {r} 0", polys, rels) | st.sampled_from(
    ["y > root(1, y^2 - x)", "y <= root(2, y^2 + x - 1)", "true", "false"]
)


def _combine(children):
    return st.one_of(
        st.builds(lambda a, b: f"({a}) /\\ ({b})", children, children),
        st.builds(lambda a, b: f"({a}) \\/ ({b})", children, children),
        st.builds(lambda a: f"~({a})", children),
    )


formula_text = st.recursive(atom_text, _combine, max_leaves=6)
PROBES = [AlgebraicPoint.from_rationals([fmpq(a.numerator, a.denominator), fmpq(b.numerator, b.denominator)])
          for a, b in random_points(19, 2, 40, den=4)]


def _naive(f, pt) -> bool:
    if isinstance(f, Not):
        return not _naive(f.arg, pt)
    if isinstance(f, And):
        return all(_naive(a, pt) for a in f.args)
    if isinstance(f, Or):
        return any(_naive(a, pt) for a in f.args)
    return evaluate_at(f, pt)


@settings(max_examples=80, deadline=None)
@given(formula_text)
def test_render_round_trip(text):
    f = parse(text, V2)
    assert parse(str(f), V2) == normalize(f)


@settings(max_examples=80, deadline=None)
@given(formula_text)
def test_nnf_is_idempotent(text):
    f = nnf(parse(text, V2))
    assert nnf(f) == f


@settings(max_examples=60, deadline=None)
@given(formula_text)
def test_boolean_semantics(text):
    f = parse(text, V2)
    for pt in PROBES[:15]:
        v = evaluate_at(f, pt)
        assert v == _naive(f, pt)
        assert evaluate_at(neg(f), pt) == (not v)
        assert evaluate_at(nnf(f), pt) == v


def test_desugaring_is_sound():
    rng = random.Random(3)
    texts = ["x^2 + y^2 - 1 <= 0 \\/ x*y != 0", "~(x - y >= 0) /\\ y < 1/3", "x^2 - y < 0 \\/ (x >= y /\\ y != 2*x)"]
    pts = [AlgebraicPoint.from_rationals([fmpq(a.numerator, a.denominator), fmpq(b.numerator, b.denominator)])
           for a, b in random_points(rng.randint(0, 10**6), 2, 500, den=3)]
    for text in texts:
        f = parse(text, V2)
        d = desugar(f)
        assert all(a.rel in ("=", ">") for a in _sign_atoms(d))
        for pt in pts:
            assert evaluate_at(d, pt) == evaluate_at(f, pt)


def _sign_atoms(f):
    if isinstance(f, Atom):
        yield f
    for a in getattr(f, "args", ()):
        yield from _sign_atoms(a)
    if isinstance(f, Not):
        yield from _sign_atoms(f.arg)
