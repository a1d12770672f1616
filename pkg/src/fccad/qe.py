"""Quantifier elimination by cylindrical algebraic decomposition.

The decomposition is built in the order free variables first, then the
quantified blocks.  Free-level cells are built completely; over each of them
the quantified levels are lifted lazily and truth values are combined with
``any`` / ``all`` per quantifier, stopping as soon as a fiber is decided.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebraic import AlgebraicPoint
from .cad import Decomposition, build_cad, projection_sets, stack_roots, union_formula
from .formula import (
    FALSE,
    TRUE,
    Formula,
    Quantified,
    disj,
    partial_eval,
    polynomials_of,
)
from .numeric import ZERO, rational_above, rational_below, rational_between


@dataclass(frozen=True)
class PrenexTask:
    """``Q_1 y_1 .. Q_k y_k. matrix`` over ``variables = free + bound``."""

    variables: tuple[str, ...]
    quantifiers: tuple[str, ...]  # one "A" or "E" per bound variable, outermost first
    matrix: Formula

    @property
    def free(self) -> tuple[str, ...]:
        return self.variables[: len(self.variables) - len(self.quantifiers)]

    @classmethod
    def from_formula(cls, f: Formula, variables) -> PrenexTask:
        variables = tuple(variables)
        if not isinstance(f, Quantified):
            return cls(variables, (), f)
        kinds = tuple(k for k, vs in f.blocks for _ in vs)
        bound = f.bound
        if tuple(variables[len(variables) - len(bound):]) != bound:
            raise ValueError("quantified variables must be the trailing variables in order")
        _reject_nested(f.matrix)
        return cls(variables, kinds, f.matrix)


def _reject_nested(f: Formula) -> None:
    if isinstance(f, Quantified):
        raise ValueError("only prenex formulas are supported")
    for a in getattr(f, "args", ()):
        _reject_nested(a)
    if hasattr(f, "arg"):
        _reject_nested(f.arg)


def _decide(point: AlgebraicPoint, task: PrenexTask, levels, m: int) -> bool:
    v = partial_eval(task.matrix, point)
    if v is not None:
        return v
    k = len(point)
    kind = task.quantifiers[k - m]
    want = kind == "E"
    for pt in _fibre_samples(point, levels[k]):
        if _decide(pt, task, levels, m) == want:
            return want
    return not want


def _fibre_samples(point: AlgebraicPoint, polys):
    """One sample per cell of the stack over ``point``: rational sectors first, then sections."""
    roots = stack_roots(point, polys)
    if not roots:
        yield point.extend_rational(ZERO)
        return
    values = [r.value for r, _ in roots]
    yield point.extend_rational(rational_below(values[0]))
    for a, b in zip(values, values[1:]):
        yield point.extend_rational(rational_between(a, b))
    yield point.extend_rational(rational_above(values[-1]))
    for r, _ in roots:
        yield point.extend_root(r)


def decide(task: PrenexTask, point: AlgebraicPoint) -> bool:
    """Truth of the task at a point given for the free variables."""
    if len(point) != len(task.free):
        raise ValueError("point must give every free variable")
    levels = projection_sets(polynomials_of(task.matrix), len(task.variables))
    return _decide(point, task, levels, len(task.free))


def qe_cad(task: PrenexTask) -> tuple[Decomposition | None, list[bool]]:
    """Free-variable decomposition with the truth of the task on each top cell."""
    n = len(task.variables)
    m = len(task.free)
    levels = projection_sets(polynomials_of(task.matrix), n)
    if m == 0:
        return None, [_decide(AlgebraicPoint.origin(), task, levels, 0)]
    free_polys = [p for ps in levels[:m] for p in ps]
    D = build_cad([p.rebase(task.free) for p in free_polys], task.free)
    truth = [_decide(c.sample, task, levels, m) for c in D.cells()]
    return D, truth


def qe(task: PrenexTask | Formula, variables=None) -> Formula:
    """A quantifier-free formula over the free variables equivalent to the task.

    The answer is the disjunction of the descriptions of the true free cells.
    """
    if not isinstance(task, PrenexTask):
        task = PrenexTask.from_formula(task, variables)
    D, truth = qe_cad(task)
    if D is None:
        return TRUE if truth[0] else FALSE
    if all(truth):
        return TRUE
    chosen = {id(c) for c, t in zip(D.cells(), truth) if t}
    return union_formula(D.base, lambda c: id(c) in chosen, D.n)
