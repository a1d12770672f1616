"""Exact cylindrical algebraic decompositions satisfying the frontier condition."""

from .cad import Decomposition, build_cad, cell_to_formula, refine_with, trivial_cad
from .driver import check_frontier_condition, decrement, fc_algorithm, frontier_set
from .formula import parse, parse_poly
from .frontier import closure, frontier
from .qe import PrenexTask, qe

__all__ = [
    "Decomposition",
    "PrenexTask",
    "build_cad",
    "cell_to_formula",
    "check_frontier_condition",
    "closure",
    "decrement",
    "fc_algorithm",
    "frontier",
    "frontier_set",
    "parse",
    "parse_poly",
    "qe",
    "refine_with",
    "trivial_cad",
]
