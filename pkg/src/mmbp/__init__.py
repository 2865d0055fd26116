"""Exact solvers for the multidimensional maximum bisection problem."""

from .bnb import PartialAssignment, Side, solve_bnb, upper_bound
from .enumeration import solve_enumeration
from .generate import GenConfig, generate, paper_suite
from .graph import (
    Bisection,
    CutReport,
    Edge,
    Instance,
    InstanceError,
    cut_edges,
    cut_weight,
    format_instance,
    format_weight,
    parse_instance,
    parse_weight,
    prefix_instance,
)
from .milp import MilpModel, Witness, build_model, check_solution, emit_lp, parse_lp, witness_from_bisection
from .result import SolveResult

__all__ = [
    "Bisection", "CutReport", "Edge", "GenConfig", "Instance", "InstanceError", "MilpModel",
    "PartialAssignment", "Side", "SolveResult", "Witness", "build_model", "check_solution",
    "cut_edges", "cut_weight", "emit_lp", "format_instance", "format_weight", "generate",
    "paper_suite", "parse_instance", "parse_lp", "parse_weight", "prefix_instance",
    "solve_bnb", "solve_enumeration", "upper_bound", "witness_from_bisection",
]
