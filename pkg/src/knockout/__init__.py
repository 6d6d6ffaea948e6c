"""Exact variable-knockout solvers with a shortest-path arc-interdiction instance."""

from .core import (
    BinaryProgram,
    CardinalityResult,
    KnockoutResult,
    KnockoutWeights,
    MustBeInfeasible,
    Solution,
    SolutionPool,
    ValueAtLeast,
    evaluate,
    property_holds,
)
from .engine import SolveOptions, gamma_threshold, solve_cardinality, solve_knockout, verify
from .graph import DirectedGraph, parse_instance, random_instance, shortest_path, to_binary_program, write_instance
from .oracle import ExhaustiveOracle, ShortestPathOracle, SubproblemQuery, exhaustive_solve, sp_interdiction_solve
from .setcover import CoverInstance, exact_cover, greedy_cover

__version__ = "0.1.0"
