"""Solvers for the incremental knapsack problem.

Exact enumeration, the LP-based constant-factor algorithm, the
disjunctive PTAS for the time-invariant case, and the instance families
used to probe LP relaxations.
"""

from .constant_factor import solve_constant_factor
from .errors import InkspanError
from .generators import gen_3partition, gen_gap_family, gen_random
from .model import (
    AlgoResult,
    Instance,
    Schedule,
    check_feasible,
    evaluate,
    load_instance,
    make_instance,
    validate_instance,
)
from .oracle import brute_force, knapsack_exact
from .ptas import solve_ptas
from .relaxation import gap_report, relaxation_value
from .split import guarantee_factor, split_time

__version__ = "0.1.0"

__all__ = [
    "AlgoResult", "Instance", "InkspanError", "Schedule", "brute_force", "check_feasible",
    "evaluate", "gap_report", "gen_3partition", "gen_gap_family", "gen_random",
    "guarantee_factor", "knapsack_exact", "load_instance", "make_instance",
    "relaxation_value", "solve_constant_factor", "solve_ptas", "split_time",
    "validate_instance",
]
