"""LP relaxations of the natural time-indexed formulation and gap reports."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lp import LE, LinearProgram, LpBuilder, solve_lp
from .model import Instance
from .oracle import brute_force


def var_index(inst: Instance, i: int, t: int) -> int:
    """Column of x_{i,t} (item-major, 1-indexed period)."""
    return i * inst.T + (t - 1)


def add_schedule_rows(b: LpBuilder, inst: Instance, items=None) -> None:
    """Capacity row per period and precedence x_{i,t-1} <= x_{i,t}."""
    items = range(inst.N) if items is None else items
    for t in range(1, inst.T + 1):
        b.add_row({var_index(inst, i, t): float(inst.weights[i]) for i in items},
                  LE, float(inst.capacity(t)))
    for i in items:
        for t in range(2, inst.T + 1):
            b.add_row({var_index(inst, i, t - 1): 1.0, var_index(inst, i, t): -1.0}, LE, 0.0)


def relaxation_builder(inst: Instance, strengthened: bool) -> LpBuilder:
    b = LpBuilder(inst.N * inst.T)
    for i in range(inst.N):
        for t in range(1, inst.T + 1):
            j = var_index(inst, i, t)
            b.c[j] = float(inst.values[i] * inst.discount(t))
            if strengthened and inst.weights[i] > inst.capacity(t):
                b.hi[j] = 0.0
    add_schedule_rows(b, inst)
    return b


def build_relaxation(inst: Instance, strengthened: bool = True) -> LinearProgram:
    """Continuous relaxation; ``strengthened`` zeroes x_{i,t} whenever w_i > B_t."""
    return relaxation_builder(inst, strengthened).build()


def relaxation_value(inst: Instance, strengthened: bool = True) -> float:
    out = solve_lp(build_relaxation(inst, strengthened))
    if not out.optimal:
        raise AssertionError("relaxation of a valid instance cannot be infeasible")
    return out.objective


@dataclass(frozen=True)
class GapReport:
    lp_value: float
    ip_value: Fraction
    ratio: float

    def csv_row(self, k="", m="", T="") -> str:
        return f"{k},{m},{T},{self.lp_value:.9g},{self.ip_value},{self.ratio:.9g}"


CSV_HEADER = "k,m,T,lp,ip,ratio"


def gap_report(inst: Instance, strengthened: bool = True) -> GapReport:
    """Relaxation value over the exact integer optimum."""
    lp = relaxation_value(inst, strengthened)
    ip = brute_force(inst).value
    ratio = lp / float(ip) if ip > 0 else (1.0 if abs(lp) < 1e-9 else float("inf"))
    return GapReport(lp, ip, ratio)
