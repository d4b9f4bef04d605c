"""Constant-factor approximation for incremental knapsack.

Two candidate families are generated and the best feasible one is kept:

* replicated knapsacks: solve the one-period knapsack at capacity B_t and
  keep that set from period t to T;
* disjunct LPs D(t_bar, t_breve, h): item h enters at t_breve and is the
  most valuable item present at t_bar, and at least a third of the value
  accrues on each side of t_bar. The LP is solved twice (second time with
  the first optimum V* frozen into the one-third rows), cleaned so that each
  period holds at most one fractional item, and rounded down.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .lp import GE, LE, LinearProgram, solve_lp
from .model import (
    AlgoResult,
    Instance,
    Schedule,
    check_feasible,
    evaluate,
    perturb_values,
    repair_schedule,
)
from .oracle import knapsack_exact
from .relaxation import relaxation_builder, var_index
from .split import guarantee_factor

log = logging.getLogger(__name__)

TAU_SLACK = 1e-9
TAU_INT = 1e-6
TAU_FRAC = 1e-9
PERTURB_ETA = Fraction(1, 10**9)


@dataclass(frozen=True)
class DisjunctSpec:
    t_bar: int
    t_breve: int
    h: int


@dataclass(frozen=True)
class StageResult:
    spec: DisjunctSpec
    V_star: float
    x_lp: np.ndarray          # stage-2 vertex as returned by the solver
    x_tilde: np.ndarray       # after defractionalize
    x_breve: Schedule
    lp_objective: float       # objective of x_lp
    objective: float          # objective of x_tilde


def replicated_solution(inst: Instance, t_bar: int) -> AlgoResult:
    """Best single-period packing at capacity B_{t_bar}, held until T."""
    if not 1 <= t_bar <= inst.T:
        raise ValueError(f"t_bar = {t_bar} outside 1..{inst.T}")
    chosen, _ = knapsack_exact(inst.values, inst.weights, inst.capacity(t_bar))
    times = [None] * inst.N
    for i in chosen:
        times[i] = t_bar
    sched = Schedule(tuple(times))
    return AlgoResult(sched, evaluate(inst, sched), "replicated", {"t_bar": t_bar})


def disjunct_specs(inst: Instance):
    """All (t_bar, t_breve, h) with 1 < t_bar < T and t_breve <= t_bar."""
    for t_bar in range(2, inst.T):
        for t_breve in range(1, t_bar + 1):
            for h in range(inst.N):
                yield DisjunctSpec(t_bar, t_breve, h)


def _split_coeffs(inst: Instance, t_bar: int, upper: bool, scale_all: float, scale_part: float):
    coeffs = {}
    for i in range(inst.N):
        for t in range(1, inst.T + 1):
            c = float(inst.values[i] * inst.discount(t))
            in_part = (t >= t_bar) if upper else (t < t_bar)
            coeffs[var_index(inst, i, t)] = scale_all * c + (scale_part * c if in_part else 0.0)
    return coeffs


def build_disjunct_lp(inst: Instance, spec: DisjunctSpec, stage: int,
                      V_star: Optional[float] = None) -> LinearProgram:
    """Relaxation of D(t_bar, t_breve, h); stage 2 swaps the one-third rows for V*/3 floors."""
    if stage not in (1, 2):
        raise ValueError("stage must be 1 or 2")
    if stage == 2 and V_star is None:
        raise ValueError("stage 2 needs V_star")
    b = relaxation_builder(inst, strengthened=False)
    h = spec.h
    b.fix(var_index(inst, h, spec.t_breve), 1.0)
    if spec.t_breve >= 2:
        b.fix(var_index(inst, h, spec.t_breve - 1), 0.0)
    for i in range(inst.N):
        if inst.values[i] > inst.values[h]:
            b.fix(var_index(inst, i, spec.t_bar), 0.0)
    if stage == 1:
        # total/3 <= value on [t_bar, T]   and   total/3 <= value on [1, t_bar)
        b.add_row(_split_coeffs(inst, spec.t_bar, True, 1 / 3, -1.0), LE, 0.0)
        b.add_row(_split_coeffs(inst, spec.t_bar, False, 1 / 3, -1.0), LE, 0.0)
    else:
        floor = V_star * (1 - TAU_SLACK) / 3
        b.add_row(_split_coeffs(inst, spec.t_bar, True, 0.0, 1.0), GE, floor)
        b.add_row(_split_coeffs(inst, spec.t_bar, False, 0.0, 1.0), GE, floor)
    return b.build()


def _objective(inst: Instance, x: np.ndarray) -> float:
    v = np.array([float(a) for a in inst.values])
    d = np.array([float(a) for a in inst.discounts])
    return float(v @ x @ d) if inst.N else 0.0


def _fractional(x: np.ndarray, tol: float = TAU_FRAC) -> np.ndarray:
    return (x > tol) & (x < 1 - tol)


def max_fractional_per_period(x: np.ndarray, tol: float = TAU_FRAC) -> int:
    if x.size == 0:
        return 0
    return int(_fractional(x, tol).sum(axis=0).max())


def defractionalize(x: np.ndarray, inst: Instance, spec: DisjunctSpec,
                    tol: float = TAU_FRAC) -> np.ndarray:
    """Weight-preserving exchanges until each period has at most one fractional item.

    For two fractional items in a period, mass moves from the lower
    value/weight item j to the higher one i over the periods where i keeps
    its current level, starting at j's first positive period (or after
    t_bar when i is barred from the knapsack at t_bar). Each step leaves
    every capacity row unchanged, raises every period's value, and pushes a
    variable onto a bound or onto its neighbour's level. Item h is never
    touched.
    """
    x = np.array(x, dtype=float, copy=True)
    N, T = x.shape
    if N == 0:
        return x
    v = [float(a) for a in inst.values]
    w = [float(a) for a in inst.weights]
    ratio = [v[i] / w[i] for i in range(N)]
    barred = [inst.values[i] > inst.values[spec.h] for i in range(N)]

    def step() -> bool:
        frac = _fractional(x, tol)
        for th in range(T):
            items = [i for i in range(N) if frac[i, th] and i != spec.h]
            if len(items) < 2:
                continue
            items.sort(key=lambda i: (-ratio[i], i))
            for p, i in enumerate(items):
                for j in reversed(items[p + 1:]):
                    if _exchange(i, j, th):
                        return True
        return False

    def _exchange(i: int, j: int, th: int) -> bool:
        first_j = int(np.argmax(x[j] > tol))
        a = max(first_j, spec.t_bar if barred[i] else 0)   # 0-indexed period
        if a > th:
            return False
        room_j = x[j, a] - (x[j, a - 1] if a > 0 else 0.0)
        level = x[i, th]
        b = th
        while b + 1 < T and abs(x[i, b + 1] - level) <= 1e-12:
            b += 1
        delta = (x[i, b + 1] if b + 1 < T else 1.0) - level
        theta = min(w[i] / w[j] * delta, room_j)
        if theta <= 1e-12:
            return False
        x[j, a:b + 1] -= theta
        x[i, a:b + 1] += w[j] / w[i] * theta
        # land exactly on the bound or level that limited the step
        if theta == room_j:
            x[j, a:b + 1] = np.maximum(x[j, a:b + 1], x[j, a - 1] if a > 0 else 0.0)
        else:
            x[i, a:b + 1] = np.minimum(x[i, a:b + 1], x[i, b + 1] if b + 1 < T else 1.0)
        return True

    limit = 10 * N * T * T + 10
    for _ in range(limit):
        np.clip(x, 0.0, 1.0, out=x)
        if max_fractional_per_period(x, tol) <= 1 or not step():
            break
    else:
        log.warning("defractionalize hit its iteration limit for %s", spec)
    return x


def round_down(x_tilde: np.ndarray, tol: float = TAU_INT) -> Schedule:
    """Insertion time of each item = first period with x >= 1 - tol."""
    return Schedule.from_rows(x_tilde, tol)


def solve_two_stage(inst: Instance, spec: DisjunctSpec) -> Optional[StageResult]:
    """Both LP stages for one disjunct; ``None`` when the disjunct is empty."""
    if inst.weights[spec.h] > inst.capacity(spec.t_breve):
        return None
    first = solve_lp(build_disjunct_lp(inst, spec, 1))
    if not first.optimal:
        return None
    V_star = first.objective
    second = solve_lp(build_disjunct_lp(inst, spec, 2, V_star))
    if not second.optimal:
        log.warning("stage 2 infeasible after a feasible stage 1 for %s", spec)
        return None
    x_lp = second.x.reshape(inst.N, inst.T)
    x_tilde = defractionalize(x_lp, inst, spec)
    return StageResult(spec, V_star, x_lp, x_tilde, round_down(x_tilde),
                       _objective(inst, x_lp), _objective(inst, x_tilde))


def rounding_factor(inst: Instance, t_bar: int) -> Fraction:
    """(1/6) min{1, sum_{t >= t_bar} Delta / sum_{t < t_bar} Delta}."""
    before = inst.discount_sum(1, t_bar - 1)
    after = inst.discount_sum(t_bar)
    return Fraction(1, 6) * (min(Fraction(1), after / before) if before > 0 else 1)


def _scan(args) -> list:
    inst, specs = args
    return [(spec, solve_two_stage(inst, spec)) for spec in specs]


def solve_constant_factor(inst: Instance, threads: int = 1,
                          on_disjunct: Optional[Callable[[StageResult], None]] = None) -> AlgoResult:
    """Best of all replicated-knapsack and rounded disjunct candidates.

    Candidates are valued with the instance's own values; the LPs run on a
    copy with ratio-separating perturbation. ``on_disjunct`` sees every
    solved disjunct (used by the bound checks in the test suite).
    """
    pert = perturb_values(inst, PERTURB_ETA)
    best: Optional[AlgoResult] = None

    def consider(cand: AlgoResult) -> None:
        nonlocal best
        if best is None or cand.value > best.value:
            best = cand

    for t_bar in range(1, inst.T + 1):
        consider(replicated_solution(inst, t_bar))

    specs = list(disjunct_specs(inst))
    if threads > 1 and len(specs) > 1:
        chunks = [specs[k::threads] for k in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            solved = dict(pair for part in pool.map(_scan, [(pert, c) for c in chunks])
                          for pair in part)
        results = [(s, solved[s]) for s in specs]
    else:
        results = _scan((pert, specs))

    for spec, res in results:
        if res is None:
            continue
        if on_disjunct is not None:
            on_disjunct(res)
        sched = res.x_breve
        if not check_feasible(inst, sched):
            sched = repair_schedule(inst, sched)
        consider(AlgoResult(sched, evaluate(inst, sched), "disjunct",
                            {"t_bar": spec.t_bar, "t_breve": spec.t_breve,
                             "h": inst.ids[spec.h]}))

    assert best is not None
    return AlgoResult(best.schedule, best.value, "constant",
                      {"candidate": best.algorithm, **best.witness}, guarantee_factor(inst))
