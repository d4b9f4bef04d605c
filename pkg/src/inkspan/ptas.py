"""Disjunctive PTAS for the time-invariant problem (all Delta_t = 1).

For every guess h of the most valuable packed item, the items no more
valuable than h are split into K geometric value classes plus a tail of
negligible items, and class values are rounded up to the class ceiling.
Within a class all items then look alike, so a packing is described by how
many of the lightest class members are present in each period. Those counts
are enumerated exactly up to J = ceil(1/eps) (sigma vectors); beyond J an LP
decides, and the LP point is rounded greedily class by class and over the
tail. The best rounded point over all (h, sigma) wins.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, NotTimeInvariant
from .lp import GE, LE, LinearProgram, LpBuilder, solve_lp
from .model import (
    AlgoResult,
    Instance,
    Number,
    Schedule,
    check_feasible,
    evaluate,
    repair_schedule,
    to_fraction,
)

log = logging.getLogger(__name__)

DEFAULT_LP_BUDGET = 10**6
TAU_INT = 1e-6

Sigma = tuple[tuple[int, ...], ...]


def lp_budget() -> int:
    return int(os.environ.get("INKSPAN_LP_BUDGET", DEFAULT_LP_BUDGET))


def class_count(eps: Fraction, T: int) -> int:
    """Smallest K with (1 - eps)^K < eps / T, by direct iteration."""
    K, p = 0, Fraction(1)
    while not p < eps / T:
        p *= 1 - eps
        K += 1
    return K


def enumeration_cap(eps: Fraction) -> int:
    return math.ceil(1 / eps)


@dataclass(frozen=True)
class ValueClassing:
    h: int
    eps: Fraction
    T: int
    K: int
    J: int
    classes: tuple[tuple[int, ...], ...]    # lightest first, ties by index
    tail: tuple[int, ...]
    modified: dict                         # item -> modified value, over S^h

    @property
    def items(self) -> tuple[int, ...]:
        """Items of S^h (value at most v_h) in index order; LP rows follow this order."""
        return tuple(sorted(self.modified))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def caps(self) -> tuple[int, ...]:
        return tuple(min(self.J, s) for s in self.sizes)


def build_classes(inst: Instance, h: int, eps: Number) -> ValueClassing:
    if not inst.is_time_invariant:
        raise NotTimeInvariant("the PTAS needs Delta_t = 1 in every period")
    eps = to_fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    T = inst.T
    K = class_count(eps, T)
    J = enumeration_cap(eps)
    vh = inst.values[h]
    levels = [(1 - eps) ** k * vh for k in range(K + 1)]
    classes: list[list[int]] = [[] for _ in range(K)]
    tail: list[int] = []
    modified = {h: vh}
    for j in range(inst.N):
        vj = inst.values[j]
        if j == h or vj > vh:
            continue
        if vj <= levels[K]:
            tail.append(j)
            modified[j] = vj
            continue
        k = next(k for k in range(1, K + 1) if levels[k - 1] >= vj > levels[k])
        classes[k - 1].append(j)
        modified[j] = levels[k - 1]
    ordered = tuple(tuple(sorted(c, key=lambda i: (inst.weights[i], i))) for c in classes)
    return ValueClassing(h, eps, T, K, J, ordered, tuple(tail), modified)


def _monotone_tuples(T: int, top: int):
    return list(itertools.combinations_with_replacement(range(top + 1), T))


def enumerate_sigmas(classing: ValueClassing, budget: Optional[int] = None) -> Iterator[Sigma]:
    """Every sigma: per class a nondecreasing T-tuple over 0..min(J, |class|)."""
    budget = lp_budget() if budget is None else budget
    total = math.prod(math.comb(classing.T + c, classing.T) for c in classing.caps())
    if total > budget:
        raise BudgetExceeded(f"{total} sigma vectors exceed the LP budget of {budget}")
    per_class = [_monotone_tuples(classing.T, c) for c in classing.caps()]
    return itertools.product(*per_class)


def count_lps(N: int, T: int, eps: Number, class_sizes: Optional[Sequence[int]] = None) -> int:
    """N times the number of sigma vectors.

    Exact from ``class_sizes`` when given, otherwise the worst case
    N * (J (J + T)^J)^K.
    """
    eps = to_fraction(eps)
    J = enumeration_cap(eps)
    if class_sizes is None:
        K = class_count(eps, T)
        return N * (J * (J + T) ** J) ** K
    return N * math.prod(math.comb(T + min(J, s), T) for s in class_sizes)


def count_instance_lps(inst: Instance, eps: Number) -> int:
    """Exact number of (h, sigma) pairs the PTAS enumerates on ``inst``."""
    return sum(count_lps(1, inst.T, eps, build_classes(inst, h, eps).sizes)
               for h in range(inst.N))


def _prefix_weights(inst: Instance, members: Sequence[int]) -> list[Fraction]:
    out = [Fraction(0)]
    for i in members:
        out.append(out[-1] + inst.weights[i])
    return out


def feasible_sigmas(inst: Instance, classing: ValueClassing) -> Iterator[Sigma]:
    """The sigma vectors whose polyhedron is nonempty, in ``enumerate_sigmas`` order.

    Every pinned-to-one variable is a prefix of its class, and setting all
    other variables to zero satisfies the remaining rows, so Q is nonempty
    exactly when the pinned prefixes (plus h at T) fit every capacity.
    """
    T = classing.T
    prefix = [_prefix_weights(inst, c) for c in classing.classes]
    per_class = [_monotone_tuples(T, c) for c in classing.caps()]
    room0 = [inst.capacity(t) - (inst.weights[classing.h] if t == T else 0)
             for t in range(1, T + 1)]
    if any(r < 0 for r in room0):
        return

    def rec(k: int, room: list[Fraction], chosen: list) -> Iterator[Sigma]:
        if k == len(per_class):
            yield tuple(chosen)
            return
        for tup in per_class[k]:
            left = [room[t] - prefix[k][tup[t]] for t in range(T)]
            if min(left) < 0:
                continue
            chosen.append(tup)
            yield from rec(k + 1, left, chosen)
            chosen.pop()

    yield from rec(0, room0, [])


def q_index(classing: ValueClassing, item: int, t: int) -> int:
    return classing.items.index(item) * classing.T + (t - 1)


def build_Q_lp(inst: Instance, classing: ValueClassing, sigma: Sigma) -> LinearProgram:
    """max sum_t sum_i v'_i x_{i,t} over Q^{sigma,h}; variables over S^h x periods."""
    T, J = classing.T, classing.J
    items = classing.items
    pos = {i: p for p, i in enumerate(items)}

    def col(i: int, t: int) -> int:
        return pos[i] * T + (t - 1)

    b = LpBuilder(len(items) * T)
    for i in items:
        for t in range(1, T + 1):
            b.c[col(i, t)] = float(classing.modified[i])
    b.fix(col(classing.h, T), 1.0)
    for k, members in enumerate(classing.classes):
        size = len(members)
        if size == 0:
            continue
        for t in range(1, T + 1):
            s = sigma[k][t - 1]
            cols = [col(i, t) for i in members]
            if s == 0:
                for c in cols:
                    b.fix(c, 0.0)
            elif s >= size:
                for c in cols:
                    b.fix(c, 1.0)
            elif s < J:
                for c in cols[:s]:
                    b.fix(c, 1.0)
                for c in cols[s:]:
                    b.fix(c, 0.0)
            else:
                for c in cols[:s]:
                    b.fix(c, 1.0)
                b.add_row({c: 1.0 for c in cols}, GE, float(s))
    for t in range(1, T + 1):
        b.add_row({col(i, t): float(inst.weights[i]) for i in items}, LE, float(inst.capacity(t)))
    for i in items:
        for t in range(2, T + 1):
            b.add_row({col(i, t - 1): 1.0, col(i, t): -1.0}, LE, 0.0)
    return b.build()


def _budgets(block: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    """Per-period weight used by a block of rows; forced nondecreasing against noise."""
    if block.size == 0:
        return np.zeros(block.shape[1] if block.ndim == 2 else 0)
    return np.maximum.accumulate(np.asarray(weights) @ block)


def _greedy_counts(budgets: np.ndarray, ordered_weights: Sequence[float]) -> tuple[int, ...]:
    prefix = np.concatenate([[0.0], np.cumsum(ordered_weights)])
    counts = []
    for c in budgets:
        tol = 1e-9 * (1.0 + abs(c))
        counts.append(int(np.searchsorted(prefix, c + tol, side="right") - 1))
    return tuple(counts)


def round_class(xbar: np.ndarray, inst: Instance, classing: ValueClassing, k: int,
                sigma_k: Sequence[int]) -> tuple[int, ...]:
    """Per-period number of lightest class-k items kept after rounding.

    ``xbar`` is the full Q solution (rows in ``classing.items`` order). Each
    period keeps the lightest items whose total weight fits the weight the
    LP spent on the class in that period.
    """
    members = classing.classes[k]
    if not members:
        return (0,) * classing.T
    rows = [classing.items.index(i) for i in members]
    w = [float(inst.weights[i]) for i in members]
    counts = _greedy_counts(_budgets(xbar[rows], w), w)
    pinned = [min(s, len(members)) for s in sigma_k]
    if any(c < p for c, p in zip(counts, pinned)):
        log.debug("class %d rounding below its pinned prefix; keeping the prefix", k)
        counts = tuple(max(c, p) for c, p in zip(counts, pinned))
    return counts


def round_tail(xbar: np.ndarray, inst: Instance, classing: ValueClassing) -> dict[int, Optional[int]]:
    """Insertion times for tail items: best value/weight first, partial item dropped."""
    if not classing.tail:
        return {}
    order = sorted(classing.tail, key=lambda i: (-inst.values[i] / inst.weights[i], i))
    rows = [classing.items.index(i) for i in order]
    w = [float(inst.weights[i]) for i in order]
    counts = _greedy_counts(_budgets(xbar[rows], w), w)
    return {i: next((t + 1 for t, c in enumerate(counts) if c > r), None)
            for r, i in enumerate(order)}


@dataclass(frozen=True)
class QRecord:
    """One solved polyhedron with the block values used by the rounding bounds."""

    h: int
    sigma: Sigma
    lp_value: float
    class_lp: tuple[float, ...]
    class_rounded: tuple[Fraction, ...]
    tail_lp: float
    tail_rounded: Fraction
    h_lp: float
    h_rounded: Fraction
    h_row_integral: bool
    schedule: Schedule

    @property
    def rounded_value(self) -> Fraction:
        return sum(self.class_rounded, Fraction(0)) + self.tail_rounded + self.h_rounded


def _periods_present(s: Optional[int], T: int) -> int:
    return 0 if s is None else T - s + 1


def assemble(inst: Instance, classing: ValueClassing, sigma: Sigma, xbar: np.ndarray,
             lp_value: float) -> QRecord:
    """Round a Q optimum into an integral schedule (classes, tail, then h's row)."""
    T = classing.T
    times: list[Optional[int]] = [None] * inst.N
    class_lp, class_rounded = [], []
    for k, members in enumerate(classing.classes):
        if not members:
            class_lp.append(0.0)
            class_rounded.append(Fraction(0))
            continue
        counts = round_class(xbar, inst, classing, k, sigma[k])
        for r, i in enumerate(members):
            times[i] = next((t + 1 for t, c in enumerate(counts) if c > r), None)
        vk = classing.modified[members[0]]
        rows = [classing.items.index(i) for i in members]
        class_lp.append(float(vk) * float(xbar[rows].sum()))
        class_rounded.append(vk * sum(counts))

    tail_times = round_tail(xbar, inst, classing)
    for i, s in tail_times.items():
        times[i] = s
    tail_rows = [classing.items.index(i) for i in classing.tail]
    tail_lp = sum(float(inst.values[i]) * float(xbar[r].sum())
                  for i, r in zip(classing.tail, tail_rows))
    tail_rounded = sum((inst.values[i] * _periods_present(s, T) for i, s in tail_times.items()),
                       Fraction(0))

    h = classing.h
    hrow = xbar[classing.items.index(h)]
    times[h] = next((t + 1 for t in range(T) if hrow[t] >= 1 - TAU_INT), T)
    vh = inst.values[h]
    h_integral = bool(np.all((hrow <= TAU_INT) | (hrow >= 1 - TAU_INT)))
    sched = Schedule(tuple(times))
    return QRecord(h, sigma, lp_value, tuple(class_lp), tuple(class_rounded),
                   tail_lp, tail_rounded, float(vh) * float(hrow.sum()),
                   vh * _periods_present(times[h], T), h_integral, sched)


def solve_q(inst: Instance, classing: ValueClassing, sigma: Sigma) -> Optional[QRecord]:
    out = solve_lp(build_Q_lp(inst, classing, sigma))
    if not out.optimal:
        return None
    xbar = out.x.reshape(len(classing.items), classing.T)
    return assemble(inst, classing, sigma, xbar, out.objective)


def _scan_h(args) -> list[QRecord]:
    inst, eps, h = args
    classing = build_classes(inst, h, eps)
    found = []
    for sigma in feasible_sigmas(inst, classing):
        rec = solve_q(inst, classing, sigma)
        if rec is not None:
            found.append(rec)
    return found


def solve_ptas(inst: Instance, eps: Number, budget: Optional[int] = None, threads: int = 1,
               on_disjunct: Optional[Callable[[QRecord], None]] = None) -> AlgoResult:
    """Best rounded point over all nonempty Q^{sigma,h}; value >= (1 - eps)^2 OPT."""
    eps = to_fraction(eps)
    if not inst.is_time_invariant:
        raise NotTimeInvariant("the PTAS needs Delta_t = 1 in every period")
    budget = lp_budget() if budget is None else budget
    total = count_instance_lps(inst, eps)
    if total > budget:
        raise BudgetExceeded(f"{total} LPs exceed the budget of {budget} "
                             f"(raise eps or set INKSPAN_LP_BUDGET)")
    factor = (1 - eps) ** 2
    if inst.N == 0:
        return AlgoResult(Schedule(()), Fraction(0), "ptas", {}, factor)

    jobs = [(inst, eps, h) for h in range(inst.N)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_h = list(pool.map(_scan_h, jobs))
    else:
        per_h = [_scan_h(j) for j in jobs]

    best: Optional[tuple[Fraction, QRecord, Schedule]] = None
    for records in per_h:
        for rec in records:
            if on_disjunct is not None:
                on_disjunct(rec)
            sched = rec.schedule
            if not check_feasible(inst, sched):
                sched = repair_schedule(inst, sched)
            value = evaluate(inst, sched)
            if best is None or value > best[0]:
                best = (value, rec, sched)

    if best is None:
        # every Q empty: no item fits at T, so nothing can ever be packed
        return AlgoResult(Schedule.empty(inst.N), Fraction(0), "ptas", {"lps": total}, factor)
    value, rec, sched = best
    witness = {"h": inst.ids[rec.h], "sigma": [list(s) for s in rec.sigma], "lps": total}
    return AlgoResult(sched, value, "ptas", witness, factor)
