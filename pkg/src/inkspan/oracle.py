"""Exact solvers for desk-scale instances.

These are the ground truth for every approximation-ratio check, so they
work on exact integers: instance data is scaled by a common denominator
before the search and the reported value is recomputed with ``evaluate``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import SizeLimit
from .model import AlgoResult, Instance, Schedule, evaluate, to_fraction

KNAPSACK_ITEM_CAP = 30
LEAF_BUDGET = 10**7


def _lcm_denominators(xs) -> int:
    return math.lcm(1, *(Fraction(x).denominator for x in xs))


def knapsack_exact(values: Sequence, weights: Sequence, capacity,
                   max_items: int = KNAPSACK_ITEM_CAP) -> tuple[tuple[int, ...], Fraction]:
    """Max-value subset (sorted item indices) fitting ``capacity``; branch and bound.

    Items are explored in decreasing value/weight order with the Dantzig
    fractional bound. Among optimal subsets the one found first is returned,
    which makes the result deterministic for a given input order.
    """
    n = len(values)
    if n > max_items:
        raise SizeLimit(f"knapsack with {n} items exceeds the cap of {max_items}")
    vals = [to_fraction(v) for v in values]
    wts = [to_fraction(w) for w in weights]
    cap = to_fraction(capacity)
    if cap < 0:
        raise ValueError("capacity must be nonnegative")
    order = sorted(range(n), key=lambda i: (-vals[i] / wts[i], i))
    v = [vals[i] for i in order]
    w = [wts[i] for i in order]

    best_val = Fraction(0)
    best_set: list[int] = []
    chosen: list[int] = []

    def bound(k: int, room: Fraction) -> Fraction:
        total = Fraction(0)
        for j in range(k, n):
            if w[j] <= room:
                room -= w[j]
                total += v[j]
            else:
                return total + v[j] * room / w[j]
        return total

    def dfs(k: int, room: Fraction, val: Fraction) -> None:
        nonlocal best_val, best_set
        if val > best_val:
            best_val, best_set = val, list(chosen)
        if k == n or val + bound(k, room) <= best_val:
            return
        if w[k] <= room:
            chosen.append(k)
            dfs(k + 1, room - w[k], val + v[k])
            chosen.pop()
        dfs(k + 1, room, val)

    dfs(0, cap, Fraction(0))
    return tuple(sorted(order[k] for k in best_set)), best_val


def brute_force(inst: Instance, budget: int = LEAF_BUDGET) -> AlgoResult:
    """Optimal schedule by enumerating insertion-time vectors.

    Items are assigned in index order, each to 1..T then never; a branch is
    cut when a period overflows or when the per-period fractional knapsack
    bound on the undecided items cannot beat the incumbent by one scaled
    unit. The first optimum found is therefore the lexicographically
    earliest vector (never counts as T + 1).
    """
    N, T = inst.N, inst.T
    if (T + 1) ** N > budget:
        raise SizeLimit(f"(T+1)^N = {T + 1}^{N} leaves exceeds the budget of {budget}")

    vscale = _lcm_denominators([v * d for v in inst.values for d in inst.discounts])
    wscale = _lcm_denominators(list(inst.weights) + list(inst.capacities))
    w = [int(x * wscale) for x in inst.weights]
    cap = [int(x * wscale) for x in inst.capacities]
    # per-period scaled value of item i, and value of inserting at s (suffix sum)
    per = [[int(v * d * vscale) for d in inst.discounts] for v in inst.values]
    gain = [[sum(row[s:]) for s in range(T)] for row in per]
    ratio_order = sorted(range(N), key=lambda i: (-inst.values[i] / inst.weights[i], i))
    # undecided items after depth k, best ratio first
    tails = [[i for i in ratio_order if i >= k] for k in range(N + 1)]
    total_scaled = sum(gain[i][0] for i in range(N)) if N else 0
    use_bound = total_scaled * 1e-15 < 0.25

    load = [0] * T
    times: list = [None] * N
    best = {"val": -1, "times": [None] * N}

    def upper(k: int) -> float:
        ub = 0.0
        for t in range(T):
            room = cap[t] - load[t]
            for i in tails[k]:
                if w[i] <= room:
                    room -= w[i]
                    ub += per[i][t]
                else:
                    ub += per[i][t] * room / w[i]
                    break
        return ub

    def dfs(k: int, val: int) -> None:
        if k == N:
            if val > best["val"]:
                best["val"], best["times"] = val, list(times)
            return
        if use_bound and best["val"] >= 0 and val + upper(k) < best["val"] + 1 - 1e-6:
            return
        wk = w[k]
        for s in range(T):
            if all(load[t] + wk <= cap[t] for t in range(s, T)):
                for t in range(s, T):
                    load[t] += wk
                times[k] = s + 1
                dfs(k + 1, val + gain[k][s])
                for t in range(s, T):
                    load[t] -= wk
        times[k] = None
        dfs(k + 1, val)

    dfs(0, 0)
    sched = Schedule(tuple(best["times"]))
    return AlgoResult(sched, evaluate(inst, sched), "exact", {}, Fraction(1))
