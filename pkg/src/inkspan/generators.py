"""Instance constructions: integrality-gap family, 3-partition reduction, random draws."""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import GeneratorOverflow, NotDivisible
from .model import Instance, make_instance, to_fraction

MAX_HORIZON = 10**6


def gen_gap_family(k: int, m: int, max_horizon: int = MAX_HORIZON) -> Instance:
    """T = k^m periods, items v_i = w_i = k^i (i = 1..m), staircase capacities.

    B_t = k^i on T(1 - k^{1-i}) + 1 <= t <= T(1 - k^{-i}), and B_T = B_{T-1}.
    """
    if k < 2 or m < 1:
        raise ValueError("need k >= 2 and m >= 1")
    if m * math.log(k) > math.log(max_horizon):
        raise GeneratorOverflow(f"T = {k}^{m} exceeds {max_horizon}")
    T = k**m
    caps: list[Optional[int]] = [None] * T
    for i in range(1, m + 1):
        first = T - T // k ** (i - 1) + 1
        last = T - T // k**i
        for t in range(first, last + 1):
            caps[t - 1] = k**i
    caps[T - 1] = caps[T - 2] if T >= 2 else k
    sizes = [k**i for i in range(1, m + 1)]
    return make_instance(sizes, sizes, caps)


def gen_3partition(a: Sequence[int]) -> tuple[Instance, Fraction]:
    """Reduction to incremental subset sum: target reached iff a 3-partition exists.

    The iff needs every a_i strictly between B/4 and B/2; outside that range
    a warning is issued and the instance is still returned.
    """
    a = [int(x) for x in a]
    if len(a) == 0 or len(a) % 3:
        raise ValueError("need 3m integers")
    m = len(a) // 3
    if sum(a) % m:
        raise NotDivisible(f"sum {sum(a)} is not divisible by m = {m}")
    B = sum(a) // m
    if any(not (Fraction(B, 4) < x < Fraction(B, 2)) for x in a):
        warnings.warn(f"some a_i outside (B/4, B/2) with B = {B}; target is only sufficient",
                      stacklevel=2)
    inst = make_instance(a, a, [t * B for t in range(1, m + 1)])
    return inst, Fraction(B * m * (m + 1), 2)


def gen_random(N: int, T: int, seed: int, weight_range=(1, 20), value_range=(1, 100),
               fill_factor=0.5, discount_rate: Optional[float] = None) -> Instance:
    """Seeded random instance (numpy PCG64 via ``default_rng``).

    Weights and values are uniform integers on the closed ranges. Capacities
    are cumulative uniform draws rescaled so that B_T = floor(fill * sum w).
    With ``discount_rate`` r, Delta_t = exp(-r t) rounded to 1e-6.
    """
    rng = np.random.default_rng(seed)
    w = rng.integers(weight_range[0], weight_range[1] + 1, size=N).tolist()
    v = rng.integers(value_range[0], value_range[1] + 1, size=N).tolist()
    steps = rng.random(T)
    cum = np.cumsum(steps)
    top = to_fraction(fill_factor) * sum(w)
    caps = [math.floor(to_fraction(float(c / cum[-1])) * top) for c in cum]
    caps[-1] = math.floor(top)
    caps = list(np.maximum.accumulate(caps))
    disc = None
    if discount_rate is not None:
        disc = [Fraction(round(math.exp(-discount_rate * t) * 10**6), 10**6)
                for t in range(1, T + 1)]
    return make_instance(v, w, [int(c) for c in caps], disc)
