"""(S, kappa)-splits of the capacity/discount profile and the resulting guarantee."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, Number, to_fraction


@dataclass(frozen=True)
class SplitInfo:
    kappa: Fraction
    t_kappa: int
    S: Fraction


def split_time(inst: Instance, kappa: Number) -> SplitInfo:
    """Smallest S for which some period splits the horizon, and its earliest period.

    A period t qualifies when B_T - B_t <= kappa * B_T; its ratio is the
    discount mass before t over the mass from t on.
    """
    kappa = to_fraction(kappa)
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    BT = inst.capacities[-1]
    best = None
    for t in range(1, inst.T + 1):
        if BT - inst.capacity(t) > kappa * BT:
            continue
        before = inst.discount_sum(1, t - 1)
        ratio = before / inst.discount_sum(t)
        if best is None or ratio < best.S:
            best = SplitInfo(kappa, t, ratio)
    assert best is not None  # t = T always qualifies
    return best


def guarantee_factor(inst: Instance) -> Fraction:
    """min{1/9, 1/(6 max{1, S(1/2)})}."""
    S = split_time(inst, Fraction(1, 2)).S
    return min(Fraction(1, 9), 1 / (6 * max(Fraction(1), S)))
