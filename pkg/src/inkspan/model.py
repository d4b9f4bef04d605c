"""Problem data, schedules, evaluation and the JSON file format.

All instance data is held as :class:`fractions.Fraction` so that evaluation
and feasibility checks are exact; the LP-based algorithms convert to floats
internally and hand back integral schedules that are re-checked here.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from .errors import (
    LengthMismatch,
    NonMonotoneCapacity,
    NonPositiveDatum,
    UnknownItem,
)

log = logging.getLogger(__name__)

Number = int | float | str | Fraction


def to_fraction(x: Number) -> Fraction:
    """Exact conversion; floats go through their shortest decimal repr."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


def _fractions(xs: Iterable[Number]) -> tuple[Fraction, ...]:
    return tuple(to_fraction(x) for x in xs)


@dataclass(frozen=True)
class Instance:
    """An incremental knapsack instance.

    ``values``/``weights`` are per item, ``capacities``/``discounts`` per
    period (periods are 1-indexed in the public API, 0-indexed in storage).
    ``original_values`` is set only on perturbed copies.
    """

    values: tuple[Fraction, ...]
    weights: tuple[Fraction, ...]
    capacities: tuple[Fraction, ...]
    discounts: tuple[Fraction, ...] = ()
    ids: tuple[str, ...] = ()
    original_values: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "values", _fractions(self.values))
        set_(self, "weights", _fractions(self.weights))
        set_(self, "capacities", _fractions(self.capacities))
        if not self.discounts:
            set_(self, "discounts", (Fraction(1),) * len(self.capacities))
        else:
            set_(self, "discounts", _fractions(self.discounts))
        if not self.ids:
            set_(self, "ids", tuple(f"i{k + 1}" for k in range(len(self.values))))
        else:
            set_(self, "ids", tuple(str(s) for s in self.ids))
        if self.original_values is not None:
            set_(self, "original_values", _fractions(self.original_values))

    @property
    def N(self) -> int:
        return len(self.values)

    @property
    def T(self) -> int:
        return len(self.capacities)

    def capacity(self, t: int) -> Fraction:
        return self.capacities[t - 1]

    def discount(self, t: int) -> Fraction:
        return self.discounts[t - 1]

    def discount_sum(self, first: int, last: Optional[int] = None) -> Fraction:
        """Sum of discounts over periods ``first..last`` (inclusive, 1-indexed)."""
        last = self.T if last is None else last
        return sum(self.discounts[first - 1:last], Fraction(0))

    @property
    def is_time_invariant(self) -> bool:
        return all(d == 1 for d in self.discounts)

    @property
    def reporting_values(self) -> tuple[Fraction, ...]:
        return self.original_values if self.original_values is not None else self.values

    def total_value(self, items: Iterable[int]) -> Fraction:
        return sum((self.values[i] for i in items), Fraction(0))

    def total_weight(self, items: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in items), Fraction(0))

    def index_of(self, item_id: str) -> int:
        try:
            return self.ids.index(item_id)
        except ValueError:
            raise UnknownItem(item_id) from None

    def with_values(self, values: Sequence[Number], keep_original: bool = True) -> "Instance":
        orig = self.reporting_values if keep_original else None
        return Instance(tuple(values), self.weights, self.capacities, self.discounts,
                        self.ids, orig)


def validate_instance(inst: Instance) -> Instance:
    if len(inst.weights) != inst.N:
        raise LengthMismatch(f"{inst.N} values but {len(inst.weights)} weights")
    if len(inst.discounts) != inst.T:
        raise LengthMismatch(f"{inst.T} capacities but {len(inst.discounts)} discounts")
    if len(inst.ids) != inst.N or len(set(inst.ids)) != inst.N:
        raise LengthMismatch("item ids must be unique, one per item")
    if inst.T < 1:
        raise LengthMismatch("horizon must have at least one period")
    for name, seq in (("value", inst.values), ("weight", inst.weights),
                      ("discount", inst.discounts)):
        for k, x in enumerate(seq):
            if x <= 0:
                raise NonPositiveDatum(f"{name}[{k}] = {x} must be positive")
    if inst.capacities[0] < 0:
        raise NonPositiveDatum("capacities must be nonnegative")
    for t in range(1, inst.T):
        if inst.capacities[t] < inst.capacities[t - 1]:
            raise NonMonotoneCapacity(
                f"B_{t + 1} = {inst.capacities[t]} < B_{t} = {inst.capacities[t - 1]}")
    return inst


def make_instance(values, weights, capacities, discounts=None, ids=None) -> Instance:
    """Build and validate an instance from plain sequences."""
    return validate_instance(Instance(tuple(values), tuple(weights), tuple(capacities),
                                      tuple(discounts or ()), tuple(ids or ())))


@dataclass(frozen=True)
class Schedule:
    """Insertion period per item (1..T), ``None`` for never inserted."""

    insertion_time: tuple[Optional[int], ...]

    @classmethod
    def empty(cls, n: int) -> "Schedule":
        return cls((None,) * n)

    @classmethod
    def from_rows(cls, x, tol: float = 1e-6) -> "Schedule":
        """Insertion times from a 0/1 matrix (items x periods); first t with x >= 1 - tol."""
        times = []
        for row in x:
            first = None
            for t, val in enumerate(row):
                if val >= 1 - tol:
                    first = t + 1
                    break
            times.append(first)
        return cls(tuple(times))

    def __len__(self) -> int:
        return len(self.insertion_time)

    def members(self, t: int) -> list[int]:
        """Items in the knapsack at period ``t``."""
        return [i for i, s in enumerate(self.insertion_time) if s is not None and s <= t]

    def as_matrix(self, T: int) -> list[list[int]]:
        return [[1 if s is not None and s <= t else 0 for t in range(1, T + 1)]
                for s in self.insertion_time]

    def delayed(self, item: int, T: int) -> "Schedule":
        times = list(self.insertion_time)
        s = times[item]
        times[item] = None if s is None or s >= T else s + 1
        return Schedule(tuple(times))

    def union(self, other: "Schedule") -> "Schedule":
        """Combine two item-disjoint schedules."""
        times = []
        for a, b in zip(self.insertion_time, other.insertion_time):
            if a is not None and b is not None:
                raise ValueError("schedules are not item-disjoint")
            times.append(a if a is not None else b)
        return Schedule(tuple(times))


def _check_schedule(inst: Instance, sched: Schedule) -> None:
    if len(sched) != inst.N:
        raise UnknownItem(f"schedule covers {len(sched)} items, instance has {inst.N}")
    for i, s in enumerate(sched.insertion_time):
        if s is not None and not 1 <= s <= inst.T:
            raise ValueError(f"item {inst.ids[i]} inserted at {s}, outside 1..{inst.T}")


def evaluate(inst: Instance, sched: Schedule, values: Optional[Sequence[Fraction]] = None) -> Fraction:
    """Objective sum_t Delta_t * V(S_t); feasibility is not checked."""
    _check_schedule(inst, sched)
    vals = inst.values if values is None else values
    total = Fraction(0)
    for i, s in enumerate(sched.insertion_time):
        if s is not None:
            total += vals[i] * inst.discount_sum(s)
    return total


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[tuple[int, Fraction, Fraction], ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible


def check_feasible(inst: Instance, sched: Schedule) -> FeasibilityReport:
    """List every period ``t`` with ``W(S_t) > B_t`` as ``(t, W(S_t), B_t)``."""
    _check_schedule(inst, sched)
    bad = []
    for t in range(1, inst.T + 1):
        load = inst.total_weight(sched.members(t))
        if load > inst.capacity(t):
            bad.append((t, load, inst.capacity(t)))
    return FeasibilityReport(tuple(bad))


def repair_schedule(inst: Instance, sched: Schedule) -> Schedule:
    """Delay items until every period fits exactly.

    Guards float-rounded schedules against sub-tolerance overshoot. Only
    sets S_t with an actual violation shrink, lowest value per weight first.
    """
    times = list(sched.insertion_time)
    for t in range(1, inst.T + 1):
        while True:
            inside = [i for i, s in enumerate(times) if s is not None and s <= t]
            if inst.total_weight(inside) <= inst.capacity(t):
                break
            victim = min(inside, key=lambda i: (inst.values[i] / inst.weights[i], -i))
            log.warning("repair: delaying item %s past period %d", inst.ids[victim], t)
            times[victim] = t + 1 if t < inst.T else None
    return Schedule(tuple(times))


def perturb_values(inst: Instance, eta: Number = Fraction(1, 10**9)) -> Instance:
    """Scale ``v_i`` by ``1 + i*eta`` (i = 1..N) until all v/w ratios are distinct."""
    eta = to_fraction(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    while True:
        vals = tuple(v * (1 + (i + 1) * eta) for i, v in enumerate(inst.values))
        ratios = [v / w for v, w in zip(vals, inst.weights)]
        if len(set(ratios)) == len(ratios):
            return inst.with_values(vals)
        eta /= 2


@dataclass(frozen=True)
class AlgoResult:
    schedule: Schedule
    value: Fraction
    algorithm: str
    witness: dict = field(default_factory=dict)
    claimed_factor: Optional[Fraction] = None

    def to_json(self, inst: Instance) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "value": _num_out(self.value),
            "value_exact": str(self.value),
            "claimed_factor": None if self.claimed_factor is None else str(self.claimed_factor),
            "witness": self.witness,
            "schedule": schedule_to_json(inst, self.schedule),
        }


# -- JSON ---------------------------------------------------------------------

def _num_out(x: Fraction) -> int | float:
    return int(x) if x.denominator == 1 else float(x)


def instance_from_json(data: dict) -> Instance:
    try:
        T = int(data["T"])
        items = data["items"]
        caps = data["capacities"]
    except KeyError as e:
        raise LengthMismatch(f"missing field {e}") from None
    if len(caps) != T:
        raise LengthMismatch(f"T = {T} but {len(caps)} capacities")
    discounts = data.get("discounts")
    if discounts is not None and len(discounts) != T:
        raise LengthMismatch(f"T = {T} but {len(discounts)} discounts")
    return make_instance(
        [it["value"] for it in items],
        [it["weight"] for it in items],
        caps,
        discounts,
        [it.get("id", f"i{k + 1}") for k, it in enumerate(items)],
    )


def instance_to_json(inst: Instance) -> dict[str, Any]:
    out = {
        "T": inst.T,
        "items": [{"id": s, "value": _num_out(v), "weight": _num_out(w)}
                  for s, v, w in zip(inst.ids, inst.reporting_values, inst.weights)],
        "capacities": [_num_out(b) for b in inst.capacities],
    }
    if not inst.is_time_invariant:
        out["discounts"] = [_num_out(d) for d in inst.discounts]
    return out


def schedule_to_json(inst: Instance, sched: Schedule) -> dict[str, Any]:
    return {"insertion_time": dict(zip(inst.ids, sched.insertion_time))}


def schedule_from_json(inst: Instance, data: dict) -> Schedule:
    times: list[Optional[int]] = [None] * inst.N
    for item_id, s in data["insertion_time"].items():
        times[inst.index_of(item_id)] = None if s is None else int(s)
    sched = Schedule(tuple(times))
    _check_schedule(inst, sched)
    return sched


def load_instance(path: str | Path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_json(json.load(fh))


def dump_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_json(inst), indent=2) + "\n", encoding="utf-8")
