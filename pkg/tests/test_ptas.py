import math
import os
from fractions import Fraction

import numpy as np
import pytest

from inkspan.errors import BudgetExceeded, NotTimeInvariant
from inkspan.generators import gen_random
from inkspan.lp import solve_lp
from inkspan.model import check_feasible, make_instance
from inkspan.oracle import brute_force
from inkspan.ptas import (
    ValueClassing,
    build_classes,
    build_Q_lp,
    class_count,
    count_instance_lps,
    count_lps,
    enumerate_sigmas,
    feasible_sigmas,
    round_class,
    round_tail,
    solve_ptas,
)

HALF = Fraction(1, 2)


def iik_corpus(n, seed=99, max_n=7, max_t=3):
    rng = np.random.default_rng(seed)
    for s in range(n):
        yield gen_random(int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_t + 1)),
                         seed=seed * 1000 + s, fill_factor=float(rng.uniform(0.2, 0.9)))


def synthetic(sizes, T, J):
    classes = []
    nxt = 1
    for s in sizes:
        classes.append(tuple(range(nxt, nxt + s)))
        nxt += s
    return ValueClassing(0, Fraction(1, J), T, len(sizes), J, tuple(classes), (), {})


def test_classes_e1(e1):
    c = build_classes(e1, 0, HALF)
    assert (c.K, c.J) == (3, 2)
    assert c.classes == ((1,), (), ()) and c.tail == ()
    assert c.modified[1] == 3


def test_class_count_boundary():
    assert class_count(Fraction(3, 10), 3) == 7
    # (1/2)^2 = 1/4 is not < 1/4, so K = 3 at T = 2
    assert class_count(HALF, 2) == 3


def test_partition_sanity():
    for inst in iik_corpus(20, seed=5, max_n=8):
        for h in range(inst.N):
            for eps in (Fraction(3, 10), HALF):
                c = build_classes(inst, h, eps)
                below = [j for j in range(inst.N) if inst.values[j] <= inst.values[h]]
                assert sum(c.sizes) + len(c.tail) + 1 == len(below)
                for k, members in enumerate(c.classes, start=1):
                    for j in members:
                        vh = inst.values[h]
                        assert (1 - eps) ** k * vh < inst.values[j] <= (1 - eps) ** (k - 1) * vh
                        assert c.modified[j] == (1 - eps) ** (k - 1) * vh
                ws = [[inst.weights[j] for j in m] for m in c.classes]
                assert all(w == sorted(w) for w in ws)


def test_not_time_invariant():
    inst = make_instance([1], [1], [1, 1], [1, 2])
    with pytest.raises(NotTimeInvariant):
        build_classes(inst, 0, HALF)
    with pytest.raises(NotTimeInvariant):
        solve_ptas(inst, HALF)


def test_sigma_examples():
    one = synthetic([2], T=2, J=2)
    assert list(enumerate_sigmas(one)) == [((0, 0),), ((0, 1),), ((0, 2),),
                                           ((1, 1),), ((1, 2),), ((2, 2),)]
    three = synthetic([2, 2, 2], T=2, J=2)
    assert sum(1 for _ in enumerate_sigmas(three)) == 216
    assert count_lps(2, 2, HALF, [2, 2, 2]) == 432


def test_count_bound_form():
    J, T, K = 2, 3, class_count(HALF, 3)
    assert count_lps(4, T, HALF) == 4 * (J * (J + T) ** J) ** K
    assert count_lps(1, 2, HALF, [0, 0, 0]) == 1


def test_sigma_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_sigmas(synthetic([3, 3], T=3, J=3), budget=10)


def test_q_lp_e1(e1):
    c = build_classes(e1, 0, HALF)
    for s1 in ((0, 1), (1, 1)):
        out = solve_lp(build_Q_lp(e1, c, (s1, (0, 0), (0, 0))))
        assert out.optimal and out.objective == pytest.approx(9)


def test_round_class_example():
    inst = make_instance([10, 9, 9, 9], [1, 1, 2, 3], [10])
    c = build_classes(inst, 0, HALF)
    assert c.classes[0] == (1, 2, 3) and c.J == 2
    xbar = np.array([[1.0], [1.0], [1.0], [0.5]])
    assert round_class(xbar, inst, c, 0, (2,)) == (2,)


def test_round_class_pinned_prefix():
    inst = make_instance([10, 9, 9, 9], [1, 1, 2, 3], [2, 10])
    c = build_classes(inst, 0, Fraction(1, 3))     # J = 3
    sigma = ((1, 2),) + ((0, 0),) * (c.K - 1)
    out = solve_lp(build_Q_lp(inst, c, sigma))
    xbar = out.x.reshape(len(c.items), 2)
    assert round_class(xbar, inst, c, 0, sigma[0]) == (1, 2)


def test_round_tail_cases():
    inst = make_instance([100, 1], [1, 3], [4, 4])
    c = build_classes(inst, 0, HALF)
    assert c.tail == (1,)
    xbar = np.array([[0.0, 1.0], [1.0, 1.0]])
    assert round_tail(xbar, inst, c) == {1: 1}
    e = build_classes(make_instance([1], [1], [1]), 0, HALF)
    assert round_tail(np.ones((1, 1)), make_instance([1], [1], [1]), e) == {}


def test_ptas_e1(e1):
    r = solve_ptas(e1, HALF)
    assert r.value == 8
    assert r.claimed_factor == Fraction(1, 4)
    assert r.witness["h"] == "i1"
    assert r.witness["sigma"][0] == [0, 1]


def test_single_item_optimal():
    for eps in (Fraction(3, 10), HALF):
        inst = make_instance([5], [2], [1, 2, 3])
        assert solve_ptas(inst, eps).value == brute_force(inst).value == 10


def test_nothing_fits():
    r = solve_ptas(make_instance([5], [4], [1, 2]), HALF)
    assert r.value == 0


def test_budget_and_env(monkeypatch):
    inst = gen_random(6, 3, seed=4)
    with pytest.raises(BudgetExceeded):
        solve_ptas(inst, Fraction(3, 10), budget=5)
    monkeypatch.setenv("INKSPAN_LP_BUDGET", "5")
    with pytest.raises(BudgetExceeded):
        solve_ptas(inst, Fraction(3, 10))


def test_exact_screen_matches_lp():
    """The load test for empty Q agrees with solving every LP."""
    for inst in iik_corpus(15, seed=8, max_n=5):
        for h in range(inst.N):
            c = build_classes(inst, h, HALF)
            screened = set(feasible_sigmas(inst, c))
            solved = {s for s in enumerate_sigmas(c) if solve_lp(build_Q_lp(inst, c, s)).optimal}
            assert screened == solved


def test_instance_count_matches_enumeration():
    for inst in iik_corpus(10, seed=3):
        total = sum(sum(1 for _ in enumerate_sigmas(build_classes(inst, h, HALF)))
                    for h in range(inst.N))
        assert count_instance_lps(inst, HALF) == total


def test_rounding_properties():
    checked = chain = 0
    for inst in iik_corpus(30, seed=21):
        for eps in (Fraction(3, 10), HALF):
            recs = []
            res = solve_ptas(inst, eps, on_disjunct=recs.append)
            assert check_feasible(inst, res.schedule)
            opt = brute_force(inst).value
            assert res.value >= (1 - eps) ** 2 * opt
            for r in recs:
                checked += 1
                assert check_feasible(inst, r.schedule)
                c = build_classes(inst, r.h, eps)
                for k, members in enumerate(c.classes):
                    times = [r.schedule.insertion_time[i] for i in members]
                    # present items form a lightest-first prefix in every period
                    for t in range(1, inst.T + 1):
                        here = [s is not None and s <= t for s in times]
                        assert here == sorted(here, reverse=True)
                for lp_v, got in zip(r.class_lp, r.class_rounded):
                    assert float(got) >= (1 - float(eps)) * lp_v - 1e-6
                assert r.tail_lp - float(r.tail_rounded) <= float(eps * inst.values[r.h]) + 1e-6
                if r.h_row_integral:
                    chain += 1
                    assert float(r.rounded_value) >= (1 - float(eps)) * r.lp_value - 1e-6
    assert checked > 100 and chain > 100


def test_threads_match_serial():
    inst = gen_random(6, 3, seed=12)
    a = solve_ptas(inst, HALF)
    b = solve_ptas(inst, HALF, threads=2)
    assert (a.value, a.schedule, a.witness) == (b.value, b.schedule, b.witness)
