import warnings
from fractions import Fraction

import pytest

from inkspan.errors import GeneratorOverflow, NotDivisible
from inkspan.generators import gen_3partition, gen_gap_family, gen_random
from inkspan.model import instance_to_json, validate_instance
from inkspan.oracle import brute_force


def test_gap_family_k2_m2():
    inst = gen_gap_family(2, 2)
    assert inst.T == 4
    assert inst.values == inst.weights == (2, 4)
    assert inst.capacities == (2, 2, 4, 4)


def test_gap_family_smallest():
    inst = gen_gap_family(2, 1)
    assert inst.T == 2 and inst.values == (2,) and inst.capacities == (2, 2)


def test_gap_family_k3_m2():
    inst = gen_gap_family(3, 2)
    assert inst.T == 9
    assert inst.capacities == (3, 3, 3, 3, 3, 3, 9, 9, 9)


@pytest.mark.parametrize("k,m", [(2, 1), (2, 4), (3, 3), (4, 2), (5, 2)])
def test_gap_family_valid(k, m):
    validate_instance(gen_gap_family(k, m))


def test_gap_family_overflow():
    with pytest.raises(GeneratorOverflow):
        gen_gap_family(10, 9)


def test_3partition_targets():
    inst, target = gen_3partition([10, 11, 11, 10, 10, 12])
    assert target == 96 and inst.capacities == (32, 64)
    assert brute_force(inst).value == 96
    inst, target = gen_3partition([10, 10, 10, 10, 10, 14])
    assert target == 96
    assert brute_force(inst).value < 96


def test_3partition_m3():
    # B = 40: yes via {11,13,16},{12,14,14},{12,13,15}
    yes, target = gen_3partition([11, 13, 16, 12, 14, 14, 12, 13, 15])
    assert brute_force(yes).value == target == 240
    # B = 40 again, every a_i in (10, 20), but no three of them sum to 40 twice
    no, target = gen_3partition([11, 17, 11, 11, 16, 13, 13, 13, 15])
    assert brute_force(no).value < target


def test_3partition_single_period():
    inst, target = gen_3partition([4, 4, 5])
    assert inst.T == 1 and target == 13
    assert brute_force(inst).value == 13


def test_3partition_not_divisible():
    with pytest.raises(NotDivisible):
        gen_3partition([10, 11, 11, 10, 10, 13])


def test_3partition_range_warning():
    with pytest.warns(UserWarning):
        gen_3partition([1, 1, 10])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gen_3partition([10, 11, 11, 10, 10, 12])


def test_random_deterministic():
    a = instance_to_json(gen_random(5, 3, seed=7))
    b = instance_to_json(gen_random(5, 3, seed=7))
    assert a == b
    assert a != instance_to_json(gen_random(5, 3, seed=8))


def test_random_shape():
    inst = gen_random(6, 4, seed=3, fill_factor=0.5)
    assert inst.N == 6 and inst.T == 4
    assert inst.capacities[-1] == sum(inst.weights) // 2
    assert all(1 <= w <= 20 for w in inst.weights)
    assert all(1 <= v <= 100 for v in inst.values)


def test_random_discounts():
    inst = gen_random(2, 3, seed=0, discount_rate=0.5)
    assert inst.discounts[0] == Fraction(606531, 10**6)
    assert not inst.is_time_invariant


def test_random_empty():
    inst = gen_random(0, 2, seed=0)
    assert inst.N == 0 and brute_force(inst).value == 0
