import pytest

from zkseq.zk import (GroundSet, Modulus, dilate, inv_unit, is_unit,
                      least_prime_divisor, signed_rep)


@pytest.mark.parametrize("k,p", [(2, 2), (9, 3), (13, 13), (15, 3), (49, 7), (1_000_003, 1_000_003)])
def test_least_prime_divisor(k, p):
    assert least_prime_divisor(k) == p


def test_least_prime_divisor_rejects_one():
    with pytest.raises(ValueError):
        least_prime_divisor(1)


@pytest.mark.parametrize("k", [5, 8, 13, 101])
def test_signed_rep_window(k):
    for x in range(k):
        r = signed_rep(x, k)
        assert r % k == x
        assert -k / 2 < r <= k / 2


def test_signed_rep_examples():
    assert signed_rep(6, 10) == -4
    assert signed_rep(5, 10) == 5   # upper boundary stays positive
    assert signed_rep(0, 7) == 0


def test_units_mod_12():
    assert {x for x in range(12) if is_unit(x, 12)} == {1, 5, 7, 11}
    for x in (1, 5, 7, 11):
        assert (x * inv_unit(x, 12)) % 12 == 1
    with pytest.raises(ValueError):
        inv_unit(4, 12)


def test_modulus_of():
    m = Modulus.of(9)
    assert m.k == 9 and m.p == 3
    with pytest.raises(ValueError):
        Modulus.of(1)


def test_ground_set_canonicalizes():
    A = GroundSet.of(10, [-1, 11, 3])
    assert set(A) == {9, 1, 3}
    assert A.sorted() == [1, 3, 9]
    assert len(A) == 3


def test_ground_set_rejects_zero():
    with pytest.raises(ValueError):
        GroundSet.of(10, [5, 10])


def test_signed_order():
    A = GroundSet.of(10, [9, 2, 6])
    # ordered by absolute signed value: -1, 2, -4
    assert A.signed() == [-1, 2, -4]


def test_dilate_unit_only():
    A = GroundSet.of(10, [1, 2])
    assert set(A.dilate(3)) == {3, 6}
    with pytest.raises(ValueError):
        A.dilate(2)
    assert set(dilate(A, 7)) == {7, 4}


@pytest.mark.parametrize("seed", range(5))
def test_dilate_bijective(seed):
    import random
    rng = random.Random(seed)
    k = rng.choice([11, 15, 32, 101])
    elems = rng.sample(range(1, k), min(6, k - 1))
    A = GroundSet.of(k, elems)
    lam = rng.choice([x for x in range(1, k) if is_unit(x, k)])
    B = A.dilate(lam)
    assert len(B) == len(A)
    assert B.dilate(inv_unit(lam, k)) == A


def test_json_round_trip():
    A = GroundSet.of(17, [3, 5, 12])
    assert GroundSet.from_json(A.to_json()) == A
