import random
from fractions import Fraction
from math import gcd

import pytest

from frobdisc.classnum import batch_class_table, class_number, kronecker_H, reduced_forms, unit_count


def brute_forms(D):
    """Primitive reduced forms by scanning every (a, b) with a^2 <= |D|."""
    out = set()
    for a in range(1, -D + 1):
        if a * a > -D:
            break
        for b in range(-a, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or gcd(gcd(a, b), c) != 1:
                continue
            if (abs(b) == a or a == c) and b < 0:
                continue
            out.add((a, b, c))
    return out


def brute_units(D):
    """Units of the order of discriminant D: solutions of x^2 + bxy + cy^2 = 1 for the principal form."""
    b = D % 2
    c = (b - D) // 4
    return sum(1 for x in range(-3, 4) for y in range(-3, 4) if x * x + b * x * y + c * y * y == 1)


@pytest.mark.parametrize("D,h", [(-3, 1), (-23, 3), (-16, 1), (-4, 1), (-15, 2), (-20, 2), (-24, 2)])
def test_class_number_examples(D, h):
    assert class_number(D) == h == len(brute_forms(D))


def test_forms_for_minus_23():
    assert set(reduced_forms(-23)) == {(1, 1, 6), (2, 1, 3), (2, -1, 3)}


def test_invalid_discriminant():
    for D in (-1, -2, -5, 0, 8):
        with pytest.raises(ValueError):
            class_number(D)
        with pytest.raises(ValueError):
            unit_count(D)


def test_unit_count():
    assert unit_count(-3) == brute_units(-3) == 6
    assert unit_count(-4) == brute_units(-4) == 4
    assert unit_count(-19) == brute_units(-19) == 2
    assert all(unit_count(D) == brute_units(D) for D in range(-3, -400, -1) if D % 4 in (0, 1))


def test_class_number_one_list():
    fundamental = []
    for D in range(-3, -201, -1):
        if D % 4 == 1 and all(D % (q * q) for q in range(3, 15, 2)):
            fundamental.append(D)
        elif D % 4 == 0 and (D // 4) % 4 in (2, 3) and all((D // 4) % (q * q) for q in range(3, 15, 2)):
            fundamental.append(D)
    ones = [D for D in fundamental if class_number(D) == 1]
    assert ones == [-3, -4, -7, -8, -11, -19, -43, -67, -163]


@pytest.mark.parametrize(
    "D,H", [(-19, Fraction(1, 2)), (-16, Fraction(3, 4)), (-3, Fraction(1, 6)), (-12, Fraction(1, 2) + Fraction(1, 6))]
)
def test_kronecker_H_examples(D, H):
    assert kronecker_H(D) == H


def test_kronecker_H_guard():
    # -6 = 2 mod 4 with no square factor: no admissible f
    assert kronecker_H(-6) == 0
    with pytest.raises(ValueError):
        kronecker_H(5)


def test_kronecker_H_denominator_divides_12():
    for D in range(-3, -3000, -1):
        assert 12 % kronecker_H(D).denominator == 0


def test_batch_table_small():
    assert batch_class_table(3).as_dict() == {-3: 1}
    t = batch_class_table(25).as_dict()
    for D in (-3, -4, -7, -8, -11, -16, -19):
        assert t[D] == 1
    for D in (-15, -20, -24):
        assert t[D] == 2
    assert t[-23] == 3
    assert set(t) == {D for D in range(-3, -26, -1) if D % 4 in (0, 1)}


def test_batch_table_agrees_up_to_1e4():
    tab = batch_class_table(10**4)
    for D in range(-3, -10**4 - 1, -1):
        if D % 4 in (0, 1):
            assert tab[D] == class_number(D), D


def test_batch_table_large_spot_check():
    limit = 4 * 10**5
    tab = batch_class_table(limit)
    assert tab.visits <= 2 * limit**1.5
    rng = random.Random(7)
    picks = [D for D in (-rng.randrange(3, limit + 1) for _ in range(400)) if D % 4 in (0, 1)][:100]
    assert len(picks) == 100
    for D in picks:
        assert tab[D] == class_number(D)


@pytest.mark.parametrize("limit", [100, 1000, 20000])
def test_batch_table_visit_bound(limit):
    assert batch_class_table(limit).visits <= 2 * limit**1.5
