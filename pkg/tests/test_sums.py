import warnings
from fractions import Fraction

import pytest

from frobdisc.constants import frak_C
from frobdisc.modarith import CongruenceTarget
from frobdisc.sums import STConfig, admissible_t, default_U, s_of_T, s_of_T_convergence, s_of_T_literal

SMALL = [(0, 1), (2, 3), (1, 3)]


def test_T_zero():
    assert s_of_T(STConfig(0, 9, 3)) == 0
    assert s_of_T(STConfig(0, 9, 3), exact=True) == Fraction(0)


def test_admissible_t():
    assert admissible_t(9, CongruenceTarget(0, 1)) == [1, 3, 5, 7, 9]
    # t^2 - 1 is divisible by 3 unless 3 | t
    assert admissible_t(15, CongruenceTarget(1, 3)) == [3, 9, 15]


@pytest.mark.parametrize("rh", SMALL)
@pytest.mark.parametrize("T,U,R", [(1, 1, 1), (9, 15, 3), (15, 45, 5), (11, 33, 5)])
def test_exact_matches_literal(rh, T, U, R):
    cfg = STConfig(T, U, R, CongruenceTarget(*rh))
    assert s_of_T(cfg, exact=True) == s_of_T_literal(cfg)


@pytest.mark.parametrize("rh", SMALL)
def test_float_matches_exact(rh):
    cfg = STConfig(15, 45, 5, CongruenceTarget(*rh))
    assert s_of_T(cfg) == pytest.approx(float(s_of_T(cfg, exact=True)), rel=1e-12)


def test_additivity():
    target = CongruenceTarget(2, 3)
    total, per_t = s_of_T(STConfig(15, 45, 5, target), exact=True, per_t=True)
    assert sum(per_t.values()) == total
    for T in (5, 9, 13):
        part = s_of_T(STConfig(T, 45, 5, target), exact=True)
        assert part == sum(v for t, v in per_t.items() if t <= T)


def test_unbalanced_warning():
    with pytest.warns(UserWarning):
        STConfig(10, 10, 5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        STConfig(10, 25, 5)


def test_bad_config():
    with pytest.raises(ValueError):
        STConfig(-1, 10, 1)


def test_default_U():
    assert default_U(2000, 10) == 4472
    assert default_U(100, 3) == 90


def test_convergence_rows():
    target = CongruenceTarget(0, 1)
    rows = s_of_T_convergence(500, target, [3, 10, 30], prime_cut=10**4)
    pred = 1.5 * float(frak_C(target, 10**4).value)
    assert all(r.predicted == pred for r in rows)
    assert [r.U for r in rows] == [default_U(500, R) for R in (3, 10, 30)]
    assert rows[-1].deviation < rows[0].deviation
    assert rows[-1].deviation < 0.01
