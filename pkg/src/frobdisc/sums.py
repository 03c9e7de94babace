"""Truncated evaluation of

    S(T) = sum_{t <= T odd, (t^2 - r, h) = 1} sum_{n <= U odd} (1/n) c_t(n)
               sum_{d <= R odd, (d, nt) = 1, (d^2, h) | r} mu(d) / phi([n d^2, h])

and its convergence to (3/2) C T.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .constants import _c_for_t, _d_terms, _divisors_sf, _odd_table, c_t_bruteforce, frak_C
from .modarith import CongruenceTarget, euler_phi, factorize, lcm, moebius


@dataclass(frozen=True)
class STConfig:
    T: int
    U: int
    R: int
    target: CongruenceTarget = CongruenceTarget(0, 1)

    def __post_init__(self):
        if self.T < 0 or self.U < 1 or self.R < 1:
            raise ValueError("need T >= 0, U >= 1, R >= 1")
        if self.R * self.R > self.U:
            warnings.warn(f"U={self.U} < R^2={self.R**2}; truncations are unbalanced", stacklevel=2)


def admissible_t(T: int, target: CongruenceTarget) -> list[int]:
    return [t for t in range(1, T + 1, 2) if gcd(t * t - target.r, target.h) == 1]


def _t_key(t, target, U):
    # c_t(p^j) and the d-range depend on t only through its odd primes outside h
    return frozenset(p for p in (factorize(t) if t > 1 else ()) if p > 2 and target.h % p and p <= U)


def t_contribution(t, target, U, R, tab=None, exact=False):
    """F(t): the inner triple sum for one t."""
    tab = tab or _odd_table(U, target)
    c = _c_for_t(tab, t, target)
    d_terms = _d_terms(t, target, R)
    if exact:
        w = [Fraction(int(ci) * int(pn), int(n) * int(ph)) for ci, pn, n, ph in zip(c, tab.phi_nh, tab.n, tab.phi)]
        sums = {}
        total = Fraction(0)
        for d, coef in d_terms:
            inner = Fraction(0)
            for e, mu in _divisors_sf(d):
                if e not in sums:
                    sums[e] = sum(w[(e - 1) // 2 :: e], Fraction(0))
                inner += mu * sums[e]
            total += coef * inner
        return total
    w = c * tab.phi_nh / (tab.n * tab.phi).astype(float)
    sums = {}
    total = 0.0
    for d, coef in d_terms:
        inner = 0.0
        for e, mu in _divisors_sf(d):
            if e not in sums:
                sums[e] = float(w[(e - 1) // 2 :: e].sum())
            inner += mu * sums[e]
        total += float(coef) * inner
    return total


def s_of_T(config: STConfig, exact: bool = False, per_t: bool = False):
    """S(T) with c_t(n) from the closed form; exact=True returns a Fraction.

    per_t=True also returns {t: F(t)} so partial sums can be checked for additivity."""
    target = config.target
    ts = admissible_t(config.T, target)
    if not ts:
        zero = Fraction(0) if exact else 0.0
        return (zero, {}) if per_t else zero
    tab = _odd_table(config.U, target)
    cache = {}
    contrib = {}
    for t in ts:
        key = _t_key(t, target, config.U)
        if key not in cache:
            cache[key] = t_contribution(t, target, config.U, config.R, tab, exact)
        contrib[t] = cache[key]
    if exact:
        total = sum(contrib.values(), Fraction(0))
    else:
        total = math.fsum(contrib[t] for t in ts)
    return (total, contrib) if per_t else total


def s_of_T_literal(config: STConfig) -> Fraction:
    """Literal quadruple sum with explicit residue loops; only for tiny configs."""
    target = config.target
    r, h = target.r, target.h
    total = Fraction(0)
    for t in admissible_t(config.T, target):
        for n in range(1, config.U + 1, 2):
            alpha_sum = c_t_bruteforce(t, n, target)
            if alpha_sum == 0:
                continue
            inner = Fraction(0)
            for d in range(1, config.R + 1, 2):
                if gcd(d, n * t) != 1 or r % gcd(d * d, h):
                    continue
                mu = moebius(d)
                if mu:
                    inner += Fraction(mu, euler_phi(lcm(n * d * d, h)))
            total += Fraction(alpha_sum, n) * inner
    return total


@dataclass
class ConvergenceRow:
    R: int
    U: int
    S: float
    S_over_T: float
    predicted: float

    @property
    def deviation(self):
        return abs(self.S_over_T - self.predicted)


def default_U(T: int, R: int) -> int:
    return isqrt(T * R**4)  # floor(sqrt(T) R^2)


def s_of_T_convergence(T: int, target: CongruenceTarget, R_list, prime_cut: int | None = None) -> list[ConvergenceRow]:
    """Rows (R, U = sqrt(T) R^2, S(T)/T, (3/2) C) for each R."""
    const = frak_C(target) if prime_cut is None else frak_C(target, prime_cut)
    predicted = 1.5 * float(const.value)
    rows = []
    for R in R_list:
        U = default_U(T, R)
        S = s_of_T(STConfig(T, U, R, target))
        rows.append(ConvergenceRow(R, U, S, S / T if T else 0.0, predicted))
    return rows
