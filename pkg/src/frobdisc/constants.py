"""The local densities and Euler products behind the average count of squarefree
Frobenius discriminants.

Every per-prime factor is an exact ``Fraction``; products over many primes are
rounded once through mpmath at a working precision far beyond the tail bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath
import numpy as np

from .modarith import (
    CongruenceTarget,
    euler_phi,
    factorize,
    kronecker,
    legendre_table,
    moebius,
    sieve_primes,
)

DEFAULT_PRIME_CUT = 10**6
_DPS = 40


@dataclass
class EulerProductValue:
    """prefactor * prod(factors) truncated at prime_cut; |true - value| <= tail_bound."""

    value: mpmath.mpf
    tail_bound: float
    prime_cut: int
    factors: dict[int, Fraction]
    prefactor: Fraction = Fraction(1)
    degenerate: bool = False  # (r, h) not squarefree: defined to be 0

    def __float__(self):
        return float(self.value)

    def to_json(self, with_factors=True) -> dict:
        out = {
            "value": float(self.value),
            "tail_bound": self.tail_bound,
            "prime_cut": self.prime_cut,
            "prefactor": f"{self.prefactor.numerator}/{self.prefactor.denominator}",
        }
        if self.degenerate:
            out["degenerate"] = True
        if with_factors:
            out["factors"] = [
                {"ell": ell, "num": f.numerator, "den": f.denominator} for ell, f in self.factors.items()
            ]
        return out


def _product(prefactor, factors, prime_cut, degenerate=False):
    if degenerate:
        return EulerProductValue(mpmath.mpf(0), 0.0, prime_cut, {}, Fraction(0), True)
    with mpmath.workdps(_DPS):
        v = mpmath.mpf(prefactor.numerator) / prefactor.denominator
        for f in factors.values():
            v *= mpmath.mpf(f.numerator) / f.denominator
    # |log(factor)| <= 3/ell^2 for every ell > prime_cut, and sum_{n > P} 1/n^2 < 1/P
    tail = abs(float(v)) * 3.0 / max(prime_cut - 1, 1)
    return EulerProductValue(+v, tail, prime_cut, factors, prefactor)


def _odd_primes(limit):
    return [p for p in sieve_primes(limit) if p > 2]


# ---- c_t(n) -----------------------------------------------------------------


@lru_cache(maxsize=1024)
def _primes_of(n):
    return tuple(factorize(n).items()) if n > 1 else ()


@lru_cache(maxsize=1024)
def jacobi_row(n: int) -> np.ndarray:
    """(alpha | n) for alpha in [0, n), n odd, as a product of Legendre tables."""
    alpha = np.arange(n, dtype=np.int64)
    row = np.ones(n, dtype=np.int8)
    for p, e in _primes_of(n):
        leg = legendre_table(p).astype(np.int8)[alpha % p]
        row *= leg if e % 2 else leg * leg
    row.flags.writeable = False
    return row


def c_t_bruteforce(t: int, n: int, target: CongruenceTarget) -> int:
    """sum over alpha mod n with gcd(t^2 - alpha, n) = 1 and alpha = r mod gcd(n, h)
    of the Jacobi symbol (alpha | n)."""
    if n < 1 or n % 2 == 0:
        raise ValueError("c_t is defined for odd n >= 1")
    alpha = np.arange(n, dtype=np.int64)
    keep = np.ones(n, dtype=bool)
    for p, _ in _primes_of(n):
        keep &= (t * t - alpha) % p != 0
    g = gcd(n, target.h)
    if g > 1:
        keep &= (alpha - target.r) % g == 0
    return int(jacobi_row(n)[keep].sum(dtype=np.int64))


def _check_t(t, target):
    if gcd(t * t - target.r, target.h) != 1:
        raise ValueError(f"gcd(t^2 - r, h) != 1 for t={t}, {target}")


def c_t_closed(t: int, p: int, j: int, target: CongruenceTarget) -> int:
    """c_t(p^j) for an odd prime p and j >= 1 from the case analysis."""
    if j < 1:
        raise ValueError("j must be >= 1")
    q = p**j
    if target.h % p == 0:
        _check_t(t, target)
        return kronecker(target.r, q) * q // gcd(q, target.h)
    if j % 2:
        return 0 if t % p == 0 else -(p ** (j - 1))
    return q - p ** (j - 1) if t % p == 0 else q - 2 * p ** (j - 1)


def c_t(t: int, n: int, target: CongruenceTarget) -> int:
    """c_t(n) for odd n assembled multiplicatively from c_t_closed."""
    out = 1
    for p, j in (factorize(n).items() if n > 1 else ()):
        out *= c_t_closed(t, p, j, target)
    return out


# ---- local factors -----------------------------------------------------------


def G_factor(p: int) -> Fraction:
    return Fraction(2 * p * p + p - 1, p**4 - p**3 - 2 * p * p - p + 1)


def local_factor(ell: int) -> Fraction:
    """Density of tr^2 - 4 det not divisible by ell^2 in GL_2(Z/ell^2)."""
    return Fraction(ell**4 - 2 * ell**2 - ell + 1, ell**2 * (ell**2 - 1))


def P_factor(p: int) -> Fraction:
    return Fraction(p**4 - p**3 - 2 * p * p - p + 1, p * (p - 1) * (p * p - 1))


def csf_order_factor(ell: int) -> Fraction:
    """Density of det(g - 1) not divisible by ell^2 in GL_2(Z/ell^2)."""
    return 1 - Fraction(ell**3 - ell - 1, (ell**2 - 1) * ell**2 * (ell - 1))


def h_prefactor(target: CongruenceTarget) -> Fraction:
    """(1/3h) times the finitely many factors at primes dividing h."""
    r, h = target.canonical_r, target.h
    pre = Fraction(1, 3 * h)
    for ell, a in (factorize(h).items() if h > 1 else ()):
        chi = kronecker(r, ell)
        if r % ell == 0:
            if a == 1:
                pre *= Fraction(ell - 1, ell)
        else:
            pre *= Fraction(ell * (ell - 1 - chi), (ell - 1) * (ell - chi))
    return pre


def P_rh_prefactor(target: CongruenceTarget) -> Fraction:
    """The h-part of P(r, h): 1/phi(h) prod_{p|h} p/(p - (r|p)) prod_{p||h, p|r} (1 - 1/p)."""
    r, h = target.canonical_r, target.h
    pre = Fraction(1, euler_phi(h))
    for p, a in (factorize(h).items() if h > 1 else ()):
        pre *= Fraction(p, p - kronecker(r, p))
        if a == 1 and r % p == 0:
            pre *= Fraction(p - 1, p)
    return pre


@lru_cache(maxsize=32)
def frak_C(target: CongruenceTarget, prime_cut: int = DEFAULT_PRIME_CUT) -> EulerProductValue:
    """Main constant: (1/3h) * h-local factors * prod over odd ell not dividing h of
    (ell^4 - 2 ell^2 - ell + 1) / (ell^2 (ell^2 - 1))."""
    if not target.gcd_rh_squarefree:
        return _product(None, None, prime_cut, degenerate=True)
    factors = {ell: local_factor(ell) for ell in _odd_primes(prime_cut) if target.h % ell}
    return _product(h_prefactor(target), factors, prime_cut)


@lru_cache(maxsize=32)
def frak_C_alt(target: CongruenceTarget, prime_cut: int = DEFAULT_PRIME_CUT) -> EulerProductValue:
    """Same constant as P(r,h)/3 * prod_{p|h} (1 - (1 + (r|p))/p) * prod_{p not | h} (1 + G(p)/p)."""
    if not target.gcd_rh_squarefree:
        return _product(None, None, prime_cut, degenerate=True)
    pre = P_rh_prefactor(target) / 3
    for p in (factorize(target.h) if target.h > 1 else ()):
        pre *= 1 - Fraction(1 + kronecker(target.canonical_r, p), p)
    factors = {p: P_factor(p) * (1 + G_factor(p) / p) for p in _odd_primes(prime_cut) if target.h % p}
    return _product(pre, factors, prime_cut)


def C_t_product(t: int, target: CongruenceTarget, prime_cut: int = DEFAULT_PRIME_CUT) -> EulerProductValue:
    """C_t = P(r,h) prod_{p|t, p not | h} (1 + G(p)) as a truncated Euler product."""
    _check_t(t, target)
    if not target.gcd_rh_squarefree:
        raise ValueError(f"gcd(r, h) is not squarefree for {target}")
    pre = P_rh_prefactor(target)
    for p in (factorize(t) if abs(t) > 1 else ()):
        if p > 2 and target.h % p:
            pre *= 1 + G_factor(p)
    factors = {p: P_factor(p) for p in _odd_primes(prime_cut) if target.h % p}
    return _product(pre, factors, prime_cut)


# ---- truncated double sum ----------------------------------------------------


@dataclass
class _OddTable:
    """Per-odd-n data for n <= U, indexed by (n - 1) // 2."""

    U: int
    n: np.ndarray
    phi: np.ndarray
    c_base: np.ndarray  # c_t(n) for t prime to n
    phi_nh: np.ndarray  # phi(gcd(n, h))
    valuations: dict = field(default_factory=dict)


def _odd_table(U, target):
    from .modarith import spf_table

    n = np.arange(1, U + 1, 2, dtype=np.int64)
    spf = spf_table(max(U, 2))
    phi = n.copy()
    c = np.ones_like(n)
    phi_nh = np.ones_like(n)
    rem = n.copy()
    while True:
        live = rem > 1
        if not live.any():
            break
        p = spf[rem[live]].astype(np.int64)
        j = np.zeros_like(p)
        sub = rem[live]
        while True:
            div = sub % p == 0
            if not div.any():
                break
            sub = np.where(div, sub // p, sub)
            j += div
        rem[live] = sub
        pj = p**j
        idx = np.flatnonzero(live)
        phi[idx] = phi[idx] // p * (p - 1)
        in_h = target.h % p == 0
        if in_h.any():
            # t-independent branch: (r | p^j) p^j / gcd(p^j, h)
            for k in np.flatnonzero(in_h):
                pp, jj = int(p[k]), int(j[k])
                q = pp**jj
                c[idx[k]] *= kronecker(target.r, q) * q // gcd(q, target.h)
                phi_nh[idx[k]] *= euler_phi(gcd(q, target.h))
        out = ~in_h
        pm1 = pj[out] // p[out]
        c[idx[out]] *= np.where(j[out] % 2 == 1, -pm1, pj[out] - 2 * pm1)
    return _OddTable(U, n, phi, c, phi_nh)


def _c_for_t(tab, t, target):
    """c_t(n) over the odd table, correcting p | t, p not | h entries."""
    c = tab.c_base.copy()
    for p in (factorize(t) if abs(t) > 1 else ()):
        if p == 2 or target.h % p == 0 or p > tab.U:
            continue
        idx = np.arange((p - 1) // 2, len(c), p)
        m = tab.n[idx]
        j = np.zeros_like(m)
        while True:
            div = m % p == 0
            if not div.any():
                break
            m = np.where(div, m // p, m)
            j += div
        pj = p**j
        pm1 = pj // p
        # swap the p not | t local value for the p | t one
        old = np.where(j % 2 == 1, -pm1, pj - 2 * pm1)
        new = np.where(j % 2 == 1, 0, pj - pm1)
        c[idx] = c[idx] // old * new
    return c


def _d_terms(t, target, R):
    """(d, mu(d) phi((d^2,h)) / (phi(d^2) phi(h))) for odd squarefree d <= R,
    gcd(d, t) = 1, (d^2, h) | r."""
    out = []
    for d in range(1, R + 1, 2):
        mu = moebius(d)
        if mu == 0 or gcd(d, t) != 1:
            continue
        g = gcd(d * d, target.h)
        if target.r % g:
            continue
        out.append((d, Fraction(mu * euler_phi(g), euler_phi(d * d) * euler_phi(target.h))))
    return out


def _divisors_sf(d):
    ps = list(factorize(d)) if d > 1 else []
    divs = [(1, 1)]
    for p in ps:
        divs += [(e * p, -m) for e, m in divs]
    return divs


def truncated_Ct(t, target, U, R, tab=None):
    """sum_{n <= U odd} c_t(n)/n sum_{d <= R} mu(d)/phi([n d^2, h]) in floating point."""
    _check_t(t, target)
    tab = tab or _odd_table(U, target)
    c = _c_for_t(tab, t, target)
    w = c * tab.phi_nh / (tab.n * tab.phi).astype(np.float64)
    cache = {}
    total = 0.0
    for d, coef in _d_terms(t, target, R):
        inner = 0.0
        for e, mu in _divisors_sf(d):
            if e not in cache:
                cache[e] = w[(e - 1) // 2 :: e].sum()
            inner += mu * cache[e]
        total += float(coef) * inner
    return total


def C_t_doublesum(t: int, target: CongruenceTarget, N: int, D: int) -> float:
    """Truncated double sum for C_t over odd n <= N and odd d <= D."""
    return truncated_Ct(t, target, N, D)
