"""Exhaustive counts in GL_2(Z/nZ) for the local densities of squarefree
Frobenius discriminants, and the constants assembled from them under a full
(generic) Galois image."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .constants import DEFAULT_PRIME_CUT, EulerProductValue, _product, csf_order_factor, local_factor
from .modarith import CongruenceTarget, ResourceError, factorize, kronecker, sieve_primes

ENUM_BUDGET = 2 * 10**9  # matrices


@dataclass(frozen=True)
class Gl2Count:
    ell: int
    beta: int
    group_order: int
    matching: int
    density: Fraction
    closed_form: Fraction | None = None

    @property
    def modulus(self):
        return self.ell**self.beta

    @property
    def agrees(self):
        return self.closed_form is None or self.density == self.closed_form

    def to_json(self):
        out = {
            "ell": self.ell,
            "beta": self.beta,
            "modulus": self.modulus,
            "order": self.group_order,
            "matching": self.matching,
            "density": f"{self.density.numerator}/{self.density.denominator}",
        }
        if self.closed_form is not None:
            out["closed_form"] = f"{self.closed_form.numerator}/{self.closed_form.denominator}"
            out["agrees"] = self.agrees
        return out


@lru_cache(maxsize=16)
def tr_det_histogram(n: int) -> np.ndarray:
    """counts[tr, det] over all n^4 matrices mod n (singular ones included)."""
    if n**4 > ENUM_BUDGET:
        raise ResourceError(f"enumerating {n}^4 matrices exceeds budget {ENUM_BUDGET}")
    r = np.arange(n, dtype=np.int64)
    bc = (r[:, None] * r[None, :]) % n  # all (b, c)
    bc = bc.ravel()
    counts = np.zeros(n * n, dtype=np.int64)
    d = r[:, None]
    for a in range(n):
        tr = (a + d) % n  # (n, 1)
        det = (a * d - bc[None, :]) % n  # (n, n^2)
        counts += np.bincount((tr * n + det).ravel(), minlength=n * n)
    return counts.reshape(n, n)


def _unit_det_mask(n):
    det = np.arange(n)
    ok = np.ones(n, dtype=bool)
    for p in factorize(n):
        ok &= det % p != 0
    return ok


def group_order(n: int) -> int:
    """|GL_2(Z/n)| counted from the enumeration."""
    return int(tr_det_histogram(n)[:, _unit_det_mask(n)].sum())


def group_order_formula(ell: int, beta: int) -> int:
    return ell ** (4 * (beta - 1)) * (ell**2 - 1) * (ell**2 - ell)


def _count(n, predicate):
    """Invertible matrices mod n whose (tr, det) satisfy predicate(tr, det) (arrays)."""
    hist = tr_det_histogram(n)
    tr, det = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    keep = _unit_det_mask(n)[None, :] & predicate(tr, det)
    order = int(hist[:, _unit_det_mask(n)].sum())
    return order, int(hist[keep].sum())


def _check_ell(ell):
    if ell < 3 or any(ell % q == 0 for q in range(2, int(ell**0.5) + 1)):
        raise ValueError(f"ell must be an odd prime, got {ell}")


def count_p1(ell: int) -> Gl2Count:
    """g mod ell^2 with tr^2 - 4 det not divisible by ell^2."""
    _check_ell(ell)
    n = ell * ell
    order, match = _count(n, lambda tr, det: (tr * tr - 4 * det) % n != 0)
    return Gl2Count(ell, 2, order, match, Fraction(match, order), local_factor(ell))


def p2_closed(ell: int, alpha: int, r: int) -> Fraction:
    """Closed form of the joint density (ell^2 does not divide disc, disc = r mod ell^alpha)."""
    chi = kronecker(r, ell)
    if r % ell:
        return Fraction(ell * (ell - 1 - chi), (ell - 1) * (ell - chi) * ell**alpha)
    if alpha == 1:
        return Fraction(ell - 1, ell ** (alpha + 1))
    if r % (ell * ell):
        return Fraction(1, ell**alpha)
    return Fraction(0)


def count_p2(ell: int, alpha: int, r: int) -> Gl2Count:
    """g mod ell^beta, beta = max(alpha, 2), with disc not = 0 mod ell^2 and disc = r mod ell^alpha."""
    _check_ell(ell)
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    beta = max(alpha, 2)
    n = ell**beta
    l2, la = ell * ell, ell**alpha

    def pred(tr, det):
        disc = tr * tr - 4 * det
        return (disc % l2 != 0) & ((disc - r) % la == 0)

    order, match = _count(n, pred)
    return Gl2Count(ell, beta, order, match, Fraction(match, order), p2_closed(ell, alpha, r))


def count_order_squarefree_factor(ell: int) -> Gl2Count:
    """g mod ell^2 with det(g) - tr(g) + 1 = det(g - 1) not divisible by ell^2."""
    _check_ell(ell)
    n = ell * ell
    order, match = _count(n, lambda tr, det: (det - tr + 1) % n != 0)
    return Gl2Count(ell, 2, order, match, Fraction(match, order), csf_order_factor(ell))


# ---- generic-image constants -----------------------------------------------


@dataclass
class GenericConstant:
    level: int
    m: int
    P_m: Fraction
    product: EulerProductValue

    @property
    def value(self):
        return self.product.value

    def to_json(self):
        out = {"level": self.level, "m": self.m, "P_m": f"{self.P_m.numerator}/{self.P_m.denominator}"}
        out.update(self.product.to_json(with_factors=False))
        return out


def beta_modulus(level: int, h: int = 1) -> int:
    """m = prod_{ell | level} ell^max(2, v_ell(level), v_ell(h))."""
    if level < 2 or level % 2:
        raise ValueError("the level M_E must be even")
    m = 1
    for ell, gam in factorize(level).items():
        alpha = 0
        hh = h
        while hh % ell == 0:
            hh //= ell
            alpha += 1
        m *= ell ** max(2, gam, alpha)
    return m


def P_level(level: int, target: CongruenceTarget) -> tuple[int, Fraction]:
    """Density in GL_2(Z/m) of tr^2 - 4 det avoiding ell^2 and meeting r mod ell^alpha(ell)
    for every ell | level, counted by enumeration mod m."""
    m = beta_modulus(level, target.h)
    conds = []
    for ell in factorize(level):
        la = gcd(target.h, ell**64)
        conds.append((ell * ell, la))

    def pred(tr, det):
        disc = tr * tr - 4 * det
        ok = np.ones(disc.shape, dtype=bool)
        for l2, la in conds:
            ok &= disc % l2 != 0
            if la > 1:
                ok &= (disc - target.r) % la == 0
        return ok

    order, match = _count(m, pred)
    return m, Fraction(match, order)


def csf_generic(target: CongruenceTarget, level: int = 2, prime_cut: int = DEFAULT_PRIME_CUT) -> GenericConstant:
    """Conjectural constant for a curve whose Galois image is full, with level M_E.

    The mod-m density P(m) already contains the congruence mod ell^alpha for
    ell | gcd(level, h), so only the part of h prime to the level is divided out.
    """
    m, pm = P_level(level, target)
    if not target.gcd_rh_squarefree:
        return GenericConstant(level, m, pm, _product(None, None, prime_cut, degenerate=True))
    level_primes = set(factorize(level))
    h_out = 1
    pre = pm
    for ell, alpha in (factorize(target.h).items() if target.h > 1 else ()):
        if ell in level_primes:
            continue
        h_out *= ell**alpha
        pre *= p2_closed(ell, alpha, target.r) * ell**alpha
    pre /= h_out
    factors = {
        ell: local_factor(ell)
        for ell in sieve_primes(prime_cut)
        if ell > 2 and ell not in level_primes and target.h % ell
    }
    return GenericConstant(level, m, pm, _product(pre, factors, prime_cut))


def csf_prime_generic(level: int = 2, prime_cut: int = DEFAULT_PRIME_CUT) -> GenericConstant:
    """Constant for squarefree p + 1 - a_p under a full image of level M_E."""
    m = beta_modulus(level)
    primes = list(factorize(level))
    order, match = _count(m, lambda tr, det: np.logical_and.reduce([(det - tr + 1) % (l * l) != 0 for l in primes]))
    pm = Fraction(match, order)
    factors = {ell: csf_order_factor(ell) for ell in sieve_primes(prime_cut) if ell > 2 and level % ell}
    return GenericConstant(level, m, pm, _product(pm, factors, prime_cut))


def conjugation_closed(ell: int, samples: int = 50, seed: int = 0) -> bool:
    """Spot check that the P1 matching set mod ell^2 is closed under conjugation."""
    n = ell * ell
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        while True:
            g = rng.integers(0, n, size=(2, 2))
            det = int(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) % n
            if det % ell:
                break
        while True:
            x = rng.integers(0, n, size=(2, 2))
            dx = int(x[0, 0] * x[1, 1] - x[0, 1] * x[1, 0]) % n
            if dx % ell:
                break
        xinv = (pow(dx, -1, n) * np.array([[x[1, 1], -x[0, 1]], [-x[1, 0], x[0, 0]]])) % n
        y = (x @ g @ xinv) % n
        disc_g = (int(np.trace(g)) ** 2 - 4 * det) % n
        dy = int(y[0, 0] * y[1, 1] - y[0, 1] * y[1, 0]) % n
        disc_y = (int(np.trace(y)) ** 2 - 4 * dy) % n
        if (disc_g != 0) != (disc_y != 0):
            return False
    return True
