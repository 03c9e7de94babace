"""Elementary arithmetic: sieves, Kronecker symbol, squarefree tests and
membership in the congruence class of squarefree integers Delta(r, h)."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

# ints per table entry; 4e8 entries is ~1.6 GB for int32 tables
MAX_SIEVE = 400_000_000


class ResourceError(RuntimeError):
    """A requested table or enumeration exceeds the configured budget."""


def _check_budget(limit, budget=MAX_SIEVE):
    if limit > budget:
        raise ResourceError(f"table of size {limit} exceeds budget {budget}")


def sieve_primes(limit: int) -> list[int]:
    """Primes <= limit in ascending order."""
    if limit < 2:
        return []
    _check_budget(limit)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if is_p[p]:
            is_p[p * p :: 2 * p] = False
    return np.flatnonzero(is_p).tolist()


def spf_table(limit: int) -> np.ndarray:
    """Smallest prime factor of every n <= limit (entries 0 and 1 are 0/1)."""
    _check_budget(limit)
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[1] = 1
    spf[2::2] = 2
    for p in range(3, isqrt(limit) + 1, 2):
        if spf[p] == 0:
            block = spf[p * p :: 2 * p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return spf


def squarefree_table(limit: int) -> np.ndarray:
    """Boolean mask sf[n] = n is squarefree, for 0 <= n <= limit (sf[0] False)."""
    _check_budget(limit)
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    for p in sieve_primes(isqrt(limit)):
        sf[p * p :: p * p] = False
    return sf


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p, step = 5, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += step
        step = 6 - step
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), extending the Jacobi symbol to even and negative n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        v = (n & -n).bit_length() - 1
        n >>= v
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre_table(p: int) -> np.ndarray:
    """chi[x] = (x|p) for x in [0, p), p an odd prime."""
    chi = -np.ones(p, dtype=np.int64)
    chi[0] = 0
    squares = (np.arange(1, p, dtype=np.int64) ** 2) % p
    chi[squares] = 1
    return chi


def moebius(n: int) -> int:
    if n < 1:
        raise ValueError("moebius needs n >= 1")
    f = factorize(n) if n > 1 else {}
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    out = n
    for p in factorize(n) if n > 1 else ():
        out -= out // p
    return out


def lcm(a: int, b: int) -> int:
    return abs(a * b) // gcd(a, b) if a and b else 0


def is_squarefree(n: int) -> bool:
    """True iff no prime square divides |n|."""
    if n == 0:
        raise ValueError("is_squarefree is undefined at 0")
    n = abs(n)
    if n % 4 == 0:
        return False
    if n % 2 == 0:
        n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
        p += 2
    return True


@dataclass(frozen=True)
class CongruenceTarget:
    """The pair (r, h) defining Delta(r, h) = {squarefree n : n = r mod h}."""

    r: int
    h: int = 1
    canonical_r: int = field(init=False)
    gcd_rh_squarefree: bool = field(init=False)

    def __post_init__(self):
        if self.h < 1 or self.h % 2 == 0:
            raise ValueError(f"h must be a positive odd integer, got {self.h}")
        cr = self.r % self.h
        object.__setattr__(self, "canonical_r", cr)
        # gcd(0, h) = h
        object.__setattr__(self, "gcd_rh_squarefree", is_squarefree(gcd(cr, self.h)))

    def __str__(self):
        return f"(r={self.r}, h={self.h})"


def in_delta(n: int, target: CongruenceTarget) -> bool:
    """n is squarefree and n = r (mod h)."""
    if n % target.h != target.canonical_r:
        return False
    return is_squarefree(n)


def in_delta_array(values: np.ndarray, target: CongruenceTarget, sf: np.ndarray) -> np.ndarray:
    """Vectorized in_delta for nonzero integers with |n| inside the table ``sf``."""
    ok = sf[np.abs(values)]
    if target.h > 1:
        ok &= (values % target.h) == target.canonical_r
    return ok
