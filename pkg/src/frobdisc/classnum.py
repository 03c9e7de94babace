"""Class numbers of negative discriminants by counting reduced forms, and the
Kronecker (Hurwitz-type) class number H(D) = sum h(D/f^2)/w(D/f^2)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .modarith import _check_budget

ExactRational = Fraction


@dataclass(frozen=True)
class FormClassResult:
    D: int
    h: int
    w: int


def _check_discriminant(D):
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant (D < 0, D = 0,1 mod 4)")


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """All primitive reduced forms (a, b, c) of discriminant D."""
    _check_discriminant(D)
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def class_number(D: int) -> int:
    """h(D): number of primitive reduced binary quadratic forms of discriminant D."""
    return len(reduced_forms(D))


def unit_count(D: int) -> int:
    _check_discriminant(D)
    return {-3: 6, -4: 4}.get(D, 2)


def form_class(D: int) -> FormClassResult:
    return FormClassResult(D, class_number(D), unit_count(D))


@dataclass
class ClassTable:
    """h(-n) for 0 <= n <= limit, stored by absolute value; 0 marks invalid D."""

    limit: int
    h: np.ndarray
    visits: int = 0

    def __getitem__(self, D: int) -> int:
        n = -D
        if n < 3 or n > self.limit or n % 4 not in (0, 3):
            raise KeyError(D)
        return int(self.h[n])

    def __contains__(self, D):
        return 3 <= -D <= self.limit and (-D) % 4 in (0, 3)

    def as_dict(self) -> dict[int, int]:
        return {-int(n): int(self.h[n]) for n in np.flatnonzero(self.h)}


def batch_class_table(limit: int) -> ClassTable:
    """Class numbers of every discriminant in [-limit, -3] from one sweep over
    reduced forms, O(limit^{3/2}) form visits."""
    _check_budget(limit)
    counts = np.zeros(limit + 1, dtype=np.int64)
    visits = 0
    a = 1
    while 3 * a * a <= limit:
        cmax = (limit + a * a) // (4 * a)
        if cmax >= a:
            b = np.arange(-a, a + 1, dtype=np.int64)[:, None]
            c = np.arange(a, cmax + 1, dtype=np.int64)[None, :]
            visits += b.size * c.size
            n = 4 * a * c - b * b
            ok = n <= limit
            # ties |b| = a or a = c force b >= 0
            ok &= ~((b < 0) & ((b == -a) | (c == a)))
            g = np.gcd(b, a)
            ok &= np.gcd(g, c) == 1
            counts += np.bincount(n[ok], minlength=limit + 1)
        a += 1
    return ClassTable(limit, counts.astype(np.int32), visits)


def kronecker_H(D: int, table: ClassTable | None = None) -> Fraction:
    """Kronecker class number H(D) for D < 0.

    Sums h(D/f^2)/w(D/f^2) over f >= 1 with f^2 | D and D/f^2 = 0, 1 mod 4.
    Returns 0 when no f is admissible (D = 2, 3 mod 4 and no square helps)."""
    if D >= 0:
        raise ValueError("kronecker_H needs D < 0")
    total = Fraction(0)
    for f in range(1, isqrt(-D) + 1):
        if D % (f * f):
            continue
        d = D // (f * f)
        if d % 4 not in (0, 1):
            continue
        hd = table[d] if table is not None and d in table else class_number(d)
        total += Fraction(hd, unit_count(d))
    return total
