"""Property suites behind ``frobdisc verify``. Each suite returns None on success
or a string describing the first counterexample."""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .census import check_deuring, deuring_census, direct_census
from .classnum import batch_class_table
from .constants import (
    DEFAULT_PRIME_CUT,
    G_factor,
    P_factor,
    c_t_bruteforce,
    c_t_closed,
    frak_C,
    frak_C_alt,
    local_factor,
)
from .gl2 import count_order_squarefree_factor, count_p1, count_p2, group_order, group_order_formula
from .modarith import CongruenceTarget, sieve_primes, squarefree_table
from .sums import STConfig, s_of_T, s_of_T_convergence, s_of_T_literal

TARGETS = [(0, 1), (1, 3), (2, 3), (0, 3), (2, 5), (1, 15), (4, 15)]


def _targets(pairs):
    return [CongruenceTarget(r, h) for r, h in pairs]


def odd_prime_powers(limit):
    out = []
    for p in sieve_primes(limit):
        if p == 2:
            continue
        j, q = 1, p
        while q <= limit:
            out.append((p, j))
            j, q = j + 1, q * p
    return sorted(out, key=lambda pj: pj[0] ** pj[1])


def suite_deuring(pmax=499, odd_only=True):
    table = batch_class_table(4 * pmax)
    for p in sieve_primes(pmax):
        if p < 5:
            continue
        bad = check_deuring(p, table, odd_only=odd_only)
        if bad:
            t, got, want = bad[0]
            return f"p={p}, t={t}: direct count {got} != (p-1)H = {want}"
    return None


def suite_census(pmax=499, targets=TARGETS):
    table = batch_class_table(4 * pmax)
    sf = squarefree_table(4 * pmax)
    for target in _targets(targets):
        for p in sieve_primes(pmax):
            if p < 5:
                continue
            a = direct_census(p, target).pib
            b = deuring_census(p, target, table, sf).pib
            if a != b:
                return f"p={p}, {target}: direct {a} != deuring {b}"
    return None


def suite_ct(nmax=2000, tmax=50, pair_max=200, pair_ts=(1, 15), targets=TARGETS):
    tgs = _targets(targets)
    for target in tgs:
        for t in range(1, tmax + 1):
            if gcd(t * t - target.r, target.h) != 1:
                continue
            for p, j in odd_prime_powers(nmax):
                a = c_t_closed(t, p, j, target)
                b = c_t_bruteforce(t, p**j, target)
                if a != b:
                    return f"t={t}, n={p}^{j}, {target}: closed {a} != brute force {b}"
    odd = range(1, pair_max + 1, 2)
    for target in tgs:
        for t in pair_ts:
            if gcd(t * t - target.r, target.h) != 1:
                continue
            single = {n: c_t_bruteforce(t, n, target) for n in odd}
            for m in odd:
                for n in odd:
                    if n <= m or gcd(m, n) != 1 or m == 1:
                        continue
                    mn = c_t_bruteforce(t, m * n, target)
                    if mn != single[m] * single[n]:
                        return f"t={t}, {target}: c({m}*{n}) = {mn} != {single[m]}*{single[n]}"
    return None


def suite_constant_identity(prime_cut=10**4, targets=TARGETS):
    for p in sieve_primes(prime_cut):
        if p == 2:
            continue
        if P_factor(p) * (1 + G_factor(p) / p) != local_factor(p):
            return f"factorwise identity fails at p={p}"
        if (p - 1) * (p**4 - 2 * p**2 - p + 1) != p**5 - p**4 - 2 * p**3 + p**2 + 2 * p - 1:
            return f"polynomial identity fails at p={p}"
    for target in _targets(targets):
        a = frak_C(target, prime_cut)
        b = frak_C_alt(target, prime_cut)
        if a.prefactor != b.prefactor:
            return f"{target}: prefactors {a.prefactor} != {b.prefactor}"
        if a.factors != b.factors:
            bad = next(ell for ell in a.factors if a.factors[ell] != b.factors.get(ell))
            return f"{target}: factors differ at ell={bad}"
    return None


def suite_gl2(ells=(3, 5, 7)):
    for ell in ells:
        c = count_p1(ell)
        if not c.agrees:
            return f"P1({ell}): enumeration {c.density} != closed form {c.closed_form}"
        if c.group_order != group_order_formula(ell, 2):
            return f"|GL2(Z/{ell}^2)|: {c.group_order} != formula"
        o = count_order_squarefree_factor(ell)
        if not o.agrees:
            return f"order factor at {ell}: enumeration {o.density} != closed form {o.closed_form}"
    for alpha in (1, 2):
        total = Fraction(0)
        for r in range(3**alpha):
            c = count_p2(3, alpha, r)
            if not c.agrees:
                return f"P2(3, {alpha}, {r}): enumeration {c.density} != closed form {c.closed_form}"
            total += c.density
        if total != count_p1(3).density:
            return f"sum_r P2(3, {alpha}, r) = {total} != P1(3)"
    for n, ell, beta in ((3, 3, 1), (9, 3, 2), (27, 3, 3), (25, 5, 2)):
        if group_order(n) != group_order_formula(ell, beta):
            return f"group order mismatch mod {n}"
    return None


def suite_st(T=2000, R_list=(10, 30, 100), small_targets=((0, 1), (2, 3), (1, 3)), prime_cut=DEFAULT_PRIME_CUT):
    for target in _targets(small_targets):
        for cfg in (STConfig(9, 15, 3, target), STConfig(15, 45, 5, target)):
            if s_of_T(cfg, exact=True) != s_of_T_literal(cfg):
                return f"S(T) closed form != literal sum for {cfg}"
    rows = s_of_T_convergence(T, CongruenceTarget(0, 1), R_list, prime_cut)
    devs = [row.deviation for row in rows]
    for (r1, d1), (r2, d2) in zip(zip(R_list, devs), zip(R_list[1:], devs[1:])):
        if not d2 < d1:
            return f"|S(T)/T - 3C/2| not decreasing: R={r1}: {d1:.3e}, R={r2}: {d2:.3e}"
    return None


SUITES = {
    "deuring": suite_deuring,
    "census": suite_census,
    "ct": suite_ct,
    "constant-identity": suite_constant_identity,
    "gl2": suite_gl2,
    "st": suite_st,
}
