"""Per-prime census of short Weierstrass curves y^2 = x^3 + ax + b over F_p whose
Frobenius discriminant t^2 - 4p lies in Delta(r, h).

Two independent routes are provided: direct point counting over all (a, b), and
Deuring's count (p - 1) H(t^2 - 4p) read off a class-number table.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import Iterator

import numpy as np

from .classnum import ClassTable, batch_class_table, kronecker_H
from .modarith import (
    CongruenceTarget,
    ResourceError,
    in_delta,
    in_delta_array,
    legendre_table,
    sieve_primes,
    squarefree_table,
)

log = logging.getLogger(__name__)

CACHE_FORMAT = "frobdisc-census"
CACHE_VERSION = 1
DIRECT_BUDGET = 5000  # largest p accepted by direct enumeration
BOX_BUDGET = 10**8


class InvariantError(AssertionError):
    """Two routes that must agree exactly did not."""


class CacheError(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceRecord:
    p: int
    t: int
    D: int
    in_delta: bool
    H: Fraction | None = None

    @classmethod
    def make(cls, p, t, target, with_H=False):
        if t * t > 4 * p:
            raise ValueError(f"trace {t} violates the Hasse bound at p={p}")
        D = t * t - 4 * p
        return cls(p, t, D, in_delta(D, target), kronecker_H(D) if with_H else None)


@dataclass
class PrimeCensus:
    p: int
    pib: int
    method: str
    trace_histogram: dict[int, int] | None = None

    def to_json(self) -> dict:
        return {"p": self.p, "pib": self.pib, "method": self.method}


def _check_prime(p, budget=None):
    if p < 5 or p % 2 == 0 or any(p % q == 0 for q in range(3, isqrt(p) + 1, 2)):
        raise ValueError(f"p must be a prime >= 5, got {p}")
    if budget is not None and p > budget:
        raise ResourceError(f"p={p} exceeds the direct-enumeration budget {budget}")


def trace_of_curve(p: int, a: int, b: int) -> int:
    """a_p of y^2 = x^3 + ax + b over F_p, as -sum_x (x^3+ax+b | p)."""
    _check_prime(p)
    a %= p
    b %= p
    if (4 * a**3 + 27 * b * b) % p == 0:
        raise ValueError(f"singular curve (a, b) = ({a}, {b}) mod {p}")
    chi = legendre_table(p)
    x = np.arange(p, dtype=np.int64)
    return int(-chi[(x * x % p * x + a * x + b) % p].sum())


def trace_table(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Traces of every (a, b) in F_p^2 and the mask of nonsingular pairs.

    With m[a, y] = #{x : x^3 + ax = y}, the character sum over x becomes the
    correlation sum_y m[a, y] chi(y + b), i.e. one p x p matrix product.
    """
    _check_prime(p, DIRECT_BUDGET)
    x = np.arange(p, dtype=np.int64)
    a = x[:, None]
    vals = (x * x % p * x + a * x) % p
    m = np.bincount((vals + a * p).ravel(), minlength=p * p).reshape(p, p)
    chi = legendre_table(p)
    circ = chi[(x[:, None] + x[None, :]) % p]
    s = m.astype(np.float64) @ circ.astype(np.float64)
    traces = -np.rint(s).astype(np.int64)
    nonsing = (4 * a**3 + 27 * x[None, :] ** 2) % p != 0
    return traces, nonsing


def direct_trace_histogram(p: int) -> dict[int, int]:
    """Number of nonsingular (a, b) in F_p^2 with each trace t."""
    traces, nonsing = trace_table(p)
    bound = isqrt(4 * p)
    counts = np.bincount(traces[nonsing] + bound, minlength=2 * bound + 1)
    return {t - bound: int(c) for t, c in enumerate(counts) if c}


def _pib_from_histogram(p, hist, target):
    if not target.gcd_rh_squarefree:
        return 0
    return sum(c for t, c in hist.items() if in_delta(t * t - 4 * p, target))


def direct_census(p: int, target: CongruenceTarget, with_histogram: bool = False) -> PrimeCensus:
    hist = direct_trace_histogram(p)
    pc = PrimeCensus(p, _pib_from_histogram(p, hist, target), "direct")
    if with_histogram:
        pc.trace_histogram = hist
    return pc


def _odd_traces(p):
    return np.arange(1, isqrt(4 * p) + 1, 2, dtype=np.int64)


def _deuring_pib(p, target, class_table, sf):
    if not target.gcd_rh_squarefree:
        return 0
    t = _odd_traces(p)
    D = t * t - 4 * p
    ok = in_delta_array(D, target, sf)
    if not ok.any():
        return 0
    hs = class_table.h[-D[ok]].astype(np.int64)
    w = np.where(D[ok] == -3, 6, np.where(D[ok] == -4, 4, 2))
    # 2 (p-1) h / w summed over +-t, kept over the common denominator 6
    total6 = int((2 * (p - 1) * hs * (6 // w)).sum())
    if total6 % 6:
        raise InvariantError(f"non-integral Deuring count {total6}/6 at p={p} for {target}")
    return total6 // 6


def deuring_census(
    p: int,
    target: CongruenceTarget,
    class_table: ClassTable,
    sf: np.ndarray | None = None,
    with_histogram: bool = False,
) -> PrimeCensus:
    """Pi^b(p) from class numbers: only odd traces can give squarefree t^2 - 4p,
    and for squarefree D the Kronecker class number is h(D)/w(D)."""
    _check_prime(p)
    if class_table.limit < 4 * p:
        raise ValueError(f"class table covers |D| <= {class_table.limit}, need {4 * p}")
    if sf is None:
        sf = squarefree_table(4 * p)
    pc = PrimeCensus(p, _deuring_pib(p, target, class_table, sf), "deuring")
    if with_histogram:
        pc.trace_histogram = deuring_histogram(p, class_table)
    return pc


def deuring_histogram(p: int, class_table: ClassTable | None = None) -> dict[int, int]:
    """(p - 1) H(t^2 - 4p) for every |t| <= 2 sqrt(p)."""
    out = {}
    for t in range(-isqrt(4 * p), isqrt(4 * p) + 1):
        n = (p - 1) * kronecker_H(t * t - 4 * p, class_table)
        if n.denominator != 1:
            raise InvariantError(f"(p-1)H({t * t - 4 * p}) = {n} is not an integer")
        out[t] = int(n)
    return out


@dataclass
class CensusConfig:
    direct_max: int = 499
    workers: int = 1
    cache_path: str | os.PathLike | None = None
    chunk_size: int = 256


@dataclass
class Aggregates:
    x: int
    A1: float
    A2: int
    constant: float
    n_primes: int

    @property
    def predicted_A1(self):
        return self.constant * self.x / math.log(self.x)

    @property
    def predicted_A2(self):
        return self.constant / 3 * self.x**3 / math.log(self.x)

    @property
    def ratio_A1(self):
        return self.A1 / self.predicted_A1 if self.predicted_A1 else math.nan

    @property
    def ratio_A2(self):
        return self.A2 / self.predicted_A2 if self.predicted_A2 else math.nan


@dataclass
class CensusRun:
    target: CongruenceTarget
    records: list[PrimeCensus]
    aggregates: Aggregates
    notes: list[str] = field(default_factory=list)


class _Neumaier:
    """Compensated running sum; fixed input order gives reproducible results."""

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, v):
        t = self.s + v
        if abs(self.s) >= abs(v):
            self.c += (self.s - t) + v
        else:
            self.c += (v - t) + self.s
        self.s = t

    @property
    def value(self):
        return self.s + self.c


# read-only state shared with forked workers
_SHARED: dict = {}


def _census_chunk(primes):
    target = _SHARED["target"]
    table = _SHARED["table"]
    sf = _SHARED["sf"]
    direct_max = _SHARED["direct_max"]
    out = []
    for p in primes:
        pib = _deuring_pib(p, target, table, sf)
        method = "deuring"
        if p <= direct_max:
            d = direct_census(p, target).pib
            if d != pib:
                raise InvariantError(f"direct {d} != deuring {pib} at p={p} for {target}")
            method = "direct"
        out.append((p, pib, method))
    return out


def _read_cache(path, target):
    done = {}
    path = Path(path)
    if not path.exists() or path.stat().st_size == 0:
        return done
    with path.open() as fh:
        lines = fh.read().split("\n")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CacheError(f"{path}: unreadable header") from exc
    if header.get("format") != CACHE_FORMAT or header.get("version") != CACHE_VERSION:
        raise CacheError(f"{path}: not a {CACHE_FORMAT} v{CACHE_VERSION} cache")
    if header.get("r") != target.r or header.get("h") != target.h:
        raise CacheError(f"{path}: cache is for r={header.get('r')}, h={header.get('h')}")
    body = lines[1:]
    for i, line in enumerate(body):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            p, pib, method = int(rec["p"]), int(rec["pib"]), rec["method"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            if i == len(body) - 1:
                # torn final write: drop it, the prime is recomputed
                log.warning("dropping incomplete last cache line in %s", path)
                break
            raise CacheError(f"{path}: corrupt record on line {i + 2}") from exc
        if method not in ("direct", "deuring"):
            raise CacheError(f"{path}: unknown method {method!r} on line {i + 2}")
        if p in done and done[p][0] != pib:
            raise CacheError(f"{path}: conflicting records for p={p}")
        done[p] = (pib, method)
    return done


def _open_cache(path, x, target, fresh):
    path = Path(path)
    if fresh:
        fh = path.open("w")
        header = {"format": CACHE_FORMAT, "version": CACHE_VERSION, "x": x, "r": target.r, "h": target.h}
        fh.write(json.dumps(header) + "\n")
    else:
        # rewrite without a possibly torn tail, then append
        text = path.read_text()
        if not text.endswith("\n"):
            text = text[: text.rfind("\n") + 1]
            path.write_text(text)
        fh = path.open("a")
    return fh


def iter_census(x: int, target: CongruenceTarget, config: CensusConfig | None = None) -> Iterator[PrimeCensus]:
    """Yield PrimeCensus records for 5 <= p <= x in ascending order."""
    config = config or CensusConfig()
    if x < 5:
        return
    primes = [p for p in sieve_primes(x) if p >= 5]
    done = _read_cache(config.cache_path, target) if config.cache_path else {}
    todo = [p for p in primes if p not in done]

    fh = None
    if config.cache_path:
        fh = _open_cache(config.cache_path, x, target, fresh=not done and not _has_header(config.cache_path))
    try:
        fresh = {}
        if todo:
            _SHARED.update(
                target=target,
                table=batch_class_table(4 * x),
                sf=squarefree_table(4 * x),
                direct_max=config.direct_max,
            )
            chunks = [todo[i : i + config.chunk_size] for i in range(0, len(todo), config.chunk_size)]
            if config.workers > 1 and len(chunks) > 1:
                import multiprocessing as mp

                with ProcessPoolExecutor(config.workers, mp_context=mp.get_context("fork")) as ex:
                    results = ex.map(_census_chunk, chunks)
                    for chunk in results:
                        for p, pib, method in chunk:
                            fresh[p] = (pib, method)
                            if fh:
                                fh.write(json.dumps({"p": p, "pib": pib, "method": method}) + "\n")
            else:
                for chunk in chunks:
                    for p, pib, method in _census_chunk(chunk):
                        fresh[p] = (pib, method)
                        if fh:
                            fh.write(json.dumps({"p": p, "pib": pib, "method": method}) + "\n")
            _SHARED.clear()
    finally:
        if fh:
            fh.close()
    for p in primes:
        pib, method = done[p] if p in done else fresh[p]
        yield PrimeCensus(p, pib, method)


def _has_header(path):
    path = Path(path)
    return path.exists() and path.stat().st_size > 0


def census_range(x: int, target: CongruenceTarget, config: CensusConfig | None = None, constant: float | None = None) -> CensusRun:
    """Run the census over 5 <= p <= x and aggregate

    A1 = sum Pi^b(p) / (p (p - 1)),   A2 = sum Pi^b(p).
    """
    if x < 5:
        raise ValueError("census needs x >= 5")
    if constant is None:
        from .constants import frak_C

        constant = frak_C(target).value
    records = list(iter_census(x, target, config))
    a1 = _Neumaier()
    for rec in records:
        a1.add(rec.pib / (rec.p * (rec.p - 1)))
    agg = Aggregates(x, a1.value, sum(r.pib for r in records), float(constant), len(records))
    notes = ["census starts at p = 5; p = 3 is excluded"]
    if not target.gcd_rh_squarefree:
        notes.append(f"(r,h) not square-free: gcd({target.canonical_r}, {target.h}) has a square factor")
    return CensusRun(target, records, agg, notes)


def report_rows(run: CensusRun):
    """Rows p, pib, cumulative_A1, cumulative_A2, predicted_A1, ratio."""
    a1 = _Neumaier()
    a2 = 0
    c = run.aggregates.constant
    for rec in run.records:
        a1.add(rec.pib / (rec.p * (rec.p - 1)))
        a2 += rec.pib
        pred = c * rec.p / math.log(rec.p)
        ratio = a1.value / pred if pred else math.nan
        yield rec.p, rec.pib, a1.value, a2, pred, ratio


def box_average_demo(A: int, B: int, x: int, target: CongruenceTarget) -> Fraction:
    """Average over curves E(a, b), |a| <= A, |b| <= B, 4a^3 + 27b^2 != 0, of the
    number of primes 5 <= p <= x of good reduction with a_p^2 - 4p in Delta(r, h)."""
    primes = [p for p in sieve_primes(x) if p >= 5] if x >= 5 else []
    if (2 * A + 1) * (2 * B + 1) * max(len(primes), 1) > BOX_BUDGET:
        raise ResourceError("box average exceeds budget")
    a = np.arange(-A, A + 1, dtype=np.int64)[:, None]
    b = np.arange(-B, B + 1, dtype=np.int64)[None, :]
    disc = 4 * a**3 + 27 * b**2
    curves = disc != 0
    n_curves = int(curves.sum())
    if n_curves == 0:
        raise ValueError("no nonsingular curves in the box")
    if not target.gcd_rh_squarefree or not primes:
        return Fraction(0)
    total = 0
    for p in primes:
        traces, _ = trace_table(p)
        ok_t = np.array([in_delta(t * t - 4 * p, target) for t in range(-isqrt(4 * p), isqrt(4 * p) + 1)])
        tp = traces[a % p, b % p]
        good = curves & (disc % p != 0)
        hit = ok_t[np.clip(tp + isqrt(4 * p), 0, 2 * isqrt(4 * p))]
        total += int((good & hit).sum())
    return Fraction(total, n_curves)


def check_deuring(p: int, class_table: ClassTable | None = None, odd_only: bool = True) -> list[tuple[int, int, Fraction]]:
    """Traces where the direct count differs from (p - 1) H(t^2 - 4p)."""
    hist = direct_trace_histogram(p)
    bad = []
    for t in range(-isqrt(4 * p), isqrt(4 * p) + 1):
        if odd_only and t % 2 == 0:
            continue
        want = (p - 1) * kronecker_H(t * t - 4 * p, class_table)
        if hist.get(t, 0) != want:
            bad.append((t, hist.get(t, 0), want))
    return bad

