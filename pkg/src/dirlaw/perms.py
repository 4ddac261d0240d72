"""Cycle statistics of uniform random permutations: Stirling numbers,
the k-block ordered set-decomposition statistic, and its convergence to
the Dirichlet(1/k, ..., 1/k) law.

The mean rectangle statistic admits two independent routes: a closed
binomial-product sum over block sizes, and a brute force over cycle
types.  They agree as exact rationals, which the test suite pins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .dirichlet import cdf
from .errors import DomainError, IntegrityError, ResourceError
from .report import DeviationReport, rect_grid

_MAX_N = 5000
_MAX_K = 6
_TERM_GUARD = 10 ** 8
_BRUTE_MAX_N = 40
_EXACT_MAX_N = 300      # above this the binomial path runs in floats


@dataclass(frozen=True)
class CycleType:
    """Cycle lengths with multiplicities, ascending and distinct."""

    n: int
    partition: tuple[tuple[int, int], ...]

    def __post_init__(self):
        lens = [l for l, _ in self.partition]
        if lens != sorted(set(lens)):
            raise DomainError("cycle lengths must be distinct ascending")
        if any(l < 1 or c < 1 for l, c in self.partition):
            raise DomainError("lengths and multiplicities must be >= 1")
        if sum(l * c for l, c in self.partition) != self.n:
            raise DomainError("cycle lengths must sum to n")

    @property
    def cycle_count(self) -> int:
        return sum(c for _, c in self.partition)

    @property
    def class_size(self) -> int:
        """Permutations of S_n with this cycle type."""
        denom = 1
        for l, c in self.partition:
            denom *= l ** c * math.factorial(c)
        return math.factorial(self.n) // denom


def cycle_types(n: int) -> Iterator[CycleType]:
    """All cycle types of S_n (integer partitions of n)."""

    def parts(rest: int, biggest: int):
        if rest == 0:
            yield ()
            return
        for l in range(min(rest, biggest), 0, -1):
            for tail in parts(rest - l, l):
                yield (l,) + tail

    for p in parts(n, n):
        counts: dict[int, int] = {}
        for l in p:
            counts[l] = counts.get(l, 0) + 1
        yield CycleType(n, tuple(sorted(counts.items())))


@dataclass(frozen=True)
class StirlingTable:
    """rows[n][j] = number of permutations of n elements with j cycles."""

    max_n: int
    rows: tuple[tuple[int, ...], ...]


def build_stirling(max_n: int) -> StirlingTable:
    if max_n < 0:
        raise DomainError("max_n must be nonnegative")
    rows = [(1,)]
    for n in range(1, max_n + 1):
        prev = rows[-1]
        row = [0] * (n + 1)
        for j in range(1, n + 1):
            # [n, j] = (n-1)[n-1, j] + [n-1, j-1]
            row[j] = (n - 1) * (prev[j] if j <= n - 1 else 0) + prev[j - 1]
        rows.append(tuple(row))
    return StirlingTable(max_n, tuple(rows))


def stirling_first(n: int, j: int, table: StirlingTable) -> int:
    if not 0 <= j <= n <= table.max_n:
        raise DomainError("need 0 <= j <= n <= table.max_n")
    return table.rows[n][j]


def mean_tau_alpha(n: int, alpha, table: StirlingTable) -> Fraction:
    """Mean of alpha^(cycle count) over S_n, two ways.

    The rising-binomial value prod_{j<=n} (alpha+j-1)/j must equal the
    Stirling sum (1/n!) sum_j [n, j] alpha^j; a mismatch means a broken
    table and raises IntegrityError.  n = 0 gives 1.
    """
    a = Fraction(alpha)
    if a <= 0:
        raise DomainError("alpha must be positive")
    if n < 0 or n > table.max_n:
        raise DomainError("n out of table range")
    binom = _rising_binom(a, n)
    stirl = sum(table.rows[n][j] * a ** j
                for j in range(n + 1)) / Fraction(math.factorial(n))
    if binom != stirl:
        raise IntegrityError("Stirling identity failed; table corrupt")
    return binom


def _rising_binom(a: Fraction, m: int) -> Fraction:
    out = Fraction(1)
    for j in range(1, m + 1):
        out *= (a + j - 1) / Fraction(j)
    return out


# ------------------------------------------------------- mean statistic

def _block_caps(n: int, k: int, rect) -> list[int]:
    u = rect.u if hasattr(rect, "u") else rect
    fr = [Fraction(c) for c in u]
    if len(fr) != k - 1:
        raise DomainError("rectangle dimension must be k - 1")
    if any(c < 0 or c > 1 for c in fr):
        raise DomainError("rectangle coordinates must lie in [0, 1]")
    return [(n * c.numerator) // c.denominator for c in fr]


def lhs_perm_exact(n: int, k: int, rect):
    """Mean over S_n of the fraction of ordered k-block invariant
    decompositions with |A_i| <= floor(n*u_i) for i < k.

    Evaluated by the closed sum over block sizes m_1, ..., m_(k-1):
    products of binomials C(m + 1/k - 1, m).  Exact Fraction for
    n <= 300, double precision beyond (relative error well under 1e-9).
    """
    if n < 0 or n > _MAX_N:
        raise DomainError(f"n must lie in [0, {_MAX_N}]")
    if not 2 <= k <= _MAX_K:
        raise DomainError(f"k must lie in [2, {_MAX_K}]")
    caps = _block_caps(n, k, rect)
    if n == 0:
        return Fraction(1)
    cost = 1
    for c in caps:
        cost *= c + 1
    if cost > _TERM_GUARD:
        raise ResourceError("block-size sum exceeds the term guard")
    if n <= _EXACT_MAX_N:
        binom = _binom_table_exact(n, k)

        def rec(i: int, remaining: int, weight: Fraction) -> Fraction:
            if i == k - 1:
                return weight * binom[remaining]
            total = Fraction(0)
            for m in range(0, min(caps[i], remaining) + 1):
                total += rec(i + 1, remaining - m, weight * binom[m])
            return total

        return rec(0, n, Fraction(1))

    binf = _binom_table_float(n, k)

    def recf(i: int, remaining: int, weight: float) -> float:
        if i == k - 2:
            hi = min(caps[i], remaining)
            rev = binf[remaining - hi: remaining + 1][::-1]
            return weight * float(np.dot(binf[: hi + 1], rev))
        total = 0.0
        for m in range(0, min(caps[i], remaining) + 1):
            total += recf(i + 1, remaining - m, weight * binf[m])
        return total

    return recf(0, n, 1.0)


@lru_cache(maxsize=64)
def _binom_table_exact(n: int, k: int) -> tuple[Fraction, ...]:
    """C(m + 1/k - 1, m) for m = 0..n, exact."""
    a = Fraction(1, k)
    out = [Fraction(1)]
    for m in range(1, n + 1):
        out.append(out[-1] * (a + m - 1) / Fraction(m))
    return tuple(out)


@lru_cache(maxsize=64)
def _binom_table_float(n: int, k: int) -> np.ndarray:
    a = 1.0 / k
    out = np.empty(n + 1)
    out[0] = 1.0
    for m in range(1, n + 1):
        out[m] = out[m - 1] * (a + m - 1) / m
    return out


def lhs_perm_brute(n: int, k: int, rect) -> Fraction:
    """Same statistic by enumeration of cycle types.

    Counts, per type, the assignments of (labeled) cycles to k ordered
    blocks whose first k-1 block sizes respect the caps, via dynamic
    programming over partial size vectors; exact rationals throughout.
    """
    if n < 0 or n > _BRUTE_MAX_N:
        raise DomainError(f"brute force needs n <= {_BRUTE_MAX_N}")
    if not 2 <= k <= _MAX_K:
        raise DomainError(f"k must lie in [2, {_MAX_K}]")
    caps = _block_caps(n, k, rect)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for ct in cycle_types(n):
        states: dict[tuple[int, ...], int] = {(0,) * (k - 1): 1}
        for length, mult in ct.partition:
            for _ in range(mult):
                nxt: dict[tuple[int, ...], int] = {}
                for sizes, cnt in states.items():
                    nxt[sizes] = nxt.get(sizes, 0) + cnt    # k-th block
                    for i in range(k - 1):
                        if sizes[i] + length <= caps[i]:
                            grown = sizes[:i] + (sizes[i] + length,) \
                                + sizes[i + 1:]
                            nxt[grown] = nxt.get(grown, 0) + cnt
                states = nxt
        good = sum(states.values())
        denom = k ** ct.cycle_count
        for length, mult in ct.partition:
            denom *= length ** mult * math.factorial(mult)
        total += Fraction(good, denom)
    return total


def deviation_perm(n: int, k: int, grid_step) -> DeviationReport:
    """Grid sup of |mean statistic - Dir(1/k, ..., 1/k) CDF|.

    The rate normalization is n^(1/k), the expected deviation decay.
    """
    step = Fraction(grid_step)
    points = rect_grid(k, step)
    alpha = tuple(1.0 / k for _ in range(k))
    emp, lim, dev = [], [], []
    for u in points:
        e = float(lhs_perm_exact(n, k, u))
        f = cdf(alpha, tuple(float(c) for c in u), 1e-9)
        emp.append(e)
        lim.append(f)
        dev.append(abs(e - f))
    sup = max(dev)
    return DeviationReport(
        kind="perms", scale=n, k=k, model_id="uniform",
        grid_step=step, points=points, empirical=tuple(emp),
        limit=tuple(lim), deviation=tuple(dev), sup_dev=sup,
        scaled_sup_dev=sup * n ** (1.0 / k))
