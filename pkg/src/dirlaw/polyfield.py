"""Monic polynomials over prime fields F_q: arithmetic, an irreducible
sieve, factorization, k-part divisor counts, and exact evaluation of the
mean rectangle statistic over all monic polynomials of a given degree.

Polynomials are carried two ways: a PolyQ coefficient tuple for the
public arithmetic ops, and a base-q integer code (coefficient i at digit
q^i) for bulk enumeration.  A monic polynomial of degree d has code in
[q^d, 2*q^d).  Code order within a degree is the lexicographic order of
the coefficient vector read from the top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import compositions
from .dirichlet import cdf
from .errors import DomainError, IntegrityError, ResourceError
from .report import DeviationReport, rect_grid

_MAX_Q = 13
_TABLE_GUARD = 10 ** 8
_ENUM_GUARD = 10 ** 7


@dataclass(frozen=True)
class PolyQ:
    """Coefficients lowest-degree first; () is the zero polynomial."""

    q: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.q < 2 or not _is_prime(self.q):
            raise DomainError("q must be a prime")
        if any(c < 0 or c >= self.q for c in self.coeffs):
            raise DomainError("coefficients must lie in [0, q)")
        if self.coeffs and self.coeffs[-1] == 0:
            raise DomainError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def code(self) -> int:
        c = 0
        for a in reversed(self.coeffs):
            c = c * self.q + a
        return c


def poly_from_code(q: int, code: int) -> PolyQ:
    if code < 0:
        raise DomainError("polynomial code must be nonnegative")
    coeffs = []
    while code:
        coeffs.append(code % q)
        code //= q
    return PolyQ(q, tuple(coeffs))


@dataclass(frozen=True)
class FactoredPoly:
    """factors are (irreducible, exponent), ordered by (degree, code)."""

    poly: PolyQ
    factors: tuple[tuple[PolyQ, int], ...]


@dataclass(frozen=True)
class IrreducibleTable:
    """Irreducible monic codes per degree 1..max_deg.

    Counts are validated against the necklace formula at build time, so
    a table loaded from elsewhere can be revalidated with ``validate``.
    """

    q: int
    max_deg: int
    by_degree: tuple[tuple[int, ...], ...]

    def validate(self):
        if len(self.by_degree) != self.max_deg:
            raise IntegrityError("table must hold degrees 1..max_deg")
        for d, codes in enumerate(self.by_degree, start=1):
            want = irreducible_count(self.q, d)
            if len(codes) != want:
                raise IntegrityError(
                    f"degree {d} irreducible count {len(codes)} != {want}")
            if list(codes) != sorted(codes):
                raise IntegrityError("codes must be sorted within degree")
            lo = self.q ** d
            if codes and (codes[0] < lo or codes[-1] >= 2 * lo):
                raise IntegrityError(
                    f"degree {d} holds a code outside the monic range")
        return self


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return False
    return True


def _mobius(n: int) -> int:
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    if n > 1:
        out = -out
    return out


def irreducible_count(q: int, d: int) -> int:
    """Monic irreducibles of degree d: (1/d) sum_{e|d} mu(e) q^(d/e)."""
    total = sum(_mobius(e) * q ** (d // e)
                for e in range(1, d + 1) if d % e == 0)
    if total % d:
        raise IntegrityError("necklace count is not an integer")
    return total // d


# ---------------------------------------------------------- arithmetic

def poly_mul(a: PolyQ, b: PolyQ) -> PolyQ:
    if a.q != b.q:
        raise DomainError("operands must share the field")
    if not a.coeffs or not b.coeffs:
        return PolyQ(a.q, ())
    q = a.q
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, ca in enumerate(a.coeffs):
        if ca:
            for j, cb in enumerate(b.coeffs):
                out[i + j] = (out[i + j] + ca * cb) % q
    return PolyQ(q, tuple(out))


def poly_divrem(a: PolyQ, b: PolyQ) -> tuple[PolyQ, PolyQ]:
    if a.q != b.q:
        raise DomainError("operands must share the field")
    if not b.coeffs:
        raise DomainError("division by the zero polynomial")
    q = a.q
    rem = list(a.coeffs)
    db = b.degree
    inv_lead = pow(b.coeffs[-1], q - 2, q)
    quot = [0] * max(len(rem) - db, 0)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        factor = (c * inv_lead) % q
        quot[i - db] = factor
        for j, cb in enumerate(b.coeffs):
            rem[i - db + j] = (rem[i - db + j] - factor * cb) % q
    while rem and rem[-1] == 0:
        rem.pop()
    while quot and quot[-1] == 0:
        quot.pop()
    return PolyQ(q, tuple(quot)), PolyQ(q, tuple(rem))


def _code_mul(q: int, a: int, b: int) -> int:
    """Product of two codes; carry-free convolution on base-q digits."""
    da = []
    while a:
        da.append(a % q)
        a //= q
    db = []
    while b:
        db.append(b % q)
        b //= q
    if not da or not db:
        return 0
    out = [0] * (len(da) + len(db) - 1)
    for i, ca in enumerate(da):
        if ca:
            for j, cb in enumerate(db):
                out[i + j] += ca * cb
    c = 0
    for d in reversed(out):
        c = c * q + d % q
    return c


# ------------------------------------------------------ irreducible sieve

def build_irreducibles(q: int, max_deg: int) -> IrreducibleTable:
    """Irreducibles of degree <= max_deg by an Eratosthenes-style sieve.

    Composite monic codes are exactly the products P*G with P irreducible
    of degree <= deg/2; the sieve marks those ascending by P.
    """
    if not _is_prime(q) or q > _MAX_Q:
        raise ResourceError(f"q must be a prime <= {_MAX_Q}")
    if max_deg < 1 or q ** max_deg > _TABLE_GUARD:
        raise ResourceError("q^max_deg exceeds the table guard")
    sif, _ = _factor_sieve(q, max_deg)
    by_degree = []
    for d in range(1, max_deg + 1):
        lo, hi = q ** d, 2 * q ** d
        codes = [c for c in range(lo, hi) if sif[c] == 0]
        by_degree.append(tuple(codes))
    return IrreducibleTable(q, max_deg, tuple(by_degree)).validate()


@lru_cache(maxsize=8)
def _factor_sieve(q: int, max_deg: int):
    """(sif, quot) over all monic codes of degree <= max_deg.

    sif[c] is the code of the smallest irreducible factor of c in
    (degree, code) order, 0 if c is irreducible or trivial; quot[c] the
    code of c / sif[c].  Factorization is then a pointer chase.
    """
    size = 2 * q ** max_deg
    sif = np.zeros(size, dtype=np.int64)
    quot = np.zeros(size, dtype=np.int64)
    for dp in range(1, max_deg // 2 + 1):
        prim = [c for c in range(q ** dp, 2 * q ** dp) if sif[c] == 0]
        for pc in prim:
            for dg in range(dp, max_deg - dp + 1):
                if q == 2:
                    g = np.arange(1 << dg, 1 << (dg + 1), dtype=np.int64)
                    prod = np.zeros_like(g)
                    bits = pc
                    shift = 0
                    while bits:
                        if bits & 1:
                            prod ^= g << shift
                        bits >>= 1
                        shift += 1
                else:
                    prod = np.fromiter(
                        (_code_mul(q, pc, int(gc))
                         for gc in range(q ** dg, 2 * q ** dg)),
                        dtype=np.int64)
                    g = np.arange(q ** dg, 2 * q ** dg, dtype=np.int64)
                fresh = sif[prod] == 0
                sif[prod[fresh]] = pc
                quot[prod[fresh]] = g[fresh]
    return sif, quot


def factor_poly(f: PolyQ, table: IrreducibleTable) -> FactoredPoly:
    """Factor a monic polynomial by trial division in (degree, code)
    order; the table need only cover degree <= deg(f)/2 since the last
    cofactor is then irreducible."""
    if not f.is_monic:
        raise DomainError("only monic polynomials are factored")
    if f.q != table.q:
        raise DomainError("table field does not match the polynomial")
    if table.max_deg < f.degree // 2:
        raise DomainError("table must cover degree deg(f)/2")
    facs: list[tuple[PolyQ, int]] = []
    rest = f
    for d in range(1, f.degree // 2 + 1):
        if d > table.max_deg or rest.degree < 2 * d:
            break
        for code in table.by_degree[d - 1]:
            if rest.degree < 2 * d:
                break
            p = poly_from_code(table.q, code)
            e = 0
            while True:
                quot, rem = poly_divrem(rest, p)
                if rem.coeffs:
                    break
                rest = quot
                e += 1
            if e:
                facs.append((p, e))
    if rest.degree >= 1:
        facs.append((rest, 1))   # irreducible by the half-degree rule
    facs.sort(key=lambda pe: (pe[0].degree, pe[0].code))
    return FactoredPoly(f, tuple(facs))


def tau_k_poly(fp: FactoredPoly, k: int) -> int:
    """Ordered k-tuples of monic polynomials with the given product."""
    if k < 1:
        raise DomainError("k must be positive")
    out = 1
    for _, e in fp.factors:
        out *= math.comb(e + k - 1, k - 1)
    return out


# ------------------------------------------------------ mean statistics

def _degree_profiles(q: int, n: int, table: IrreducibleTable):
    """Factor every monic code of degree n into a degree profile.

    Returns a dict mapping sorted tuples ((deg, exp), ...) to the number
    of monic polynomials of degree n with that multiset of irreducible
    factor degrees; only degrees matter for divisor-degree statistics.
    """
    sif, quot = _factor_sieve(q, max(n, 1))
    profiles: dict[tuple[tuple[int, int], ...], int] = {}
    for c in range(q ** n, 2 * q ** n):
        counts: dict[int, int] = {}
        cur = c
        while cur > 1 and sif[cur]:
            pc = int(sif[cur])
            counts[pc] = counts.get(pc, 0) + 1
            cur = int(quot[cur])
        if cur > 1:
            counts[cur] = counts.get(cur, 0) + 1
        key = tuple(sorted((_deg_of_code(q, pc), e)
                           for pc, e in counts.items()))
        profiles[key] = profiles.get(key, 0) + 1
    return profiles


def _deg_of_code(q: int, code: int) -> int:
    d = -1
    while code:
        code //= q
        d += 1
    return d


def _divisor_degree_tensor(profile, n: int, k: int) -> np.ndarray:
    """Counts of ordered (k-1)-part divisor tuples by degree vector.

    Entry [j1, ..., j_(k-1)] counts tuples (D_1, .., D_(k-1)) of monic
    divisors with disjoint content drawn from one polynomial of the
    profile, deg D_i = j_i; the k-th part takes the rest.
    """
    shape = (n + 1,) * (k - 1)
    out = np.zeros(shape, dtype=np.int64)
    out[(0,) * (k - 1)] = 1
    for d, e in profile:
        nxt = np.zeros(shape, dtype=np.int64)
        for comp in compositions(e, k):
            if any(comp[i] * d > n for i in range(k - 1)):
                continue
            idx = tuple(slice(0, n + 1 - comp[i] * d)
                        for i in range(k - 1))
            dst = tuple(slice(comp[i] * d, n + 1) for i in range(k - 1))
            nxt[dst] += out[idx]
        out = nxt
    return out


def exact_lhs_poly(q: int, n: int, k: int, rect, table: IrreducibleTable)\
        -> Fraction:
    """Mean over all monic F of degree n of the fraction of ordered
    k-tuples (D_1, ..., D_k) with product F and deg D_i <= floor(n*u_i)
    for i < k.  Exact rational."""
    caps = _degree_caps(n, k, rect)
    tensors = _profile_tensors(q, n, k, table)
    total = Fraction(0)
    for tau, tensor in tensors.items():
        block = tensor[tuple(slice(0, c + 1) for c in caps)]
        total += Fraction(int(block.sum()), tau)
    return total / q ** n


def _degree_caps(n: int, k: int, rect) -> list[int]:
    """floor(n * u_i) from exact rationals; no float boundary cases."""
    u = rect.u if hasattr(rect, "u") else rect
    fr = [Fraction(c) for c in u]
    if len(fr) != k - 1:
        raise DomainError("rectangle dimension must be k - 1")
    if any(c < 0 or c > 1 for c in fr):
        raise DomainError("rectangle coordinates must lie in [0, 1]")
    return [(n * c.numerator) // c.denominator for c in fr]


def _profile_tensors(q: int, n: int, k: int, table: IrreducibleTable):
    """tau -> summed divisor-degree tensor over all monic F of degree n."""
    if not _is_prime(q) or q > _MAX_Q:
        raise ResourceError(f"q must be a prime <= {_MAX_Q}")
    if n < 1 or k < 2:
        raise DomainError("need n >= 1 and k >= 2")
    if q ** n > _ENUM_GUARD:
        raise ResourceError("q^n exceeds the enumeration guard")
    if table.q != q or table.max_deg < max(n // 2, 1):
        raise DomainError("table must cover the field up to degree n/2")
    profiles = _degree_profiles(q, n, table)
    out: dict[int, np.ndarray] = {}
    for profile, count in profiles.items():
        tau = 1
        for _, e in profile:
            tau *= math.comb(e + k - 1, k - 1)
        tensor = _divisor_degree_tensor(profile, n, k) * count
        if tau in out:
            out[tau] += tensor
        else:
            out[tau] = tensor
    return out


def deviation_poly(q: int, n: int, k: int, grid_step,
                   table: IrreducibleTable) -> DeviationReport:
    """Grid sup of |exact mean - Dir(1/k, ..., 1/k) CDF|.

    One enumeration serves every grid point; the rate normalization is
    n^(1/k), matching the expected decay of the deviation.
    """
    step = Fraction(grid_step)
    tensors = _profile_tensors(q, n, k, table)
    points = rect_grid(k, step)
    alpha = tuple(1.0 / k for _ in range(k))
    qn = Fraction(q) ** n
    emp, lim, dev = [], [], []
    for u in points:
        caps = [int(n * c) for c in u]
        val = Fraction(0)
        for tau, tensor in tensors.items():
            block = tensor[tuple(slice(0, c + 1) for c in caps)]
            val += Fraction(int(block.sum()), tau)
        e = float(val / qn)
        f = cdf(alpha, tuple(float(c) for c in u), 1e-9)
        emp.append(e)
        lim.append(f)
        dev.append(abs(e - f))
    sup = max(dev)
    return DeviationReport(
        kind="polys", scale=n, k=k, model_id=f"q{q}-uniform",
        grid_step=step, points=points, empirical=tuple(emp),
        limit=tuple(lim), deviation=tuple(dev), sup_dev=sup,
        scaled_sup_dev=sup * n ** (1.0 / k))
