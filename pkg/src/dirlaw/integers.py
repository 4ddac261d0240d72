"""Mean statistics of weighted k-part factorizations of the integers
n <= x, and their convergence to the Dirichlet limit law.

The central quantity is

    L(x, u) = (sum_{m<=x} f(m))^(-1) * sum_{n<=x} f(n) / G_total(n)
              * sum G(d_1, ..., d_k)

where the inner sum runs over ordered k-tuples with product n whose
first k-1 parts satisfy d_i <= n^(u_i).  As x grows L(x, u) approaches
the Dirichlet rectangle CDF attached to the model.

Tuples are never materialized as divisor lists: the enumeration recurses
over the primes of n, choosing a weak composition of each exponent, so
the cost is one visit per tuple with O(1) amortized bookkeeping and the
G weight accumulated along the way.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import quadrature
from .arith import (FactoredInteger, SpfSieve, WeightModel, compositions,
                    factorize, tau_k)
from .dirichlet import cdf
from .errors import (DomainError, IntegrityError, ResourceError,
                     UnsupportedError)
from .report import DeviationReport, rect_grid

_EXACT_X_LIMIT = 10_000_000
_BIN_RANGE = (10, 2000)
_CELL_GUARD = 100_000_000
_MERGE_CHUNKS = 256        # fixed reduction width; independent of shards
# Tie guards: d = n^u holds exactly on a measure-zero set but hits every
# perfect power; comparisons lean a hair toward inclusion so those ties
# land on the <= side, matching the exact integer comparison d <= floor(n^u).
_REL_GUARD = 1e-9
_ABS_GUARD = 1e-12


@dataclass
class HistogramGrid:
    """Dense histogram over (k-1)-dimensional scaled-logarithm bins.

    Bin b along an axis covers (b*w, (b+1)*w] with w = 1/bins_per_dim,
    except bin 0 which also includes 0.  ``weights`` holds normalized
    mass after ``finalize``; ``cum`` its inclusive prefix sums.
    """

    k: int
    bins_per_dim: int
    weights: np.ndarray
    total_weight: float = 0.0
    normalizer: float = 0.0
    cum: np.ndarray | None = None

    def finalize(self):
        self.total_weight = float(self.weights.sum())
        if self.normalizer <= 0.0:
            raise IntegrityError("histogram normalizer must be positive")
        if abs(self.total_weight / self.normalizer - 1.0) > 1e-9:
            raise IntegrityError(
                "histogram mass does not match its normalizer")
        self.weights = self.weights / self.normalizer
        c = self.weights
        for axis in range(self.k - 1):
            c = np.cumsum(c, axis=axis)
        self.cum = c
        return self


def _cell_of(r: float, bins: int) -> int:
    """Bin index for a value with scaled position r = v / w in [0, bins]."""
    c = math.ceil(r * (1.0 - _REL_GUARD) - _ABS_GUARD) - 1
    if c < 0:
        return 0
    return min(c, bins - 1)


def _query_index(u: float, bins: int) -> int:
    """Largest bin whose upper edge is <= u (bin 0 always included)."""
    i = math.floor(u * bins * (1.0 + _REL_GUARD) + _ABS_GUARD) - 1
    return max(0, min(i, bins - 1))


def empirical_cdf(grid: HistogramGrid, rect) -> float:
    """Mass of bins with upper corners inside the rectangle.

    Accepts corners with coordinates in [0, 1] without a simplex cap, so
    u = (1, ..., 1) reads off the total mass.  Bias is at most one bin
    shell; at exactly grid-aligned corners (multiples of the bin width)
    it vanishes against the tie-guarded exact count.
    """
    if grid.cum is None:
        raise IntegrityError("histogram must be finalized before queries")
    u = rect.u if hasattr(rect, "u") else tuple(float(c) for c in rect)
    if len(u) != grid.k - 1:
        raise DomainError("query dimension must be k - 1")
    if any(c < 0.0 or c > 1.0 + 1e-12 for c in u):
        raise DomainError("query coordinates must lie in [0, 1]")
    idx = tuple(_query_index(c, grid.bins_per_dim) for c in u)
    return float(grid.cum[idx])


def _walk_leaf_weights(fn: FactoredInteger, model: WeightModel,
                       as_float: bool):
    """Yield (log_parts, weight) over ordered k-tuples with product n.

    ``log_parts`` holds log d_i for the first k-1 coordinates; weight is
    the G value of the full k-tuple.
    """
    k = model.k
    facs = fn.factors
    logs = [math.log(p) for p, _ in facs]
    out = []

    def rec(i: int, logd: list[float], w):
        if i == len(facs):
            out.append((tuple(logd), w))
            return
        p, v = facs[i]
        lp = logs[i]
        for comp in compositions(v, k):
            g = model.g_local(p, comp)
            if g == 0:
                continue
            nxt = list(logd)
            for j in range(k - 1):
                if comp[j]:
                    nxt[j] += comp[j] * lp
            rec(i + 1, nxt, w * (float(g) if as_float else g))

    rec(0, [0.0] * (k - 1), 1.0 if as_float else Fraction(1))
    return out


def _walk_leaf_parts(fn: FactoredInteger, model: WeightModel):
    """Like _walk_leaf_weights but with integer parts, for exact mode."""
    k = model.k
    facs = fn.factors
    out = []

    def rec(i: int, parts: list[int], w: Fraction):
        if i == len(facs):
            out.append((tuple(parts), w))
            return
        p, v = facs[i]
        for comp in compositions(v, k):
            g = model.g_local(p, comp)
            if g == 0:
                continue
            nxt = list(parts)
            for j in range(k - 1):
                if comp[j]:
                    nxt[j] *= p ** comp[j]
            rec(i + 1, nxt, w * Fraction(g))

    rec(0, [1] * (k - 1), Fraction(1))
    return out


def _exact_thresholds(n: int, u: Sequence[Fraction]) -> list[int]:
    """floor(n^(p/q)) per coordinate, verified by integer comparison."""
    out = []
    for frac in u:
        p, q = frac.numerator, frac.denominator
        if p >= q:
            out.append(n)
            continue
        npow = n ** p
        t = int(round(math.exp(math.log(n) * p / q))) if n > 1 else 1
        while (t + 1) ** q <= npow:
            t += 1
        while t ** q > npow:
            t -= 1
        out.append(t)
    return out


def exact_lhs(x: int, k: int, model: WeightModel, rect, sieve: SpfSieve,
              exact: bool | None = None):
    """L(x, u) by full enumeration; Fraction in exact mode, float else.

    Exact mode needs rational corners, a rational-valued model and
    x <= 1e7; it resolves each boundary d <= n^(u) by exact integer
    power comparison.  The floating path uses the tie-guarded logarithm
    comparison instead.
    """
    _check_engine_args(x, k, model, sieve)
    u = _rect_fractions(rect, k)
    if exact is None:
        exact = model.exact and x <= 100_000
    if exact and (not model.exact or x > _EXACT_X_LIMIT):
        raise UnsupportedError(
            "exact mode needs a rational model and x <= 1e7")

    if exact:
        num = Fraction(0)
        den = Fraction(0)
        for n in range(1, x + 1):
            fn = factorize(n, sieve)
            f = model.f_value(fn)
            if f == 0:
                continue
            f = Fraction(f)
            den += f
            thr = _exact_thresholds(n, u)
            good = Fraction(0)
            total = Fraction(0)
            for parts, g in _walk_leaf_parts(fn, model):
                total += g
                if all(d <= t for d, t in zip(parts, thr)):
                    good += g
            if total == 0:
                raise IntegrityError(
                    f"model {model.model_id} vanishes on n={n} with f>0")
            num += f * good / total
        if den == 0:
            raise IntegrityError("model weight f vanishes on [1, x]")
        return num / den

    uf = [float(c) for c in u]
    num_terms: list[float] = []
    den_terms: list[float] = []
    for n in range(1, x + 1):
        fn = factorize(n, sieve)
        f = model.f_value(fn)
        if f == 0:
            continue
        f = float(f)
        den_terms.append(f)
        ln = math.log(n)
        caps = [c * ln * (1.0 + _REL_GUARD) + _ABS_GUARD for c in uf]
        good = 0.0
        total = 0.0
        for logd, g in _walk_leaf_weights(fn, model, as_float=True):
            total += g
            if all(ld <= cap for ld, cap in zip(logd, caps)):
                good += g
        if total <= 0.0:
            raise IntegrityError(
                f"model {model.model_id} vanishes on n={n} with f>0")
        num_terms.append(f * good / total)
    den = math.fsum(den_terms)
    if den <= 0.0:
        raise IntegrityError("model weight f vanishes on [1, x]")
    return math.fsum(num_terms) / den


def _rect_fractions(rect, k: int) -> tuple[Fraction, ...]:
    u = rect.u if hasattr(rect, "u") else rect
    out = tuple(Fraction(c) for c in u)
    if len(out) != k - 1:
        raise DomainError("rectangle dimension must be k - 1")
    if any(c < 0 or c > 1 for c in out):
        raise DomainError("rectangle coordinates must lie in [0, 1]")
    return out


def _check_engine_args(x: int, k: int, model: WeightModel, sieve: SpfSieve):
    if x < 1:
        raise DomainError("x must be positive")
    if k != model.k:
        raise DomainError("k must equal the model dimension")
    if sieve.limit < x:
        raise DomainError("sieve does not cover x")


def _chunk_ranges(x: int):
    """Fixed n-range decomposition; the merge order never depends on the
    worker count, so results are bitwise reproducible for any shards."""
    chunks = min(_MERGE_CHUNKS, x)
    bounds = [1 + (x * i) // chunks for i in range(chunks + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(chunks)
            if bounds[i] < bounds[i + 1]]


def accumulate_histogram(x: int, k: int, model: WeightModel, bins: int,
                         shards: int, sieve: SpfSieve) -> HistogramGrid:
    """Histogram of tuple positions (log d_i / log n) with model weights.

    Every tuple of every n <= x deposits f(n) * G / G_total(n) into the
    bin of its position vector; n = 1 deposits at the origin.  The
    result is finalized (normalized by sum f) before return.
    """
    _check_engine_args(x, k, model, sieve)
    if not _BIN_RANGE[0] <= bins <= _BIN_RANGE[1]:
        raise DomainError(f"bins per dimension must lie in {_BIN_RANGE}")
    return _accumulate(x, k, model, bins, shards, sieve)


def _accumulate(x: int, k: int, model: WeightModel, bins: int,
                shards: int, sieve: SpfSieve) -> HistogramGrid:
    if shards < 1 or shards > 64:
        raise DomainError("shards must lie in [1, 64]")
    if bins ** (k - 1) > _CELL_GUARD:
        raise ResourceError("bin grid exceeds the cell-count guard")
    shape = (bins,) * (k - 1)
    if model.model_id == "uniform" and k == 2:
        hist, norm = _accumulate_uniform_k2(x, bins, sieve)
    else:
        ranges = _chunk_ranges(x)

        def run_chunk(rng):
            return _chunk_histogram(rng, k, model, bins, sieve)

        if shards == 1:
            parts = [run_chunk(r) for r in ranges]
        else:
            with ThreadPoolExecutor(max_workers=shards) as pool:
                parts = list(pool.map(run_chunk, ranges))
        hist = np.zeros(shape)
        norm = 0.0
        for part_hist, part_norm in parts:      # fixed ascending order
            hist += part_hist
            norm += part_norm
    grid = HistogramGrid(k=k, bins_per_dim=bins, weights=hist,
                         normalizer=norm)
    return grid.finalize()


def _chunk_histogram(rng: tuple[int, int], k: int, model: WeightModel,
                     bins: int, sieve: SpfSieve):
    lo, hi = rng
    hist = np.zeros((bins,) * (k - 1))
    norm_terms = []
    for n in range(lo, hi):
        fn = factorize(n, sieve)
        f = model.f_value(fn)
        if f == 0:
            continue
        f = float(f)
        norm_terms.append(f)
        if n == 1:
            hist[(0,) * (k - 1)] += f
            continue
        ln_inv = 1.0 / math.log(n)
        leaves = _walk_leaf_weights(fn, model, as_float=True)
        total = math.fsum(g for _, g in leaves)
        if total <= 0.0:
            raise IntegrityError(
                f"model {model.model_id} vanishes on n={n} with f>0")
        scale = f / total
        for logd, g in leaves:
            cell = tuple(_cell_of(ld * ln_inv * bins, bins) for ld in logd)
            hist[cell] += g * scale
    return hist, math.fsum(norm_terms)


def _accumulate_uniform_k2(x: int, bins: int, sieve: SpfSieve):
    """Vector path for the unweighted two-part case.

    Splits divisor pairs (d, n=d*m) by whichever of d, m is small enough
    to drive a vector op, so the Python-level loop count stays near
    2*sqrt(x) while numpy handles the ~x log x deposits.
    """
    tau = np.zeros(x + 1, dtype=np.int64)
    for d in range(1, x + 1):
        tau[d:: d] += 1
    inv_tau = np.zeros(x + 1)
    inv_tau[1:] = 1.0 / tau[1:]
    hist = np.zeros(bins)
    hist[0] += 1.0                       # n = 1 at the origin
    split = math.isqrt(x)
    logn = np.zeros(x + 1)
    logn[2:] = np.log(np.arange(2, x + 1, dtype=np.float64))

    def deposit(d_arr, n_arr):
        r = (np.log(d_arr) / logn[n_arr]) * bins
        cells = np.ceil(r * (1.0 - _REL_GUARD) - _ABS_GUARD).astype(
            np.int64) - 1
        np.clip(cells, 0, bins - 1, out=cells)
        np.add.at(hist, cells, inv_tau[n_arr])

    for d in range(1, split + 1):
        n = np.arange(d, x + 1, d)
        n = n[n >= 2]
        deposit(np.full(len(n), float(d)), n)
    # remaining pairs have cofactor m <= x // (split+1) < split + 1
    for m in range(1, x // (split + 1) + 1):
        d = np.arange(split + 1, x // m + 1, dtype=np.int64)
        n = d * m
        deposit(d.astype(np.float64), n)
    return hist, float(x)


def sup_deviation(x: int, k: int, model: WeightModel, grid_step,
                  sieve: SpfSieve, shards: int = 1) -> DeviationReport:
    """Grid sup of |L(x, u) - F(u)| over the step grid.

    The empirical side is a single enumeration pass binned at exactly
    the grid resolution, which reproduces the pointwise tie-guarded
    counts at every grid corner.
    """
    _check_engine_args(x, k, model, sieve)
    step = Fraction(grid_step)
    bins = Fraction(1) / step
    if bins.denominator != 1:
        raise DomainError("grid step must divide 1")
    if step < Fraction(1, 100):
        raise DomainError("grid step must be at least 0.01")
    grid = _accumulate(x, k, model, int(bins), shards, sieve)
    return _deviation_report("integers", x, x, k, model, step, grid)


def _deviation_report(kind: str, scale: int, x_for_rate: int, k: int,
                      model: WeightModel, step: Fraction,
                      grid: HistogramGrid) -> DeviationReport:
    points = rect_grid(k, step)
    alpha = model.alpha
    emp = []
    lim = []
    dev = []
    for u in points:
        uf = tuple(float(c) for c in u)
        e = empirical_cdf(grid, uf)
        f = cdf(alpha, uf, 1e-9)
        emp.append(e)
        lim.append(f)
        dev.append(abs(e - f))
    sup = max(dev)
    rate = min([1.0] + [float(a) for a in model.alpha_exact])
    scaled = sup * math.log(x_for_rate) ** rate
    return DeviationReport(
        kind=kind, scale=scale, k=k, model_id=model.model_id,
        grid_step=step, points=points, empirical=tuple(emp),
        limit=tuple(lim), deviation=tuple(dev), sup_dev=sup,
        scaled_sup_dev=scaled)


def convergence_study(xs: Sequence[int], k: int, model: WeightModel,
                      grid_step, sieve: SpfSieve,
                      shards: int = 1) -> list[DeviationReport]:
    """Deviation reports along increasing x (limit values are cached)."""
    if list(xs) != sorted(set(xs)):
        raise DomainError("scales must be strictly increasing")
    return [sup_deviation(x, k, model, grid_step, sieve, shards)
            for x in xs]


def mc_lhs(x: int, k: int, model: WeightModel, rect, n_samples: int,
           seed: int, sieve: SpfSieve) -> tuple[float, float]:
    """Monte Carlo estimate of L(x, u): (estimate, stderr).

    Samples n uniformly with f-rejection (only models with f <= 1) and
    one G-weighted tuple per accepted n.  An independent route used to
    cross-check the exact enumeration.
    """
    _check_engine_args(x, k, model, sieve)
    if not model.f_bounded_by_one:
        raise UnsupportedError(
            "f-rejection sampling needs a model with f <= 1")
    if n_samples < 1000:
        raise DomainError("sample count must be at least 1000")
    u = [float(c) for c in _rect_fractions(rect, k)]
    rng = np.random.Generator(np.random.PCG64(seed))
    from .arith import sample_factorization_rng
    hits = 0
    got = 0
    while got < n_samples:
        n = int(rng.integers(1, x + 1))
        fn = factorize(n, sieve)
        f = float(model.f_value(fn))
        if f < 1.0 and rng.random() >= f:
            continue
        got += 1
        parts = sample_factorization_rng(fn, k, model, rng)
        ln = math.log(n) if n > 1 else 0.0
        ok = True
        for c, d in zip(u, parts[: k - 1]):
            if math.log(d) > c * ln * (1.0 + _REL_GUARD) + _ABS_GUARD:
                ok = False
                break
        hits += ok
    p = hits / n_samples
    return p, math.sqrt(p * (1.0 - p) / n_samples)


# ------------------------------------------------ weighted two-log moments

def weighted_sum_S(x_vec: Sequence[int], k: int, sieve: SpfSieve)\
        -> tuple[float, float, float]:
    """Sum of prod (log d_j)^2 / tau_k(prod d_j) over the box d_j <= x_j.

    Returns (S, main_term, residual_ratio) where the main term is
    prod_j integral_1^{x_j} (log y)^(1/k + 1) dy / Gamma(1/k)^k and
    residual_ratio = (S - main) / main.

    Per-coordinate logs are looked up from a math.log table and every
    sum is exactly rounded (fsum), so the value is independent of the
    evaluation order and bitwise reproducible against a plain nested
    loop that follows the same (log d_1)^2 * (log d_2)^2 / tau bracket.
    """
    bounds = [float(v) for v in x_vec]
    if len(bounds) != k or k < 2:
        raise DomainError("x_vec length must equal k >= 2")
    if any(v < math.e - 1e-12 for v in bounds):
        raise DomainError("box bounds must be at least e")
    size = 1.0
    for v in bounds:
        size *= v
    if size > _CELL_GUARD:
        raise ResourceError("box volume exceeds the 1e8 guard")
    xs = [math.floor(v) for v in bounds]
    if max(xs) > sieve.limit:
        raise DomainError("sieve does not cover the box")

    n_max = max(xs)
    log_sq = np.zeros(n_max + 1)
    for d in range(2, n_max + 1):        # math.log keeps the table
        log_sq[d] = math.log(d) ** 2     # bit-identical to a plain loop
    inner_n = xs[-1]
    tau_last = _tau_k_table(inner_n, k, sieve)
    vp_cache: dict[int, np.ndarray] = {}

    def vp_array(p: int) -> np.ndarray:
        arr = vp_cache.get(p)
        if arr is None:
            arr = np.zeros(inner_n + 1, dtype=np.int64)
            q = p
            while q <= inner_n:
                arr[q:: q] += 1
                q *= p
            vp_cache[p] = arr
        return arr

    inner_logsq = log_sq[1: inner_n + 1]
    rows: list[float] = []

    def descend(depth: int, outer_exps: dict[int, int],
                outer_logsq: float):
        if depth == k - 1:
            taus = tau_last[1: inner_n + 1].copy()
            for p, v1 in outer_exps.items():
                v2 = vp_array(p)[1: inner_n + 1]
                taus = taus // _comb_vec(v2, k) * _comb_vec(v2 + v1, k)
            terms = (outer_logsq * inner_logsq) / taus
            rows.append(math.fsum(terms.tolist()))
            return
        for d in range(2, xs[depth] + 1):    # log 1 = 0 kills d = 1
            fn = factorize(d, sieve)
            exps = dict(outer_exps)
            for p, v in fn.factors:
                exps[p] = exps.get(p, 0) + v
            descend(depth + 1, exps, outer_logsq * log_sq[d])

    descend(0, {}, 1.0)
    s_val = math.fsum(rows)

    inv_k = 1.0 / k
    main = 1.0
    for xj in bounds:                    # real bounds, not floors
        main *= _log_power_integral(xj, inv_k + 1.0)
    main /= math.gamma(inv_k) ** k
    return s_val, main, (s_val - main) / main


def _comb_vec(v: np.ndarray, k: int) -> np.ndarray:
    """C(v + k - 1, k - 1) elementwise for small k; exact int64."""
    out = np.ones_like(v)
    for j in range(1, k):
        out = out * (v + j) // j
    return out


def _tau_k_table(limit: int, k: int, sieve: SpfSieve) -> np.ndarray:
    out = np.ones(limit + 1, dtype=np.int64)
    out[0] = 0
    for n in range(2, limit + 1):
        out[n] = tau_k(factorize(n, sieve), k)
    return out


def _log_power_integral(x: float, c: float) -> float:
    """integral_1^x (log y)^c dy via y = e^t and tanh-sinh."""
    if x <= 1.0:
        return 0.0
    top = math.log(x)
    return quadrature.integrate(
        lambda t: t ** c * np.exp(t), 0.0, top, tol=1e-10)
