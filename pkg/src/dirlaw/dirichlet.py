"""Dirichlet distributions on the simplex: density, rectangle CDF, sampling.

The distribution Dir(alpha_1, ..., alpha_k) lives on the simplex
{t_i >= 0, sum t_i = 1} and has density

    f(t) = Gamma(alpha_1 + ... + alpha_k) / prod Gamma(alpha_i)
           * prod t_i^(alpha_i - 1)

with respect to dt_1 ... dt_(k-1) (the last coordinate is eliminated).
The rectangle CDF F(u) integrates f over {t_i <= u_i, i < k}.  Because
sum u_i <= 1 the box sits inside the simplex, so the CDF is a box
integral; each coordinate with its t^(alpha-1) endpoint singularity is
regularized exactly by the substitution t = w^(1/alpha), and the
remaining face singularity (1 - sum t)^(alpha_k - 1) is absorbed by the
tanh-sinh rule, whose nodes cluster double-exponentially at the far
corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularityError, UnsupportedError
from .quadrature import nodes

_MAX_CDF_DIMS = 4          # nested integration dimension cap (k - 1)
_CHUNK = 4_000_000         # max elements per flattened evaluation block
_LEVEL_CAP = {1: 9, 2: 7, 3: 6, 4: 5}


@dataclass(frozen=True)
class DirichletParams:
    """Parameter vector alpha; every entry strictly positive, k >= 2."""

    alpha: tuple[float, ...]

    def __post_init__(self):
        if len(self.alpha) < 2:
            raise DomainError("Dirichlet parameters need k >= 2 components")
        if any(not (a > 0.0) or not math.isfinite(a) for a in self.alpha):
            raise DomainError("every alpha_i must be finite and > 0")

    @property
    def k(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class SimplexPoint:
    """A point with nonnegative coordinates summing to 1 (tol 1e-12)."""

    t: tuple[float, ...]

    def __post_init__(self):
        if any(c < 0.0 for c in self.t):
            raise DomainError("simplex coordinates must be nonnegative")
        if abs(sum(self.t) - 1.0) > 1e-12:
            raise DomainError("simplex coordinates must sum to 1 (tol 1e-12)")


@dataclass(frozen=True)
class RectQuery:
    """Corner u of the rectangle {t_i <= u_i, i < k}, inside the simplex."""

    u: tuple[float, ...]

    def __post_init__(self):
        if any(c < 0.0 or c > 1.0 for c in self.u):
            raise DomainError("rectangle corner coordinates must lie in [0,1]")

    @property
    def on_simplex(self) -> bool:
        return sum(self.u) <= 1.0 + 1e-12


def _as_alpha(params) -> tuple[float, ...]:
    if isinstance(params, DirichletParams):
        return params.alpha
    return DirichletParams(tuple(float(a) for a in params)).alpha


def _as_corner(rect) -> tuple[float, ...]:
    if isinstance(rect, RectQuery):
        return rect.u
    return RectQuery(tuple(float(c) for c in rect)).u


def _log_norm(alpha: Sequence[float]) -> float:
    return math.lgamma(math.fsum(alpha)) - math.fsum(
        math.lgamma(a) for a in alpha)


def density(params, point) -> float:
    """Density at an interior point (or boundary when all alpha_i >= 1).

    Evaluating on a boundary face carrying a t^(alpha-1) singularity with
    alpha < 1 raises SingularityError.
    """
    alpha = _as_alpha(params)
    t = point.t if isinstance(point, SimplexPoint) else SimplexPoint(
        tuple(float(c) for c in point)).t
    if len(t) != len(alpha):
        raise DomainError("point dimension does not match parameter k")
    logs = 0.0
    for a, c in zip(alpha, t):
        if c == 0.0:
            if a < 1.0:
                raise SingularityError(
                    "density is singular on this boundary face")
            if a > 1.0:
                return 0.0
        else:
            logs += (a - 1.0) * math.log(c)
    return math.exp(_log_norm(alpha) + logs)


def cdf_arcsine(u: float) -> float:
    """Closed form for k=2, alpha=(1/2,1/2): (2/pi) * arcsin(sqrt(u))."""
    if not 0.0 <= u <= 1.0:
        raise DomainError("arcsine CDF argument must lie in [0,1]")
    return 2.0 / math.pi * math.asin(math.sqrt(u))


def _box_integral(alpha: tuple[float, ...], u: tuple[float, ...],
                  level: int) -> float:
    """Integral of prod t_i^(a_i-1) (1-sum t)^(a_k-1) over the box.

    Works in w-coordinates (t_i = w_i^(1/a_i)); the per-level upper limit
    is min(u_i, slack), which also serves the full-simplex mass when every
    u_i is 1.  The running slack 1 - sum t is threaded as a sum of exact
    endpoint distances so the face singularity is evaluated accurately.
    """
    xi, omx, w = nodes(level)
    dims = len(u)
    # q = 1 - xi^(1/a), accurate for xi near 1; when 1 - omx rounds to 0
    # fall back to log(xi), which is the same quantity.
    with np.errstate(divide="ignore"):
        lg = np.where(omx < 1.0, np.log1p(-omx), np.log(xi))
    qs = [-np.expm1(lg / a) for a in alpha[:dims]]
    a_last = alpha[-1]

    def recurse(slack: np.ndarray, depth: int) -> np.ndarray:
        a = alpha[depth]
        q = qs[depth]
        ui = u[depth]
        sub = ui < slack
        lim = np.where(sub, ui, slack)
        base = np.where(sub, slack - ui, 0.0)
        m = slack.shape[0]
        n = q.shape[0]
        out = np.zeros(m)
        block = max(1, _CHUNK // max(n, 1))
        for lo in range(0, m, block):
            hi = min(lo + block, m)
            child = base[lo:hi, None] + lim[lo:hi, None] * q[None, :]
            if depth == dims - 1:
                if a_last == 1.0:
                    vals = np.ones_like(child)
                else:
                    # child underflows to 0 only where the cumulative
                    # weight is far below double precision; drop the node.
                    with np.errstate(divide="ignore"):
                        vals = np.where(child > 0.0,
                                        child ** (a_last - 1.0), 0.0)
            else:
                vals = recurse(child.reshape(-1), depth + 1).reshape(
                    hi - lo, n)
            out[lo:hi] = vals @ w
        return out * lim ** a / a

    return float(recurse(np.ones(1), 0)[0])


@lru_cache(maxsize=200_000)
def _cdf_cached(alpha: tuple[float, ...], u: tuple[float, ...],
                tol: float) -> float:
    if any(c == 0.0 for c in u):
        return 0.0
    dims = len(u)
    cap = _LEVEL_CAP.get(dims, 5)
    norm = math.exp(_log_norm(alpha))
    prev = None
    for level in range(3, cap + 1):
        val = norm * _box_integral(alpha, u, level)
        if prev is not None and abs(val - prev) <= max(0.5 * tol, 4e-16):
            return min(val, 1.0) if val > 1.0 and val - 1.0 < tol else val
        prev = val
    from .errors import IntegrityError
    raise IntegrityError(
        f"CDF quadrature did not converge to {tol:g} in {dims} dimensions")


def cdf(params, rect, tol: float = 1e-9) -> float:
    """Rectangle CDF F(u_1, ..., u_(k-1)) to absolute accuracy tol.

    Requires sum u_i <= 1 (the box must not leave the simplex) and
    k - 1 <= 4; tol must lie in [1e-12, 1e-3].
    """
    alpha = _as_alpha(params)
    u = _as_corner(rect)
    if len(u) != len(alpha) - 1:
        raise DomainError("rectangle dimension must be k - 1")
    if sum(u) > 1.0 + 1e-12:
        raise DomainError("rectangle corner must satisfy sum u_i <= 1")
    if len(u) > _MAX_CDF_DIMS:
        raise UnsupportedError("CDF supports at most k - 1 = 4 dimensions")
    if not (1e-12 <= tol <= 1e-3):
        raise DomainError("tol must lie in [1e-12, 1e-3]")
    return _cdf_cached(alpha, u, tol)


def simplex_mass(params, tol: float = 1e-9) -> float:
    """Total mass of the density over the whole simplex (ideally 1).

    Computed by the same nested rule as ``cdf`` with every upper limit
    ridden down to the running slack; a direct check on the quadrature
    plus normalization constants.
    """
    alpha = _as_alpha(params)
    if len(alpha) - 1 > _MAX_CDF_DIMS:
        raise UnsupportedError("mass check supports at most k - 1 = 4")
    return _cdf_cached(alpha, tuple(1.0 for _ in alpha[:-1]), tol)


def sample(params, seed: int) -> SimplexPoint:
    """One draw: independent Gamma(alpha_i, 1) variates, normalized."""
    pt = sample_many(params, 1, seed)[0]
    return SimplexPoint(tuple(float(c) for c in pt))


def sample_many(params, n: int, seed: int) -> np.ndarray:
    """``n`` draws as an (n, k) array; deterministic for a fixed seed."""
    alpha = _as_alpha(params)
    if n < 1:
        raise DomainError("sample count must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    g = rng.gamma(shape=np.asarray(alpha), size=(n, len(alpha)))
    return g / g.sum(axis=1, keepdims=True)


def cdf_monte_carlo(params, rect, n_samples: int, seed: int,
                    batch: int = 1_000_000) -> tuple[float, float]:
    """Monte Carlo estimate of the rectangle CDF: (estimate, stderr).

    The independent-route oracle for ``cdf``: draws are batched so memory
    stays bounded at ~batch * k floats.
    """
    alpha = _as_alpha(params)
    u = _as_corner(rect)
    if len(u) != len(alpha) - 1:
        raise DomainError("rectangle dimension must be k - 1")
    if n_samples < 1:
        raise DomainError("sample count must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    done = 0
    ua = np.asarray(u)
    while done < n_samples:
        m = min(batch, n_samples - done)
        g = rng.gamma(shape=np.asarray(alpha), size=(m, len(alpha)))
        t = g[:, :-1] / g.sum(axis=1, keepdims=True)
        hits += int(np.all(t <= ua, axis=1).sum())
        done += m
    p = hits / n_samples
    return p, math.sqrt(max(p * (1.0 - p), 1.0 / n_samples) / n_samples)
