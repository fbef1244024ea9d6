"""Distribution kernels for the asymmetric-Laplace latent-variable samplers.

The samplers need draws from a small set of laws: the asymmetric Laplace
(AL) error distribution via its normal-exponential mixture, the generalized
inverse Gaussian with index 1/2 that arises as the mixing weight's
conditional, one-sided truncated normals for the latent utilities, and
multivariate normals given in precision form.  Everything is vectorized
over observations and consumes randomness only through an
:class:`~bqr.rng.RngStream`, so results are bit-for-bit reproducible.

The AL(0, 1, p) law has density ``p (1 - p) exp(-x (p - 1{x < 0}))`` and the
mixture representation ``eps = theta w + tau sqrt(w) u`` with ``w ~ Exp(1)``,
``u ~ N(0, 1)``, ``theta = (1 - 2p) / (p (1 - p))`` and
``tau^2 = 2 / (p (1 - p))``.  Its p-th quantile is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.special import ndtr, ndtri

from .exceptions import DomainError
from .linalg import chol_factor
from .rng import RngStream

__all__ = [
    "QuantileSpec",
    "al_constants",
    "al_cdf",
    "al_logcdf",
    "al_logsf",
    "al_ppf",
    "al_sample",
    "gig_half_sample",
    "trunc_normal_lower_std",
    "trunc_normal_sample",
    "sample_mvn_precision",
]

# Accept-reject strategy switch: if the kept region carries at least this
# much normal mass, plain resampling is cheaper than the tail scheme.
_NAIVE_MASS = 0.3
_NAIVE_CUTOFF = float(ndtri(1.0 - _NAIVE_MASS))
_MAX_REJECTION_ROUNDS = 10_000


@dataclass(frozen=True)
class QuantileSpec:
    """A quantile level with the mixture constants of AL(0, 1, p)."""

    p: float
    theta: float
    tau: float

    @property
    def tau2(self) -> float:
        return self.tau * self.tau


def _check_p(p: float) -> float:
    p = float(p)
    if not np.isfinite(p) or not 0.0 < p < 1.0:
        raise DomainError(f"quantile level must lie strictly in (0, 1), got {p}")
    return p


def al_constants(p: float) -> QuantileSpec:
    """Mixture constants ``theta = (1-2p)/(p(1-p))``, ``tau = sqrt(2/(p(1-p)))``."""
    p = _check_p(p)
    pq = p * (1.0 - p)
    return QuantileSpec(p=p, theta=(1.0 - 2.0 * p) / pq, tau=float(np.sqrt(2.0 / pq)))


def al_cdf(x, p: float):
    """Closed-form cdf of AL(0, 1, p).

    ``F(x) = p exp((1-p) x)`` for ``x <= 0`` and
    ``F(x) = 1 - (1-p) exp(-p x)`` for ``x > 0``; in particular ``F(0) = p``.
    """
    p = _check_p(p)
    arr = np.asarray(x, dtype=float)
    lower = p * np.exp((1.0 - p) * np.minimum(arr, 0.0))
    # p - (1-p) expm1(-p x) is algebraically 1 - (1-p) exp(-p x) but meets
    # the lower branch at exactly p, keeping the float cdf monotone.
    upper = p - (1.0 - p) * np.expm1(-p * np.maximum(arr, 0.0))
    out = np.where(arr <= 0.0, lower, upper)
    return float(out) if np.ndim(x) == 0 else out


def al_logcdf(x, p: float):
    """log F(x) for AL(0, 1, p), stable in both tails."""
    p = _check_p(p)
    arr = np.asarray(x, dtype=float)
    lower = np.log(p) + (1.0 - p) * np.minimum(arr, 0.0)
    upper = np.log1p(-(1.0 - p) * np.exp(-p * np.maximum(arr, 0.0)))
    out = np.where(arr <= 0.0, lower, upper)
    return float(out) if np.ndim(x) == 0 else out


def al_logsf(x, p: float):
    """log(1 - F(x)) for AL(0, 1, p), stable in both tails."""
    p = _check_p(p)
    arr = np.asarray(x, dtype=float)
    upper = np.log1p(-p) - p * np.maximum(arr, 0.0)
    lower = np.log1p(-p * np.exp((1.0 - p) * np.minimum(arr, 0.0)))
    out = np.where(arr > 0.0, upper, lower)
    return float(out) if np.ndim(x) == 0 else out


def al_ppf(u, p: float):
    """Quantile function of AL(0, 1, p) (closed form)."""
    p = _check_p(p)
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("probabilities must lie strictly in (0, 1)")
    low = np.log(np.minimum(arr, p) / p) / (1.0 - p)
    high = -np.log(np.minimum(1.0 - arr, 1.0 - p) / (1.0 - p)) / p
    out = np.where(arr <= p, low, high)
    return float(out) if np.ndim(u) == 0 else out


def al_sample(p: float, rng: RngStream, size=None):
    """Draw from AL(0, 1, p) through the normal-exponential mixture."""
    spec = al_constants(p)
    w = rng.gen.exponential(1.0, size)
    u = rng.gen.standard_normal(size)
    return spec.theta * w + spec.tau * np.sqrt(w) * u


def gig_half_sample(chi, psi: float, rng: RngStream, *, tiny_chi: float = 1e-12):
    """Draw W with density proportional to ``w^(-1/2) exp(-(chi/w + psi w)/2)``.

    This is the generalized inverse Gaussian with index 1/2.  Its reciprocal
    ``V = 1/W`` is inverse Gaussian with mean ``sqrt(psi/chi)`` and shape
    ``psi``, which is sampled by the Michael-Schucany-Haas transform.  The
    smaller quadratic root is computed in a cancellation-free form so huge
    mean/shape ratios stay accurate.  For ``chi < tiny_chi`` the kernel
    degenerates to Gamma(1/2, rate=psi/2), which is drawn directly.

    ``chi`` may be a scalar or an array; ``psi`` is a positive scalar.
    """
    psi = float(psi)
    if not np.isfinite(psi) or psi <= 0.0:
        raise DomainError(f"psi must be a positive finite scalar, got {psi}")
    arr = np.asarray(chi, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError("chi must be finite and nonnegative")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)

    y = rng.gen.standard_normal(arr.shape)
    y *= y
    u = rng.gen.random(arr.shape)

    mu = np.sqrt(psi / np.maximum(arr, tiny_chi))
    t = mu * y / psi
    v_small = mu / (1.0 + 0.5 * t + np.sqrt(t + 0.25 * t * t))
    take_small = u <= mu / (mu + v_small)
    # W = 1/V with V the inverse-Gaussian draw.
    out = np.where(take_small, (1.0 + 0.5 * t + np.sqrt(t + 0.25 * t * t)) / mu, v_small / (mu * mu))

    small = arr < tiny_chi
    if np.any(small):
        out[small] = rng.gen.gamma(0.5, 2.0 / psi, size=int(small.sum()))
    return float(out[0]) if scalar else out


def trunc_normal_lower_std(a, rng: RngStream):
    """Standard normal conditioned on exceeding ``a``, elementwise.

    Plain accept-reject where the kept tail has mass at least 0.3, and the
    shifted-exponential rejection scheme of Robert (1995) deeper in the
    tail, with tilt ``alpha = (a + sqrt(a^2 + 4)) / 2`` and acceptance
    probability ``exp(-(x - alpha)^2 / 2)``.
    """
    arr = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("truncation bound must be finite")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr).ravel()
    out = np.empty_like(arr)

    todo = np.flatnonzero(arr <= _NAIVE_CUTOFF)
    rounds = 0
    while todo.size:
        cand = rng.gen.standard_normal(todo.size)
        ok = cand > arr[todo]
        out[todo[ok]] = cand[ok]
        todo = todo[~ok]
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:  # pragma: no cover
            raise RuntimeError("truncated-normal rejection failed to terminate")

    todo = np.flatnonzero(arr > _NAIVE_CUTOFF)
    rounds = 0
    while todo.size:
        bound = arr[todo]
        alpha = 0.5 * (bound + np.sqrt(bound * bound + 4.0))
        cand = bound + rng.gen.exponential(1.0, todo.size) / alpha
        ok = rng.gen.random(todo.size) <= np.exp(-0.5 * (cand - alpha) ** 2)
        out[todo[ok]] = cand[ok]
        todo = todo[~ok]
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:  # pragma: no cover
            raise RuntimeError("truncated-normal rejection failed to terminate")

    return float(out[0]) if scalar else out.reshape(np.shape(a))


def _trunc_normal_interval_std(a, b, rng: RngStream):
    """Standard normal conditioned on ``(a, b)``, both bounds finite."""
    out = np.empty_like(a)
    # Stable two-sided mass: work from whichever tail is smaller.
    mass = np.where(a > 0.0, ndtr(-a) - ndtr(-b), ndtr(b) - ndtr(a))

    todo = np.flatnonzero(mass >= _NAIVE_MASS)
    rounds = 0
    while todo.size:
        cand = rng.gen.standard_normal(todo.size)
        ok = (cand > a[todo]) & (cand <= b[todo])
        out[todo[ok]] = cand[ok]
        todo = todo[~ok]
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:  # pragma: no cover
            raise RuntimeError("truncated-normal rejection failed to terminate")

    # Uniform-proposal rejection with the tightest valid envelope
    # (Robert 1995): the density bound depends on where the interval sits.
    todo = np.flatnonzero(mass < _NAIVE_MASS)
    rounds = 0
    while todo.size:
        lo, hi = a[todo], b[todo]
        cand = lo + (hi - lo) * rng.gen.random(todo.size)
        shift = np.where(lo > 0.0, lo * lo, np.where(hi < 0.0, hi * hi, 0.0))
        rho = np.exp(0.5 * (shift - cand * cand))
        ok = rng.gen.random(todo.size) <= rho
        out[todo[ok]] = cand[ok]
        todo = todo[~ok]
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:  # pragma: no cover
            raise RuntimeError("truncated-normal rejection failed to terminate")
    return out


def trunc_normal_sample(mu, var, lower, upper, rng: RngStream):
    """Draw from N(mu, var) conditioned on ``lower < x <= upper``, elementwise.

    ``mu`` and ``var`` may be arrays; bounds may be scalars, arrays, or
    infinite on either side.
    """
    mu_a = np.asarray(mu, dtype=float)
    var_a = np.asarray(var, dtype=float)
    lo_a = np.asarray(lower, dtype=float)
    hi_a = np.asarray(upper, dtype=float)
    if not np.all(np.isfinite(mu_a)):
        raise DomainError("location must be finite")
    if not np.all(np.isfinite(var_a)) or np.any(var_a <= 0.0):
        raise DomainError("variance must be positive and finite")
    if np.any(np.isnan(lo_a)) or np.any(np.isnan(hi_a)):
        raise DomainError("truncation bounds must not be NaN")

    scalar = all(np.ndim(v) == 0 for v in (mu, var, lower, upper))
    mu_a, var_a, lo_a, hi_a = np.broadcast_arrays(mu_a, var_a, lo_a, hi_a)
    shape = mu_a.shape
    mu_f = mu_a.ravel().astype(float)
    sd_f = np.sqrt(var_a.ravel().astype(float))
    lo_f = lo_a.ravel().astype(float)
    hi_f = hi_a.ravel().astype(float)
    if np.any(lo_f >= hi_f):
        raise DomainError("truncation interval is empty (lower >= upper)")

    a = (lo_f - mu_f) / sd_f
    b = (hi_f - mu_f) / sd_f
    std = np.empty_like(mu_f)

    free = ~np.isfinite(a) & ~np.isfinite(b)
    if np.any(free):
        std[free] = rng.gen.standard_normal(int(free.sum()))
    low_only = np.isfinite(a) & ~np.isfinite(b)
    if np.any(low_only):
        std[low_only] = trunc_normal_lower_std(a[low_only], rng)
    up_only = ~np.isfinite(a) & np.isfinite(b)
    if np.any(up_only):
        std[up_only] = -trunc_normal_lower_std(-b[up_only], rng)
    two = np.isfinite(a) & np.isfinite(b)
    if np.any(two):
        std[two] = _trunc_normal_interval_std(a[two], b[two], rng)

    out = (mu_f + sd_f * std).reshape(shape)
    return float(out) if scalar else out


def sample_mvn_precision(precision, linear, rng: RngStream) -> np.ndarray:
    """Draw from the multivariate normal with the given precision form.

    The target has precision matrix ``P`` and mean ``P^{-1} b`` where ``b``
    is the ``linear`` term.  Sampling never forms ``P^{-1}``: with
    ``P = L L'`` the draw is ``mean + L'^{-1} xi``, ``xi ~ N(0, I)``.
    """
    P = np.asarray(precision, dtype=float)
    b = np.asarray(linear, dtype=float)
    if b.ndim != 1:
        raise DomainError(f"linear term must be a vector, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise DomainError("linear term must be finite")
    L = chol_factor(P)
    if L.shape[0] != b.shape[0]:
        raise DomainError(f"precision is {L.shape[0]}x{L.shape[0]} but linear term has length {b.shape[0]}")
    mean = cho_solve((L, True), b)
    xi = rng.gen.standard_normal(b.shape[0])
    return mean + solve_triangular(L, xi, lower=True, trans="T")
