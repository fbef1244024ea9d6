"""Posterior summaries and convergence diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exceptions import DomainError, InsufficientDraws
from .model import DrawStore

__all__ = [
    "Summary",
    "summarize",
    "psrf",
    "psrf_all",
    "batch_means_se",
    "ReplicationMetrics",
    "replication_metrics",
]


@dataclass(frozen=True)
class Summary:
    """Posterior mean and central 95% credible interval for one parameter."""

    name: str
    mean: float
    lower: float
    upper: float

    @property
    def excludes_zero(self) -> bool:
        return self.lower > 0.0 or self.upper < 0.0


def summarize(store: DrawStore) -> list[Summary]:
    """Pooled posterior mean and 2.5/97.5 percentiles for every parameter."""
    out = []
    for name in store.names:
        draws = store.pooled(name)
        lower, upper = np.quantile(draws, [0.025, 0.975])
        out.append(Summary(name=name, mean=float(draws.mean()), lower=float(lower), upper=float(upper)))
    return out


def psrf(chains: Sequence[np.ndarray]) -> float:
    """Potential scale reduction factor from two or more equal-length chains.

    With ``m`` chains of length ``s``, ``B = m * var(chain means)`` and ``W``
    the mean of the per-chain sample variances (both with denominator
    ``m - 1`` resp. ``s - 1``); the factor is
    ``sqrt(((m - 1)/m * W + B/m) / W)``.
    """
    arrays = [np.asarray(c, dtype=float).ravel() for c in chains]
    if len(arrays) < 2:
        raise InsufficientDraws(f"need at least two chains, got {len(arrays)}")
    s = arrays[0].size
    if s < 2:
        raise InsufficientDraws("chains must have at least two draws")
    if any(a.size != s for a in arrays):
        raise DomainError("chains must have equal length")
    if any(not np.all(np.isfinite(a)) for a in arrays):
        raise DomainError("chains must be finite")
    m = len(arrays)
    means = np.array([a.mean() for a in arrays])
    B = float(s * np.var(means, ddof=1))
    W = float(np.mean([np.var(a, ddof=1) for a in arrays]))
    if W <= 0.0:
        raise DomainError("within-chain variance is zero; the factor is undefined")
    var_plus = (s - 1) / s * W + B / s
    return float(np.sqrt(var_plus / W))


def psrf_all(store: DrawStore) -> Mapping[str, float]:
    """PSRF per parameter name for a multi-chain draw store."""
    return {name: psrf(store.per_chain(name)) for name in store.names}


def batch_means_se(x: np.ndarray, n_batches: int = 100) -> float:
    """Monte Carlo standard error of the mean of a correlated series.

    Splits the series into ``n_batches`` contiguous batches (discarding a
    remainder shorter than a batch) and uses the variance of batch means.
    """
    x = np.asarray(x, dtype=float).ravel()
    if n_batches < 2:
        raise DomainError(f"need at least two batches, got {n_batches}")
    batch = x.size // n_batches
    if batch < 1:
        raise InsufficientDraws(f"{x.size} draws cannot fill {n_batches} batches")
    trimmed = x[: batch * n_batches].reshape(n_batches, batch)
    means = trimmed.mean(axis=1)
    return float(np.sqrt(np.var(means, ddof=1) / n_batches))


@dataclass(frozen=True)
class ReplicationMetrics:
    """Monte Carlo performance of one estimator across simulation replications."""

    bias: float
    mse: float
    coverage: float
    n_replications: int


def replication_metrics(
    means: np.ndarray, lowers: np.ndarray, uppers: np.ndarray, truth: float
) -> ReplicationMetrics:
    """Bias, mean squared error, and interval coverage against a known truth."""
    means = np.asarray(means, dtype=float).ravel()
    lowers = np.asarray(lowers, dtype=float).ravel()
    uppers = np.asarray(uppers, dtype=float).ravel()
    if means.size == 0:
        raise InsufficientDraws("no replications")
    if lowers.shape != means.shape or uppers.shape != means.shape:
        raise DomainError("means, lowers, and uppers must have one entry per replication")
    err = means - truth
    covered = (lowers <= truth) & (truth <= uppers)
    return ReplicationMetrics(
        bias=float(err.mean()),
        mse=float(np.mean(err * err)),
        coverage=float(covered.mean()),
        n_replications=means.size,
    )
