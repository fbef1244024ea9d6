"""Model objects: datasets, priors, chain state, and stored draws.

The regression model is ``z_i = x_i' beta + eps_i`` with AL(0, 1, p) errors
and observed sign ``y_i = 1{z_i > 0}``, so ``P(y_i = 1) = 1 - F_AL(-x_i'
beta)``.  Under misclassification the recorded outcome flips with
probability ``delta01`` (recorded 0, truth 1) or ``delta10`` (recorded 1,
truth 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import cho_solve

from .distributions import al_cdf, al_logcdf, al_logsf
from .exceptions import DomainError, EmptyDraws, NonFinite
from .linalg import chol_factor

__all__ = [
    "Dataset",
    "NaivePrior",
    "MisclassPrior",
    "ChainState",
    "DrawStore",
    "success_prob",
    "observed_loglik",
    "latent_y_prob",
]

DEFAULT_KAPPA = (7.6, 5.0, 9.7, 165.7)


@dataclass
class Dataset:
    """Design matrix plus recorded binary outcomes.

    ``X`` is ``(n, k)`` with an explicit leading intercept column of ones;
    ``y_obs`` holds the recorded outcomes in {0, 1}.  ``y_true`` is kept
    only by simulation code that knows the uncorrupted outcomes.
    """

    X: np.ndarray
    y_obs: np.ndarray
    column_names: tuple[str, ...]
    y_true: np.ndarray | None = None

    def __post_init__(self) -> None:
        X = np.ascontiguousarray(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y_obs)
        if X.ndim != 2:
            raise DomainError(f"design matrix must be 2-d, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise DomainError("design matrix must be finite")
        if y.shape != (X.shape[0],):
            raise DomainError(f"outcome length {y.shape} does not match {X.shape[0]} rows")
        if not np.isin(y, (0, 1)).all():
            raise DomainError("outcomes must be coded 0/1")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != X.shape[1]:
            raise DomainError(f"{len(names)} column names for {X.shape[1]} columns")
        if len(set(names)) != len(names):
            raise DomainError("column names must be unique")
        if X.shape[0] > 0 and not np.all(X[:, 0] == 1.0):
            raise DomainError("first design column must be an intercept of ones")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y_obs", y.astype(np.int64))
        object.__setattr__(self, "column_names", names)
        if self.y_true is not None:
            yt = np.asarray(self.y_true)
            if yt.shape != y.shape or not np.isin(yt, (0, 1)).all():
                raise DomainError("y_true must be 0/1 and match y_obs in length")
            object.__setattr__(self, "y_true", yt.astype(np.int64))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]


@dataclass
class NaivePrior:
    """Gaussian prior ``beta ~ N(beta0, B0)`` for the regression block."""

    beta0: np.ndarray
    B0: np.ndarray

    def __post_init__(self) -> None:
        beta0 = np.asarray(self.beta0, dtype=float)
        B0 = np.asarray(self.B0, dtype=float)
        if beta0.ndim != 1:
            raise DomainError(f"prior mean must be a vector, got shape {beta0.shape}")
        if not np.all(np.isfinite(beta0)):
            raise DomainError("prior mean must be finite")
        if B0.shape != (beta0.size, beta0.size):
            raise DomainError(f"prior covariance shape {B0.shape} does not match mean length {beta0.size}")
        chol_factor(B0)  # validates symmetric positive definite
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "B0", B0)

    @cached_property
    def precision(self) -> np.ndarray:
        L = chol_factor(self.B0)
        return cho_solve((L, True), np.eye(self.beta0.size))

    @cached_property
    def precision_mean(self) -> np.ndarray:
        L = chol_factor(self.B0)
        return cho_solve((L, True), self.beta0)

    @property
    def k(self) -> int:
        return self.beta0.size

    @classmethod
    def isotropic(cls, k: int, scale: float, beta0: np.ndarray | None = None) -> "NaivePrior":
        """N(beta0, scale * I_k) with a zero mean by default."""
        if k < 1:
            raise DomainError(f"dimension must be positive, got {k}")
        if not np.isfinite(scale) or scale <= 0.0:
            raise DomainError(f"prior scale must be positive, got {scale}")
        mean = np.zeros(k) if beta0 is None else np.asarray(beta0, dtype=float)
        return cls(beta0=mean, B0=scale * np.eye(k))


@dataclass
class MisclassPrior(NaivePrior):
    """Adds independent Beta priors on the two misclassification rates.

    ``kappa = (k1, k2, k3, k4)`` gives ``delta01 ~ Beta(k1, k2)`` and
    ``delta10 ~ Beta(k3, k4)``.  With ``identifiability_rejection`` the
    conditional draws are rejected until ``delta01 + delta10 < 1``.
    """

    kappa: tuple[float, float, float, float] = DEFAULT_KAPPA
    identifiability_rejection: bool = False

    def __post_init__(self) -> None:
        super().__post_init__()
        kappa = tuple(float(v) for v in self.kappa)
        if len(kappa) != 4:
            raise DomainError(f"kappa must have four entries, got {len(kappa)}")
        if any(not np.isfinite(v) or v <= 0.0 for v in kappa):
            raise DomainError(f"kappa entries must be positive and finite, got {kappa}")
        object.__setattr__(self, "kappa", kappa)

    @classmethod
    def isotropic(
        cls,
        k: int,
        scale: float,
        beta0: np.ndarray | None = None,
        kappa: Sequence[float] = DEFAULT_KAPPA,
        identifiability_rejection: bool = False,
    ) -> "MisclassPrior":
        base = NaivePrior.isotropic(k, scale, beta0)
        return cls(
            beta0=base.beta0,
            B0=base.B0,
            kappa=tuple(kappa),
            identifiability_rejection=identifiability_rejection,
        )


@dataclass
class ChainState:
    """Mutable Markov-chain state; misclassification fields stay None for the naive model."""

    beta: np.ndarray
    w: np.ndarray
    z: np.ndarray
    y: np.ndarray | None = None
    delta01: float | None = None
    delta10: float | None = None


class DrawStore:
    """Retained posterior draws for one or more chains of equal layout.

    Each chain is a ``(retained, n_params)`` float array; ``names`` labels
    the parameter columns.  ``total_iterations``, ``burn_in`` and ``thin``
    record the schedule that produced the retained rows.
    """

    __slots__ = ("names", "chains", "total_iterations", "burn_in", "thin")

    def __init__(
        self,
        names: Sequence[str],
        chains: Sequence[np.ndarray],
        total_iterations: int,
        burn_in: int,
        thin: int = 1,
    ) -> None:
        names = tuple(str(v) for v in names)
        if len(set(names)) != len(names):
            raise DomainError("parameter names must be unique")
        if not chains:
            raise EmptyDraws("a draw store needs at least one chain")
        if not (0 <= burn_in < total_iterations) or thin < 1:
            raise DomainError(
                f"invalid schedule: iterations={total_iterations} burn_in={burn_in} thin={thin}"
            )
        expect = len(range(burn_in, total_iterations, thin))
        arrays = []
        for idx, chain in enumerate(chains):
            arr = np.asarray(chain, dtype=float)
            if arr.ndim != 2 or arr.shape != (expect, len(names)):
                raise DomainError(
                    f"chain {idx} has shape {arr.shape}, expected ({expect}, {len(names)})"
                )
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"chain {idx} contains non-finite draws")
            arrays.append(arr)
        self.names = names
        self.chains = arrays
        self.total_iterations = int(total_iterations)
        self.burn_in = int(burn_in)
        self.thin = int(thin)

    @property
    def n_chains(self) -> int:
        return len(self.chains)

    @property
    def n_retained(self) -> int:
        return self.chains[0].shape[0]

    def per_chain(self, name: str) -> list[np.ndarray]:
        """One 1-d array of retained draws per chain for the named parameter."""
        try:
            j = self.names.index(name)
        except ValueError:
            raise DomainError(f"unknown parameter {name!r}; have {self.names}") from None
        return [chain[:, j] for chain in self.chains]

    def pooled(self, name: str) -> np.ndarray:
        """All chains' retained draws for the named parameter, concatenated."""
        return np.concatenate(self.per_chain(name))

    @classmethod
    def merge(cls, stores: Sequence["DrawStore"]) -> "DrawStore":
        """Combine single-run stores with identical layout into one multi-chain store."""
        if not stores:
            raise EmptyDraws("nothing to merge")
        first = stores[0]
        for other in stores[1:]:
            if (
                other.names != first.names
                or other.total_iterations != first.total_iterations
                or other.burn_in != first.burn_in
                or other.thin != first.thin
            ):
                raise DomainError("draw stores disagree on layout or schedule")
        chains = [chain for store in stores for chain in store.chains]
        return cls(first.names, chains, first.total_iterations, first.burn_in, first.thin)


def success_prob(X: np.ndarray, beta: np.ndarray, p: float) -> np.ndarray:
    """P(y = 1 | x) = 1 - F_AL(-x' beta) under the latent-sign model."""
    eta = np.asarray(X, dtype=float) @ np.asarray(beta, dtype=float)
    return 1.0 - al_cdf(-eta, p)


def observed_loglik(
    data: Dataset, beta: np.ndarray, delta01: float, delta10: float, p: float
) -> float:
    """Log-likelihood of the recorded outcomes with flip rates marginalized in.

    ``P(y_obs = 1) = (1 - delta01) psi + delta10 (1 - psi)`` where ``psi`` is
    the clean success probability.  Computed in log space so tiny tail
    probabilities do not underflow to an uninformative zero.
    """
    for name, v in (("delta01", delta01), ("delta10", delta10)):
        if not np.isfinite(v) or not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {v}")
    eta = data.X @ np.asarray(beta, dtype=float)
    log_psi = al_logsf(-eta, p)
    log_one_minus_psi = al_logcdf(-eta, p)
    with np.errstate(divide="ignore"):
        log_obs1 = np.logaddexp(np.log(1.0 - delta01) + log_psi, np.log(delta10) + log_one_minus_psi)
        log_obs0 = np.logaddexp(np.log(delta01) + log_psi, np.log(1.0 - delta10) + log_one_minus_psi)
    total = float(np.sum(np.where(data.y_obs == 1, log_obs1, log_obs0)))
    if not np.isfinite(total):
        raise NonFinite(
            "observed-data log-likelihood is not finite; some recorded outcome has probability 0"
        )
    return total


def latent_y_prob(
    psi: np.ndarray, delta01: float, delta10: float, y_obs: np.ndarray
) -> np.ndarray:
    """P(y = 1 | y_obs, psi, deltas) by Bayes' rule, elementwise.

    For a recorded 1 the truth stays 1 with posterior weight
    ``(1 - delta01) psi`` against ``delta10 (1 - psi)``; for a recorded 0
    the weights are ``delta01 psi`` against ``(1 - delta10)(1 - psi)``.
    """
    psi = np.asarray(psi, dtype=float)
    if np.any(psi < 0.0) or np.any(psi > 1.0) or not np.all(np.isfinite(psi)):
        raise DomainError("success probabilities must lie in [0, 1]")
    for name, v in (("delta01", delta01), ("delta10", delta10)):
        if not np.isfinite(v) or not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {v}")
    stay = np.where(y_obs == 1, (1.0 - delta01) * psi, delta01 * psi)
    other = np.where(y_obs == 1, delta10 * (1.0 - psi), (1.0 - delta10) * (1.0 - psi))
    denom = stay + other
    if np.any(denom <= 0.0):
        raise DomainError(
            "posterior truth probability is 0/0; the flip rates assign zero mass to the record"
        )
    return stay / denom
