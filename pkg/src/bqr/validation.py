"""Joint-distribution tests of the samplers (Geweke's getting-it-right check).

Two simulators target the same joint law of parameters, latents, and data:

* the marginal-conditional simulator draws everything independently from
  the generative model, giving iid samples whose statistics are exact up to
  Monte Carlo error;
* the successive-conditional simulator alternates one regeneration of the
  data given the current parameters with one sweep of the posterior
  sampler under test, so its stationary distribution matches the joint law
  only if every conditional update is correct.

Matching moments between the two (z-scores of mean differences) is a sharp
end-to-end test: a wrong density, a dropped Jacobian, or a stale
conditional shows up as a drifting statistic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import batch_means_se
from .distributions import al_constants
from .exceptions import DomainError
from .gibbs import update_beta, update_w, update_z
from .misclass import update_deltas, update_y, update_z_marginal
from .model import ChainState, Dataset, MisclassPrior, NaivePrior
from .rng import RngStream

__all__ = ["GewekeResult", "geweke_naive", "geweke_misclass"]


@dataclass(frozen=True)
class GewekeResult:
    """Per-statistic comparison of the two simulators."""

    names: tuple[str, ...]
    mc_mean: np.ndarray
    sc_mean: np.ndarray
    mc_se: np.ndarray
    sc_se: np.ndarray
    z_scores: np.ndarray
    draws: int

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z_scores)))

    def table(self) -> str:
        rows = [f"{'statistic':<14} {'mc_mean':>12} {'sc_mean':>12} {'z':>8}"]
        for i, name in enumerate(self.names):
            rows.append(
                f"{name:<14} {self.mc_mean[i]:>12.6f} {self.sc_mean[i]:>12.6f} {self.z_scores[i]:>8.2f}"
            )
        return "\n".join(rows)


def _design(n: int, k: int, rng: RngStream) -> np.ndarray:
    if n < 2 or k < 1:
        raise DomainError(f"need n >= 2 and k >= 1, got n={n}, k={k}")
    X = np.ones((n, k))
    if k > 1:
        X[:, 1:] = rng.std_normal((n, k - 1))
    return X


def _compare(
    names: tuple[str, ...], stats_mc: np.ndarray, stats_sc: np.ndarray, n_batches: int
) -> GewekeResult:
    mc_mean = stats_mc.mean(axis=0)
    sc_mean = stats_sc.mean(axis=0)
    draws = stats_mc.shape[0]
    mc_se = stats_mc.std(axis=0, ddof=1) / np.sqrt(draws)
    sc_se = np.array([batch_means_se(stats_sc[:, j], n_batches) for j in range(len(names))])
    denom = np.sqrt(mc_se * mc_se + sc_se * sc_se)
    diff = mc_mean - sc_mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(denom > 0.0, diff / denom, np.where(diff == 0.0, 0.0, np.inf))
    return GewekeResult(
        names=names,
        mc_mean=mc_mean,
        sc_mean=sc_mean,
        mc_se=mc_se,
        sc_se=sc_se,
        z_scores=z,
        draws=draws,
    )


def _beta_names(k: int) -> list[str]:
    base = [f"beta{j + 1}" for j in range(k)]
    return base + [f"{b}_sq" for b in base]


def _naive_stats(beta: np.ndarray, w: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.concatenate([beta, beta * beta, [w.mean(), y.mean()]])


def geweke_naive(
    p: float,
    *,
    n: int = 20,
    k: int = 2,
    draws: int = 50_000,
    seed: int = 20_260_401,
    b0_scale: float = 1.0,
    n_batches: int = 100,
) -> GewekeResult:
    """Joint-distribution test of the sampler without misclassification.

    Statistics tracked: each coefficient and its square, the mean mixing
    weight, and the success fraction.
    """
    spec = al_constants(p)
    root = RngStream(seed)
    X = _design(n, k, root.child(0))
    prior = NaivePrior.isotropic(k, b0_scale)
    data = Dataset(X, np.zeros(n, dtype=np.int64), tuple(f"x{j + 1}" for j in range(k)))
    names = tuple(_beta_names(k) + ["mean_w", "frac_y"])
    scale = float(np.sqrt(b0_scale))

    def joint(stream: RngStream):
        # One exact draw from the generative law (isotropic prior).
        beta = prior.beta0 + scale * stream.std_normal(k)
        w = stream.gen.exponential(1.0, n)
        z = X @ beta + spec.theta * w + spec.tau * np.sqrt(w) * stream.std_normal(n)
        return beta, w, z, (z > 0.0).astype(np.int64)

    mc = root.child(1)
    stats_mc = np.empty((draws, len(names)))
    for s in range(draws):
        beta, w, _, y = joint(mc)
        stats_mc[s] = _naive_stats(beta, w, y)

    sc = root.child(2)
    beta, w, z, y = joint(sc)
    state = ChainState(beta=beta, w=w, z=z)
    stats_sc = np.empty((draws, len(names)))
    for s in range(draws):
        # Regenerate the data given (beta, w): fresh unrestricted latent
        # utilities and their signs.
        state.z = X @ state.beta + spec.theta * state.w + spec.tau * np.sqrt(state.w) * sc.std_normal(n)
        y = (state.z > 0.0).astype(np.int64)
        # One posterior sweep conditioned on the new outcomes.
        update_z(state, data, spec, sc, y)
        update_beta(state, data, prior, spec, sc)
        update_w(state, data, spec, sc)
        stats_sc[s] = _naive_stats(state.beta, state.w, y)

    return _compare(names, stats_mc, stats_sc, n_batches)


def _mis_stats(
    beta: np.ndarray,
    w: np.ndarray,
    y: np.ndarray,
    y_obs: np.ndarray,
    d01: float,
    d10: float,
) -> np.ndarray:
    return np.concatenate(
        [
            beta,
            beta * beta,
            [d01, d10, d01 * d01, d10 * d10, w.mean(), y.mean(), y_obs.mean()],
        ]
    )


def geweke_misclass(
    p: float,
    *,
    n: int = 20,
    k: int = 2,
    draws: int = 50_000,
    seed: int = 20_260_402,
    b0_scale: float = 1.0,
    kappa: tuple[float, float, float, float] = (5.0, 15.0, 2.0, 18.0),
    latent_refresh: str = "marginal",
    n_batches: int = 100,
) -> GewekeResult:
    """Joint-distribution test of the misclassification-adjusted sampler.

    Statistics tracked: coefficients and squares, both flip rates and their
    squares, the mean mixing weight, and the true and recorded success
    fractions.  ``latent_refresh`` selects which latent reconciliation the
    sweep under test uses.
    """
    spec = al_constants(p)
    root = RngStream(seed)
    X = _design(n, k, root.child(0))
    prior = MisclassPrior.isotropic(k, b0_scale, kappa=kappa)
    data = Dataset(X, np.zeros(n, dtype=np.int64), tuple(f"x{j + 1}" for j in range(k)))
    names = tuple(
        _beta_names(k)
        + ["delta01", "delta10", "delta01_sq", "delta10_sq", "mean_w", "frac_y", "frac_y_obs"]
    )
    scale = float(np.sqrt(b0_scale))
    k1, k2, k3, k4 = prior.kappa

    def joint(stream: RngStream):
        beta = prior.beta0 + scale * stream.std_normal(k)
        d01 = float(stream.gen.beta(k1, k2))
        d10 = float(stream.gen.beta(k3, k4))
        w = stream.gen.exponential(1.0, n)
        z = X @ beta + spec.theta * w + spec.tau * np.sqrt(w) * stream.std_normal(n)
        y = (z > 0.0).astype(np.int64)
        u = stream.gen.random(n)
        y_obs = np.where(y == 1, u < 1.0 - d01, u < d10).astype(np.int64)
        return beta, d01, d10, w, z, y, y_obs

    mc = root.child(1)
    stats_mc = np.empty((draws, len(names)))
    for s in range(draws):
        beta, d01, d10, w, _, y, y_obs = joint(mc)
        stats_mc[s] = _mis_stats(beta, w, y, y_obs, d01, d10)

    sc = root.child(2)
    beta, d01, d10, w, z, y, y_obs = joint(sc)
    state = ChainState(beta=beta, w=w, z=z, y=y, delta01=d01, delta10=d10)
    data.y_obs = y_obs
    stats_sc = np.empty((draws, len(names)))
    for s in range(draws):
        # Regenerate the record given the current truth and flip rates.
        u = sc.gen.random(n)
        data.y_obs = np.where(state.y == 1, u < 1.0 - state.delta01, u < state.delta10).astype(
            np.int64
        )
        # One posterior sweep conditioned on the new record.
        update_beta(state, data, prior, spec, sc)
        update_w(state, data, spec, sc)
        update_deltas(state, data, prior, sc)
        update_y(state, data, spec, sc)
        if latent_refresh == "marginal":
            update_z_marginal(state, data, spec, sc)
            update_w(state, data, spec, sc)
        elif latent_refresh == "conditional":
            update_z(state, data, spec, sc, state.y)
        else:
            raise DomainError(f"unknown latent_refresh {latent_refresh!r}")
        stats_sc[s] = _mis_stats(
            state.beta, state.w, state.y, data.y_obs, state.delta01, state.delta10
        )

    return _compare(names, stats_mc, stats_sc, n_batches)
