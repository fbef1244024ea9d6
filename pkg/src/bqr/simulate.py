"""Simulation-study engine: synthetic data, elicited priors, scenario grids.

A scenario draws ``n`` covariate rows, builds latent utilities under the
AL(0, 1, p) error law at the scenario's quantile, thresholds them into true
outcomes, and corrupts the record with known flip rates.  Both samplers are
fit to every replication and their posterior means and 95% intervals are
reduced to bias, mean squared error, and coverage tables.

Reproducibility contract: every random stream is keyed by the content of
the work unit (a short hash of the relevant scenario fields plus the
replication index), never by grid position, so any subset of the grid
reproduces the full run's numbers bit for bit.  Scenarios that differ only
in the quantile share the same underlying covariates, mixing weights,
normals, and flip uniforms: one generative draw per replication, mapped
through each quantile's error constants.
"""

from __future__ import annotations

import hashlib
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .diagnostics import replication_metrics, summarize
from .exceptions import DomainError, InvalidConfig
from .gibbs import ChainConfig, _worker_count, run_chains, run_naive_chain
from .misclass import run_misclass_chain
from .model import Dataset, MisclassPrior, NaivePrior
from .rng import RngStream
from .distributions import al_constants

__all__ = [
    "ScenarioSpec",
    "ElicitedPriors",
    "McmcSchedule",
    "elicit_priors",
    "generate_dataset",
    "build_grid",
    "run_grid",
    "METRIC_NAMES",
]

METRIC_NAMES = ("mse", "bias", "coverage")
MODELS = ("naive", "misclass")
TABLE_COLUMNS = (
    "scenario",
    "delta01",
    "delta10",
    "n_pess",
    "B0_scale",
    "p",
    "model",
    "parameter",
    "value",
    "n_effective_replications",
)


@dataclass(frozen=True)
class ScenarioSpec:
    """One cell of the simulation grid."""

    n: int
    beta_true: tuple[float, ...]
    p: float
    delta01_true: float
    delta10_true: float
    n_pess: int
    B0_scale: float
    replications: int

    def __post_init__(self) -> None:
        beta = tuple(float(b) for b in self.beta_true)
        object.__setattr__(self, "beta_true", beta)
        if len(beta) < 1 or not all(np.isfinite(beta)):
            raise DomainError("beta_true must be a nonempty finite vector")
        if self.n < len(beta):
            raise DomainError(f"n={self.n} is smaller than the parameter count {len(beta)}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {self.p}")
        for name, v in (("delta01_true", self.delta01_true), ("delta10_true", self.delta10_true)):
            if not np.isfinite(v) or not 0.0 <= v < 1.0:
                raise DomainError(f"{name} must lie in [0, 1), got {v}")
        if self.n_pess < 1:
            raise DomainError(f"n_pess must be a positive integer, got {self.n_pess}")
        if not np.isfinite(self.B0_scale) or self.B0_scale <= 0.0:
            raise DomainError(f"B0_scale must be positive, got {self.B0_scale}")
        if self.replications < 1:
            raise DomainError(f"replications must be positive, got {self.replications}")

    @property
    def k(self) -> int:
        return len(self.beta_true)

    @property
    def scenario_id(self) -> str:
        return (
            f"n{self.n}_d01-{self.delta01_true:g}_d10-{self.delta10_true:g}"
            f"_npess{self.n_pess}_B0-{self.B0_scale:g}_p{self.p:g}"
        )

    @property
    def truth(self) -> Mapping[str, float]:
        out = {f"beta{j + 1}": b for j, b in enumerate(self.beta_true)}
        out["delta01"] = self.delta01_true
        out["delta10"] = self.delta10_true
        return out


@dataclass(frozen=True)
class ElicitedPriors:
    """Beta hyperparameters built from binomial pseudo-counts.

    A hypothetical validation sample of ``n_pess`` records yields ``t``
    observed flips; the rate's prior is Beta(t + 1, n_pess - t + 1), i.e.
    a uniform prior updated by the pseudo-sample.
    """

    n_pess: int
    t01: int
    t10: int

    def __post_init__(self) -> None:
        if self.n_pess < 1:
            raise DomainError(f"n_pess must be a positive integer, got {self.n_pess}")
        if not 0 <= self.t01 <= self.n_pess or not 0 <= self.t10 <= self.n_pess:
            raise DomainError(
                f"pseudo-counts must lie in [0, {self.n_pess}], got {self.t01}, {self.t10}"
            )

    @property
    def beta01(self) -> tuple[float, float]:
        return (self.t01 + 1.0, self.n_pess - self.t01 + 1.0)

    @property
    def beta10(self) -> tuple[float, float]:
        return (self.t10 + 1.0, self.n_pess - self.t10 + 1.0)

    @property
    def kappa(self) -> tuple[float, float, float, float]:
        return self.beta01 + self.beta10


@dataclass(frozen=True)
class McmcSchedule:
    """Chain schedule shared by every fit in a grid."""

    iterations: int = 4_000
    burn_in: int = 2_000
    thin: int = 1
    n_chains: int = 2

    def __post_init__(self) -> None:
        if self.n_chains < 1:
            raise InvalidConfig(f"need at least one chain, got {self.n_chains}")
        # Delegate schedule validation; p is irrelevant here.
        self.chain_config(0.5)

    def chain_config(self, p: float) -> ChainConfig:
        return ChainConfig(
            p=p,
            iterations=self.iterations,
            burn_in=self.burn_in,
            thin=self.thin,
            overdispersed_init=self.n_chains > 1,
        )


def _path_id(*parts) -> int:
    """Stable 32-bit stream key from the content of a work unit."""
    text = "|".join(repr(v) for v in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:4], "big")


def elicit_priors(
    n_pess: int, delta01_true: float, delta10_true: float, rng: RngStream
) -> ElicitedPriors:
    """Draw pseudo-counts t ~ Binomial(n_pess, delta) and convert to Beta priors.

    The resulting priors are correct on average: the prior mean
    ``(t + 1) / (n_pess + 2)`` is random with expectation
    ``(n_pess * delta + 1) / (n_pess + 2)``, close to the true rate.
    """
    if n_pess < 1:
        raise DomainError(f"n_pess must be a positive integer, got {n_pess}")
    t01 = int(rng.binomial(n_pess, delta01_true))
    t10 = int(rng.binomial(n_pess, delta10_true))
    return ElicitedPriors(n_pess=n_pess, t01=t01, t10=t10)


def generate_dataset(spec: ScenarioSpec, rng: RngStream) -> Dataset:
    """Simulate one dataset with known truth and a corrupted record.

    Draw order is fixed (covariates, mixing weights, normals, flip
    uniforms) so two scenarios differing only in the quantile consume
    identical underlying randomness and produce coupled datasets.
    """
    spec_c = al_constants(spec.p)
    n, k = spec.n, spec.k
    X = np.ones((n, k))
    if k > 1:
        X[:, 1:] = rng.std_normal((n, k - 1))
    w = rng.gen.exponential(1.0, n)
    u = rng.std_normal(n)
    uflip = rng.uniform(n)

    z = X @ np.asarray(spec.beta_true) + spec_c.theta * w + spec_c.tau * np.sqrt(w) * u
    y = (z > 0.0).astype(np.int64)
    y_obs = np.where(y == 1, uflip < 1.0 - spec.delta01_true, uflip < spec.delta10_true)
    names = ("intercept",) + tuple(f"x{j + 2}" for j in range(k - 1))
    return Dataset(X=X, y_obs=y_obs.astype(np.int64), column_names=names, y_true=y)


def build_grid(
    delta_pairs: Sequence[tuple[float, float]],
    quantiles: Sequence[float],
    n_pess_values: Sequence[int] = (30,),
    b0_scales: Sequence[float] = (10.0,),
    n: int = 1_000,
    beta_true: Sequence[float] = (0.0, 1.0, -0.5),
    replications: int = 20,
) -> list[ScenarioSpec]:
    """The full cross of the given factors, in deterministic order."""
    grid = []
    for d01, d10 in delta_pairs:
        for n_pess in n_pess_values:
            for scale in b0_scales:
                for p in quantiles:
                    grid.append(
                        ScenarioSpec(
                            n=n,
                            beta_true=tuple(beta_true),
                            p=p,
                            delta01_true=d01,
                            delta10_true=d10,
                            n_pess=n_pess,
                            B0_scale=scale,
                            replications=replications,
                        )
                    )
    if not grid:
        raise DomainError("the scenario grid is empty")
    return grid


def _cell_streams(spec: ScenarioSpec, rep: int, master_seed: int) -> dict[str, RngStream]:
    """Content-keyed child streams for one (scenario, replication) cell.

    The data stream's key omits the quantile, the pseudo-sample size, and
    the prior scale, so scenarios sharing (n, beta, flip rates) reuse one
    generative draw per replication.  The elicitation stream's key omits
    the quantile and prior scale for the same reason.
    """
    root = RngStream(master_seed)
    data_key = _path_id("data", spec.n, spec.beta_true, spec.delta01_true, spec.delta10_true)
    elicit_key = _path_id(
        "elicit", spec.delta01_true, spec.delta10_true, spec.n_pess
    )
    fit_key = _path_id(
        "fit",
        spec.n,
        spec.beta_true,
        spec.delta01_true,
        spec.delta10_true,
        spec.n_pess,
        spec.B0_scale,
        spec.p,
    )
    return {
        "data": root.child(data_key, rep),
        "elicit": root.child(elicit_key, rep),
        "fit_naive": root.child(fit_key, rep, 0),
        "fit_misclass": root.child(fit_key, rep, 1),
    }


def _run_cell(
    spec: ScenarioSpec, rep: int, schedule: McmcSchedule, master_seed: int
) -> dict[str, dict[str, tuple[float, float, float]]]:
    """Fit both models to one replication; returns {model: {parameter: (mean, lo, hi)}}."""
    streams = _cell_streams(spec, rep, master_seed)
    data = generate_dataset(spec, streams["data"])
    elicited = elicit_priors(spec.n_pess, spec.delta01_true, spec.delta10_true, streams["elicit"])
    config = schedule.chain_config(spec.p)

    naive_prior = NaivePrior.isotropic(spec.k, spec.B0_scale)
    mis_prior = MisclassPrior.isotropic(spec.k, spec.B0_scale, kappa=elicited.kappa)

    out: dict[str, dict[str, tuple[float, float, float]]] = {}
    store = run_chains(
        run_naive_chain, data, naive_prior, config, streams["fit_naive"], schedule.n_chains
    )
    out["naive"] = {
        f"beta{j + 1}": (s.mean, s.lower, s.upper) for j, s in enumerate(summarize(store))
    }
    store = run_chains(
        run_misclass_chain, data, mis_prior, config, streams["fit_misclass"], schedule.n_chains
    )
    mis: dict[str, tuple[float, float, float]] = {}
    for j, s in enumerate(summarize(store)):
        name = f"beta{j + 1}" if j < spec.k else s.name
        mis[name] = (s.mean, s.lower, s.upper)
    out["misclass"] = mis
    return out


def run_grid(
    grid: Sequence[ScenarioSpec],
    schedule: McmcSchedule,
    master_seed: int,
    max_workers: int | None = None,
) -> dict[str, pd.DataFrame]:
    """Run every (scenario, replication) cell and reduce to metric tables.

    Returns one DataFrame per metric (``mse``, ``bias``, ``coverage``) with
    a row per scenario, model, and parameter.  A replication whose fit
    raises is excluded from that scenario with a warning, and the
    ``n_effective_replications`` column records how many survived.
    Aggregation order is fixed, so results do not depend on worker timing.
    """
    if not grid:
        raise DomainError("the scenario grid is empty")
    ids = [s.scenario_id for s in grid]
    if len(set(ids)) != len(ids):
        raise DomainError("scenario ids collide; grid entries must be distinct")

    cells = [(si, rep) for si, spec in enumerate(grid) for rep in range(spec.replications)]
    workers = max_workers if max_workers is not None else _worker_count(len(cells))
    results: dict[tuple[int, int], dict] = {}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            (si, rep): pool.submit(_run_cell, grid[si], rep, schedule, master_seed)
            for si, rep in cells
        }
        for (si, rep), fut in futures.items():
            try:
                results[(si, rep)] = fut.result()
            except Exception as exc:  # noqa: BLE001 - a failed cell must not sink the grid
                warnings.warn(
                    f"replication {rep} of scenario {grid[si].scenario_id} failed: {exc!r}",
                    RuntimeWarning,
                    stacklevel=2,
                )

    tables: dict[str, list[dict]] = {m: [] for m in METRIC_NAMES}
    for si, spec in enumerate(grid):
        reps = [results[(si, r)] for r in range(spec.replications) if (si, r) in results]
        params = {
            "naive": [f"beta{j + 1}" for j in range(spec.k)],
            "misclass": [f"beta{j + 1}" for j in range(spec.k)] + ["delta01", "delta10"],
        }
        for model in MODELS:
            for param in params[model]:
                triples = [r[model][param] for r in reps]
                if triples:
                    metrics = replication_metrics(
                        np.array([t[0] for t in triples]),
                        np.array([t[1] for t in triples]),
                        np.array([t[2] for t in triples]),
                        spec.truth[param],
                    )
                    values = {
                        "mse": metrics.mse,
                        "bias": metrics.bias,
                        "coverage": metrics.coverage,
                    }
                else:
                    values = {m: float("nan") for m in METRIC_NAMES}
                for metric in METRIC_NAMES:
                    tables[metric].append(
                        {
                            "scenario": spec.scenario_id,
                            "delta01": spec.delta01_true,
                            "delta10": spec.delta10_true,
                            "n_pess": spec.n_pess,
                            "B0_scale": spec.B0_scale,
                            "p": spec.p,
                            "model": model,
                            "parameter": param,
                            "value": values[metric],
                            "n_effective_replications": len(triples),
                        }
                    )
    return {
        metric: pd.DataFrame(rows, columns=list(TABLE_COLUMNS)) for metric, rows in tables.items()
    }
