"""Synthetic stand-in for the restricted survey extract.

The original application data cannot be redistributed, so the package
bundles a generated look-alike with the same schema and headline
marginals: n = 20,115 rows, a binary outcome with 17% prevalence, and
respondent age averaging 32.38 years.  The remaining columns are matched
in mean and spread to the published descriptive table via simple
parametric families (clipped rounded normals, Poisson counts, Bernoulli
indicators).

The outcome is generated from the package's own data model so that a fit
on the stand-in exercises the full pipeline: a median latent regression
on the standardized continuous covariates plus raw indicators, with the
true labels then flipped at rates (delta01, delta10) = (0.3, 0.01).  The
large false-negative rate and tiny false-positive rate give a fit with
the bundled default misclassification priors a sharp posterior ordering
E(delta01) >> E(delta10).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from .distributions import al_sample
from .exceptions import DomainError
from .model import success_prob
from .rng import RngStream

__all__ = [
    "STANDIN_COLUMNS",
    "STANDIN_CONTINUOUS",
    "DEFAULT_STANDIN_SEED",
    "make_survey_standin",
    "write_survey_standin",
]

STANDIN_COLUMNS = (
    "vio",
    "fage",
    "fwork",
    "meduc",
    "wealth",
    "nchildren",
    "remarriage",
    "polyg",
    "nwomen",
)

STANDIN_CONTINUOUS = ("fage", "meduc", "wealth", "nchildren", "nwomen")

DEFAULT_STANDIN_SEED = 20_127
_N_ROWS = 20_115

_TARGET_PREVALENCE = 0.17
_TRUE_DELTA01 = 0.3
_TRUE_DELTA10 = 0.01

# Effects on the latent scale (standardized continuous covariates,
# raw 0/1 indicators); the intercept is solved for the target prevalence.
# Effects are sized so the latent success probability spans a wide range,
# which keeps the flip rates well identified by the likelihood.
_LATENT_EFFECTS = {
    "fage": 0.60,
    "fwork": 0.90,
    "meduc": -0.60,
    "wealth": -1.80,
    "nchildren": 1.20,
    "remarriage": 1.50,
    "polyg": 1.20,
    "nwomen": 0.60,
}


def _discrete_normal(
    z: np.ndarray, mean: float, sd: float, lo: int, hi: int
) -> np.ndarray:
    """Rounded, clipped normal with sample moments pulled onto (mean, sd).

    Rounding and clipping bias the raw moments, so the location/scale are
    recalibrated against the realized draws by fixed-point iteration.
    """
    mu, sigma = mean, sd
    x = np.rint(mu + sigma * z)
    for _ in range(25):
        x = np.clip(np.rint(mu + sigma * z), lo, hi)
        mu += mean - x.mean()
        s = x.std(ddof=1)
        if s > 0.0:
            sigma *= sd / s
    return x.astype(np.int64)


def _continuous_normal(z: np.ndarray, mean: float, sd: float) -> np.ndarray:
    """Normal draws rescaled so the sample mean/sd match exactly."""
    return mean + sd * (z - z.mean()) / z.std(ddof=1)


def _intercept_for_prevalence(eta: np.ndarray, p: float) -> float:
    """Solve for c so the average observed-success probability hits target.

    The observed prevalence under the flip model is
    delta10 + (1 - delta01 - delta10) * mean(psi(c + eta)), monotone in c,
    so plain bisection applies.
    """

    def observed(c: float) -> float:
        psi = success_prob(
            np.column_stack([np.ones_like(eta), eta]), np.array([c, 1.0]), p
        )
        return _TRUE_DELTA10 + (1.0 - _TRUE_DELTA01 - _TRUE_DELTA10) * psi.mean()

    lo, hi = -50.0, 50.0
    if not observed(lo) < _TARGET_PREVALENCE < observed(hi):
        raise DomainError("target prevalence unreachable for this design")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if observed(mid) < _TARGET_PREVALENCE:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def make_survey_standin(seed: int = DEFAULT_STANDIN_SEED, n: int = _N_ROWS) -> pd.DataFrame:
    """Generate the stand-in survey table (deterministic in ``seed``)."""
    if n < 2:
        raise DomainError(f"stand-in table needs at least 2 rows, got {n}")
    root = RngStream(seed)
    fage = _discrete_normal(root.child(0).std_normal(n), 32.38, 7.71, 15, 49)
    fwork = root.child(1).bernoulli(np.full(n, 0.28))
    meduc = _discrete_normal(root.child(2).std_normal(n), 9.23, 5.10, 0, 20)
    wealth = _continuous_normal(root.child(3).std_normal(n), 0.71, 0.83)
    nchildren = root.child(4).gen.poisson(2.2, n).astype(np.int64)
    remarriage = root.child(5).bernoulli(np.full(n, 0.02))
    polyg = root.child(6).bernoulli(np.full(n, 0.01))
    nwomen = 1 + root.child(7).gen.poisson(0.59, n).astype(np.int64)

    raw = {
        "fage": fage,
        "fwork": fwork,
        "meduc": meduc,
        "wealth": wealth,
        "nchildren": nchildren,
        "remarriage": remarriage,
        "polyg": polyg,
        "nwomen": nwomen,
    }
    eta = np.zeros(n)
    for name, effect in _LATENT_EFFECTS.items():
        col = raw[name].astype(float)
        if name in STANDIN_CONTINUOUS:
            col = (col - col.mean()) / col.std(ddof=1)
        eta += effect * col

    p = 0.5
    intercept = _intercept_for_prevalence(eta, p)
    z = intercept + eta + al_sample(p, root.child(8), n)
    y_true = (z > 0).astype(np.int64)
    uflip = root.child(9).uniform(n)
    vio = np.where(y_true == 1, uflip < 1.0 - _TRUE_DELTA01, uflip < _TRUE_DELTA10)

    frame = pd.DataFrame({"vio": vio.astype(np.int64), **raw})
    return frame[list(STANDIN_COLUMNS)]


def write_survey_standin(path: str | Path, seed: int = DEFAULT_STANDIN_SEED) -> Path:
    """Write the stand-in table to ``path`` as CSV and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = make_survey_standin(seed)
    frame.to_csv(path, index=False, float_format=None)
    return path
