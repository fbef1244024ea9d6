"""Gibbs sampler for binary quantile regression with misclassified outcomes.

The recorded outcome ``y_obs`` flips the true outcome ``y`` with rates
``delta01 = P(y_obs = 0 | y = 1)`` and ``delta10 = P(y_obs = 1 | y = 0)``.
The sampler extends the no-misclassification sweep with a conjugate Beta
update of the rates and a Bernoulli update of each true outcome, the latter
computed with the latent pair ``(z, w)`` integrated out so that a recorded
outcome can be overturned by the regression fit.

After the outcome update the latent pair must be reconciled with the new
outcomes.  Two refresh modes are provided:

* ``"conditional"`` redraws ``z`` from its truncated-normal conditional
  given the mixing weights carried over from earlier in the sweep.
* ``"marginal"`` redraws ``z`` from its truncated asymmetric-Laplace
  conditional with the weights integrated out, then redraws the weights
  given the new ``z``.  Together with the outcome update this forms a
  blocked draw of ``(y, z, w)`` from one joint conditional, so the sweep
  leaves the posterior exactly invariant.

The conditional mode keeps weights that were adapted to the pre-update
outcomes; where an outcome flips, those weights are stale for one sweep.
The marginal mode is the default.
"""

from __future__ import annotations

import numpy as np

from .distributions import QuantileSpec, al_cdf, al_constants, al_ppf
from .exceptions import DomainError, InvalidConfig
from .gibbs import ChainConfig, _initial_beta, update_beta, update_w, update_z
from .model import ChainState, Dataset, DrawStore, MisclassPrior, latent_y_prob, success_prob
from .rng import RngStream

__all__ = [
    "update_deltas",
    "update_y",
    "update_z_marginal",
    "run_misclass_chain",
    "DELTA_NAMES",
]

DELTA_NAMES = ("delta01", "delta10")
_REFRESH_MODES = ("marginal", "conditional")
_MAX_DELTA_REJECTIONS = 100_000


def update_deltas(state: ChainState, data: Dataset, prior: MisclassPrior, rng: RngStream) -> None:
    """Conjugate Beta draw of both flip rates from the (y, y_obs) confusion counts."""
    y = state.y
    if y is None:
        raise DomainError("state has no true-outcome vector")
    y_obs = data.y_obs
    n10 = int(np.sum((y == 1) & (y_obs == 0)))
    n11 = int(np.sum((y == 1) & (y_obs == 1)))
    n01 = int(np.sum((y == 0) & (y_obs == 1)))
    n00 = int(np.sum((y == 0) & (y_obs == 0)))
    k1, k2, k3, k4 = prior.kappa

    for attempt in range(_MAX_DELTA_REJECTIONS):
        d01 = float(rng.gen.beta(n10 + k1, n11 + k2))
        d10 = float(rng.gen.beta(n01 + k3, n00 + k4))
        if not prior.identifiability_rejection or d01 + d10 < 1.0:
            state.delta01 = d01
            state.delta10 = d10
            return
    raise RuntimeError("flip-rate rejection sampler failed to satisfy delta01 + delta10 < 1")


def update_y(state: ChainState, data: Dataset, spec: QuantileSpec, rng: RngStream) -> None:
    """Bernoulli draw of each true outcome given beta, the flip rates, and the record.

    The latent pair is integrated out: the truth enters only through
    ``psi_i = P(z_i > 0 | beta)``, so the posterior odds of ``y_i = 1``
    weigh ``psi_i`` against the recorded outcome's flip probability.
    """
    if state.delta01 is None or state.delta10 is None:
        raise DomainError("state has no flip rates")
    psi = success_prob(data.X, state.beta, spec.p)
    prob = latent_y_prob(psi, state.delta01, state.delta10, data.y_obs)
    state.y = (rng.gen.random(data.n) < prob).astype(np.int64)


def update_z_marginal(state: ChainState, data: Dataset, spec: QuantileSpec, rng: RngStream) -> None:
    """Inverse-cdf draw of z from its sign-truncated AL conditional, weights integrated out.

    Given beta alone, ``z_i = x_i' beta + e_i`` with ``e_i ~ AL(0, 1, p)``;
    conditioning on the outcome truncates ``e_i`` to ``(-x_i' beta, inf)``
    when ``y_i = 1`` and to ``(-inf, -x_i' beta]`` otherwise.  The closed
    -form AL quantile function maps a uniform into the kept piece exactly.
    """
    if state.y is None:
        raise DomainError("state has no true-outcome vector")
    eta = data.X @ state.beta
    cut = al_cdf(-eta, spec.p)
    u = rng.gen.random(data.n)
    v = np.where(state.y == 1, cut + u * (1.0 - cut), u * cut)
    # A uniform of exactly 0 or a cut indistinguishable from 1 would leave
    # the open unit interval; nudge by one ulp-scale epsilon.
    v = np.clip(v, 1e-300, 1.0 - 1e-16)
    state.z = eta + al_ppf(v, spec.p)


def run_misclass_chain(
    data: Dataset,
    prior: MisclassPrior,
    config: ChainConfig,
    rng: RngStream,
    *,
    latent_refresh: str = "marginal",
) -> DrawStore:
    """One chain of the misclassification-adjusted sampler.

    Sweep order: beta, w, flip rates, true outcomes, latent refresh.  The
    retained draws cover the regression coefficients followed by the two
    flip rates; parameter names are the design columns plus ``delta01``
    and ``delta10``.
    """
    if prior.k != data.k:
        raise InvalidConfig(f"prior dimension {prior.k} does not match design columns {data.k}")
    if latent_refresh not in _REFRESH_MODES:
        raise InvalidConfig(f"latent_refresh must be one of {_REFRESH_MODES}, got {latent_refresh!r}")
    spec = al_constants(config.p)

    k1, k2, k3, k4 = prior.kappa
    state = ChainState(
        beta=_initial_beta(prior, config, rng),
        w=np.ones(data.n),
        z=np.zeros(data.n),
        y=data.y_obs.copy(),
        delta01=float(rng.gen.beta(k1, k2)),
        delta10=float(rng.gen.beta(k3, k4)),
    )
    update_z(state, data, spec, rng, state.y)

    names = tuple(data.column_names) + DELTA_NAMES
    keep = np.zeros((config.n_retained, data.k + 2))
    kept = 0
    for it in range(config.iterations):
        update_beta(state, data, prior, spec, rng)
        update_w(state, data, spec, rng)
        update_deltas(state, data, prior, rng)
        update_y(state, data, spec, rng)
        if latent_refresh == "marginal":
            update_z_marginal(state, data, spec, rng)
            update_w(state, data, spec, rng)
        else:
            update_z(state, data, spec, rng, state.y)
        if it >= config.burn_in and (it - config.burn_in) % config.thin == 0:
            keep[kept, : data.k] = state.beta
            keep[kept, data.k] = state.delta01
            keep[kept, data.k + 1] = state.delta10
            kept += 1
    return DrawStore(names, [keep], config.iterations, config.burn_in, config.thin)
