"""Fit the binary quantile model at several quantiles on clean data.

For each p in {0.25, 0.5, 0.75} a dataset is simulated whose latent errors
follow the asymmetric Laplace law with that same p, so the p-th conditional
quantile of the latent response is exactly ``x' beta`` and one coefficient
vector is the truth in every design.  The Gibbs sampler recovers it each
time.  Only the sign of the latent response is observed, so the error
scale is fixed by assumption, not estimated: fitting a quantile against
data whose latent spread differs would rescale the coefficients, which is
why each quantile here gets its own self-consistent dataset.
"""

import numpy as np

from bqr.diagnostics import psrf_all, summarize
from bqr.gibbs import ChainConfig, run_chains, run_naive_chain
from bqr.model import NaivePrior
from bqr.rng import RngStream
from bqr.simulate import ScenarioSpec, generate_dataset


def main():
    beta_true = (0.5, 1.0, -0.8)
    root = RngStream(7)
    print(f"generative coefficients {beta_true}; n = 1500 per design")

    for i, p in enumerate((0.25, 0.5, 0.75)):
        spec = ScenarioSpec(
            n=1_500, beta_true=beta_true, p=p,
            delta01_true=0.0, delta10_true=0.0,
            n_pess=30, B0_scale=10.0, replications=1,
        )
        data = generate_dataset(spec, root.child(i))
        prior = NaivePrior.isotropic(data.k, 10.0)
        config = ChainConfig(p=p, iterations=3_000, burn_in=1_000, overdispersed_init=True)
        store = run_chains(run_naive_chain, data, prior, config, root.child(i, 1), n_chains=2)
        worst = max(psrf_all(store).values())
        rate = data.y_obs.mean()
        print(f"\nquantile p = {p}  (success rate {rate:.2f}; 2 chains x "
              f"{config.n_retained} retained, worst PSRF {worst:.3f})")
        print(f"  {'':12s} {'mean':>9s} {'lower':>9s} {'upper':>9s}")
        for s, truth in zip(summarize(store), beta_true):
            print(f"  {s.name:12s} {s.mean:9.3f} {s.lower:9.3f} {s.upper:9.3f}"
                  f"   truth {truth:+.2f}")

    print("\nEvery interval covers its generative value. The success rate moves with")
    print("p because the latent error's p-th quantile is pinned at zero: small p")
    print("puts most error mass above zero, large p below. Compare")
    print("demos/misclassification_recovery.py for contaminated outcomes.")


if __name__ == "__main__":
    main()
