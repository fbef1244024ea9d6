"""Show what outcome misclassification does, and what the adjustment recovers.

One dataset is simulated with flip rates (0.15, 0.05): 15% of true successes
are recorded as failures and 5% of true failures as successes.  The plain
sampler treats the recorded outcome as the truth and attenuates every
coefficient toward zero; the misclassification sampler augments the true
outcome and draws the flip rates from Beta priors.

The flip rates are weakly identified from a single binary outcome, so the
adjustment leans on informative priors.  Here the priors are elicited from
100 pseudo-observations at the generative rates, the favorable case.  Run
with looser priors (smaller ``n_pess``) to watch the intervals widen.
"""

import numpy as np

from bqr.diagnostics import summarize
from bqr.gibbs import ChainConfig, run_chains, run_naive_chain
from bqr.misclass import run_misclass_chain
from bqr.model import MisclassPrior, NaivePrior
from bqr.rng import RngStream
from bqr.simulate import ScenarioSpec, elicit_priors, generate_dataset


def main():
    beta_true = (0.0, 1.0, -0.5)
    d01, d10 = 0.15, 0.05
    spec = ScenarioSpec(
        n=2_000, beta_true=beta_true, p=0.5,
        delta01_true=d01, delta10_true=d10,
        n_pess=100, B0_scale=10.0, replications=1,
    )
    data = generate_dataset(spec, RngStream(19))
    flipped = int(np.sum(data.y_obs != data.y_true))
    print(f"n = {data.n}, true flip rates ({d01}, {d10}); "
          f"{flipped} of {data.n} recorded outcomes are wrong")

    config = ChainConfig(p=0.5, iterations=4_000, burn_in=1_500, overdispersed_init=True)

    naive_store = run_chains(
        run_naive_chain, data, NaivePrior.isotropic(data.k, 10.0),
        config, RngStream(20), n_chains=2,
    )

    elicited = elicit_priors(spec.n_pess, d01, d10, RngStream(21))
    prior = MisclassPrior.isotropic(data.k, 10.0, kappa=elicited.kappa)
    k = tuple(round(v, 1) for v in elicited.kappa)
    print(f"flip-rate priors from {spec.n_pess} pseudo-observations: "
          f"delta01 ~ Beta({k[0]}, {k[1]}), delta10 ~ Beta({k[2]}, {k[3]})")
    mis_store = run_chains(run_misclass_chain, data, prior, config, RngStream(22), n_chains=2)

    print(f"\n  {'':12s} {'truth':>7s}   {'ignored':>22s}   {'adjusted':>22s}")
    mis_by_name = {s.name: s for s in summarize(mis_store)}
    for s, truth in zip(summarize(naive_store), beta_true):
        m = mis_by_name[s.name]
        print(f"  {s.name:12s} {truth:7.2f}   {s.mean:7.3f} [{s.lower:5.2f}, {s.upper:5.2f}]"
              f"   {m.mean:7.3f} [{m.lower:5.2f}, {m.upper:5.2f}]")
    for name, truth in (("delta01", d01), ("delta10", d10)):
        m = mis_by_name[name]
        print(f"  {name:12s} {truth:7.2f}   {'(assumed 0)':>22s}"
              f"   {m.mean:7.3f} [{m.lower:5.2f}, {m.upper:5.2f}]")

    slope = summarize(naive_store)[1].mean
    print(f"\nIgnoring contamination attenuates the slope to {slope:.2f} (truth 1.0);")
    print("the adjusted model trades that bias for wider, honest intervals.")


if __name__ == "__main__":
    main()
