"""Run a small replication study over a grid of contamination scenarios.

Builds a 2-scenario grid (mild and heavy contamination), fits both models
to a handful of replications per cell, and prints the bias / MSE / coverage
tables that ``bqr simulate`` writes as CSVs.  The settings here are sized
to finish in about a minute; the command-line tool runs the same machinery
at full scale.
"""

import pandas as pd

from bqr.simulate import McmcSchedule, build_grid, run_grid


def main():
    grid = build_grid(
        delta_pairs=[(0.05, 0.02), (0.30, 0.10)],
        quantiles=[0.5],
        n=500,
        beta_true=(0.0, 1.0, -0.5),
        replications=4,
    )
    schedule = McmcSchedule(iterations=1_500, burn_in=500, thin=1, n_chains=2)
    print(f"{len(grid)} scenarios x {grid[0].replications} replications, "
          f"{schedule.n_chains} chains of {schedule.iterations} each; this takes a minute")

    tables = run_grid(grid, schedule, master_seed=99)

    pd.set_option("display.width", 120)
    for metric in ("bias", "mse", "coverage"):
        frame = tables[metric]
        cols = ["delta01", "delta10", "model", "parameter", "value"]
        print(f"\n=== {metric} ===")
        print(frame[cols].to_string(index=False))

    print("\nAt 4 replications these numbers are noisy; they illustrate the layout,")
    print("not the conclusions. The beta2 rows show the pattern of interest: the")
    print("unadjusted slope degrades as the flip rates grow.")


if __name__ == "__main__":
    main()
