"""Drive the command-line pipeline on the bundled synthetic survey.

Writes a JSON config, runs ``bqr fit`` as a subprocess on
``data/survey_standin.csv`` (20,115 rows, nine columns), then runs
``bqr psrf`` and ``bqr summarize`` on the draws file it produced.  The
chains here are shortened to keep the demo under a minute, short enough
that the convergence diagnostic visibly objects; the acceptance suite
runs the full 15,000-iteration protocol on the same file and passes it.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data" / "survey_standin.csv"


def run(argv):
    print(f"\n$ {' '.join(argv)}")
    result = subprocess.run(
        [sys.executable, "-m", "bqr", *argv], capture_output=True, text=True
    )
    if result.stderr:
        print(result.stderr.rstrip())
    if result.stdout:
        print(result.stdout.rstrip())
    result.check_returncode()


def main():
    out_dir = Path(tempfile.mkdtemp(prefix="bqr_survey_"))
    config = {
        "input": str(DATA),
        "outcome": "vio",
        "covariates": ["fage", "fwork", "meduc", "wealth",
                       "nchildren", "remarriage", "polyg", "nwomen"],
        "continuous": ["fage", "meduc", "wealth", "nchildren", "nwomen"],
        "model": "misclass",
        "quantiles": [0.5],
        "chains": 2,
        "iterations": 3_000,
        "burn_in": 1_000,
        "seed": 424242,
        "out_dir": str(out_dir),
    }
    config_path = out_dir / "fit.json"
    config_path.write_text(json.dumps(config, indent=2))
    print(f"config written to {config_path}")
    print("(no kappa given, so the fit warns and uses the documented default prior)")

    run(["fit", "--config", str(config_path)])
    draws = out_dir / "draws_misclass_p0.5.csv"
    run(["psrf", "--draws", str(draws)])
    run(["summarize", "--draws", str(draws)])

    print("\nThe delta01 row sits far above delta10: recorded failures hide true")
    print("successes at a much higher rate than the reverse. Continuous covariates")
    print("were standardized, so their coefficients are per standard deviation.")
    print("\nNote the psrf output: several values sit well above 1.1, which is the")
    print("diagnostic doing its job on chains this short. The full-length protocol")
    print("(15,000 iterations, 5,000 burn-in, same seed) brings every coefficient")
    print("under 1.1; the acceptance suite runs it.")


if __name__ == "__main__":
    main()
