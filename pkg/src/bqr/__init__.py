"""Bayesian binary quantile regression with optional outcome misclassification."""

from .cli import FitConfig, SimulateConfig, config_hash, main, run_command
from .dataio import ingest_csv, read_draws, standardize, write_draws, write_summary
from .diagnostics import (
    ReplicationMetrics,
    Summary,
    batch_means_se,
    psrf,
    psrf_all,
    replication_metrics,
    summarize,
)
from .distributions import (
    QuantileSpec,
    al_cdf,
    al_constants,
    al_logcdf,
    al_logsf,
    al_ppf,
    al_sample,
    gig_half_sample,
    sample_mvn_precision,
    trunc_normal_lower_std,
    trunc_normal_sample,
)
from .gibbs import ChainConfig, run_chains, run_naive_chain
from .misclass import run_misclass_chain
from .model import (
    DEFAULT_KAPPA,
    ChainState,
    Dataset,
    DrawStore,
    MisclassPrior,
    NaivePrior,
    latent_y_prob,
    observed_loglik,
    success_prob,
)
from .rng import RngStream
from .simulate import (
    ElicitedPriors,
    McmcSchedule,
    ScenarioSpec,
    build_grid,
    elicit_priors,
    generate_dataset,
    run_grid,
)
from .standin import make_survey_standin, write_survey_standin
from .validation import GewekeResult, geweke_misclass, geweke_naive

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "RngStream",
    "QuantileSpec",
    "al_constants",
    "al_cdf",
    "al_logcdf",
    "al_logsf",
    "al_ppf",
    "al_sample",
    "gig_half_sample",
    "trunc_normal_lower_std",
    "trunc_normal_sample",
    "sample_mvn_precision",
    "Dataset",
    "NaivePrior",
    "MisclassPrior",
    "DEFAULT_KAPPA",
    "ChainState",
    "DrawStore",
    "success_prob",
    "observed_loglik",
    "latent_y_prob",
    "ChainConfig",
    "run_naive_chain",
    "run_misclass_chain",
    "run_chains",
    "Summary",
    "summarize",
    "psrf",
    "psrf_all",
    "batch_means_se",
    "ReplicationMetrics",
    "replication_metrics",
    "GewekeResult",
    "geweke_naive",
    "geweke_misclass",
    "ScenarioSpec",
    "ElicitedPriors",
    "McmcSchedule",
    "elicit_priors",
    "generate_dataset",
    "build_grid",
    "run_grid",
    "ingest_csv",
    "standardize",
    "write_draws",
    "read_draws",
    "write_summary",
    "make_survey_standin",
    "write_survey_standin",
    "FitConfig",
    "SimulateConfig",
    "config_hash",
    "run_command",
    "main",
]
