"""Command-line front end: fit, simulate, summarize, psrf.

Configuration lives in a single JSON document; a few flags (model,
quantiles, seed, output directory) override file values so one config can
drive several runs.  Every numeric printed to the terminal uses 6
significant digits; files always store full precision.  Reruns with an
identical effective config and seed write bit-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path
from typing import Sequence

from .dataio import ingest_csv, read_draws, standardize, write_draws, write_summary
from .diagnostics import psrf, psrf_all, summarize
from .exceptions import InsufficientDraws, InvalidConfig
from .gibbs import ChainConfig, run_chains, run_naive_chain
from .misclass import run_misclass_chain
from .model import DEFAULT_KAPPA, MisclassPrior, NaivePrior
from .rng import RngStream
from .simulate import McmcSchedule, _path_id, build_grid, run_grid

__all__ = ["FitConfig", "SimulateConfig", "config_hash", "run_command", "main"]

_MODELS = ("naive", "misclass")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidConfig(message)


@dataclasses.dataclass(frozen=True)
class FitConfig:
    """Everything `bqr fit` needs, as read from JSON plus flag overrides."""

    input: str
    outcome: str
    covariates: tuple[str, ...]
    continuous: tuple[str, ...] = ()
    model: str = "naive"
    quantiles: tuple[float, ...] = (0.5,)
    chains: int = 2
    iterations: int = 10_000
    burn_in: int = 5_000
    thin: int = 1
    seed: int = 0
    out_dir: str = "."
    beta0: tuple[float, ...] | None = None
    b0_scale: float = 10.0
    b0_diag: tuple[float, ...] | None = None
    kappa: tuple[float, float, float, float] | None = None
    latent_refresh: str = "marginal"
    identifiability_rejection: bool = False

    def __post_init__(self):
        _require(self.model in _MODELS, f"model must be one of {_MODELS}, got {self.model!r}")
        _require(len(self.quantiles) > 0, "at least one quantile is required")
        _require(
            all(0.0 < q < 1.0 for q in self.quantiles),
            f"quantiles must lie in (0, 1), got {self.quantiles}",
        )
        _require(len(set(self.quantiles)) == len(self.quantiles), "quantiles must be distinct")
        _require(self.chains >= 1, f"chains must be >= 1, got {self.chains}")
        _require(
            self.iterations > self.burn_in >= 0,
            f"need iterations > burn_in >= 0, got {self.iterations}, {self.burn_in}",
        )
        _require(self.thin >= 1, f"thin must be >= 1, got {self.thin}")
        _require(self.seed >= 0, f"seed must be a nonnegative integer, got {self.seed}")
        _require(
            set(self.continuous) <= set(self.covariates),
            "continuous columns must be a subset of the covariates",
        )
        _require(self.b0_scale > 0.0, f"b0_scale must be positive, got {self.b0_scale}")
        if self.kappa is not None:
            _require(
                len(self.kappa) == 4 and all(k > 0.0 for k in self.kappa),
                f"kappa must be 4 positive reals, got {self.kappa}",
            )


@dataclasses.dataclass(frozen=True)
class SimulateConfig:
    """Scenario grid settings for `bqr simulate`."""

    delta_pairs: tuple[tuple[float, float], ...]
    quantiles: tuple[float, ...] = (0.5,)
    n_pess: tuple[int, ...] = (30,)
    b0_scales: tuple[float, ...] = (10.0,)
    n: int = 1_000
    beta_true: tuple[float, ...] = (0.0, 1.0, -0.5)
    replications: int = 20
    chains: int = 2
    iterations: int = 4_000
    burn_in: int = 2_000
    thin: int = 1
    seed: int = 0
    out_dir: str = "."

    def __post_init__(self):
        _require(len(self.delta_pairs) > 0, "at least one (delta01, delta10) pair is required")
        _require(
            all(len(pair) == 2 for pair in self.delta_pairs),
            "each delta pair must have exactly two entries",
        )
        _require(self.seed >= 0, f"seed must be a nonnegative integer, got {self.seed}")


def _coerce_config(cls, raw: dict, path: Path):
    """Build a config dataclass from a JSON object, rejecting unknown keys."""
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - set(fields))
    if unknown:
        raise InvalidConfig(f"{path}: unknown config keys {unknown}; valid keys are {sorted(fields)}")
    converted = {}
    for key, value in raw.items():
        if isinstance(value, list):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        converted[key] = value
    try:
        return cls(**converted)
    except TypeError as exc:
        raise InvalidConfig(f"{path}: {exc}") from None


def _load_json(path: Path) -> dict:
    try:
        with path.open() as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InvalidConfig(f"{path}: config must be a JSON object, got {type(raw).__name__}")
    return raw


def config_hash(config) -> str:
    """Short stable digest of the effective config, for draw-file metadata.

    The output directory is excluded: it selects where files go, not what
    experiment runs, so the same experiment written to two places carries
    the same hash (and identical file bytes).
    """
    payload = dataclasses.asdict(config)
    payload.pop("out_dir", None)
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _build_prior(config: FitConfig, k: int):
    if config.b0_diag is not None:
        _require(
            len(config.b0_diag) == k and all(v > 0.0 for v in config.b0_diag),
            f"b0_diag must be {k} positive entries, got {config.b0_diag}",
        )
    if config.beta0 is not None:
        _require(len(config.beta0) == k, f"beta0 must have {k} entries, got {len(config.beta0)}")
    import numpy as np

    beta0 = None if config.beta0 is None else np.asarray(config.beta0, dtype=float)
    B0 = (
        np.diag(np.asarray(config.b0_diag, dtype=float))
        if config.b0_diag is not None
        else config.b0_scale * np.eye(k)
    )
    if config.model == "naive":
        return NaivePrior(beta0=beta0 if beta0 is not None else np.zeros(k), B0=B0)
    kappa = config.kappa
    if kappa is None:
        kappa = DEFAULT_KAPPA
        print(
            "warning: misclass model without explicit kappa; defaulting to "
            f"Beta({kappa[0]:g}, {kappa[1]:g}) for delta01 and "
            f"Beta({kappa[2]:g}, {kappa[3]:g}) for delta10",
            file=sys.stderr,
        )
    return MisclassPrior(
        beta0=beta0 if beta0 is not None else np.zeros(k),
        B0=B0,
        kappa=tuple(float(v) for v in kappa),
        identifiability_rejection=config.identifiability_rejection,
    )


def _fit_runner(config: FitConfig):
    if config.model == "naive":
        return run_naive_chain
    import functools

    return functools.partial(run_misclass_chain, latent_refresh=config.latent_refresh)


def _print_summary_table(rows) -> None:
    print(f"{'quantile':>8}  {'model':<8}  {'variable':<16} {'mean':>12} {'lower':>12} {'upper':>12}  sig")
    for p, model, s in rows:
        flag = "*" if s.excludes_zero else ""
        print(
            f"{p:>8.6g}  {model:<8}  {s.name:<16} {s.mean:>12.6g} {s.lower:>12.6g} {s.upper:>12.6g}  {flag}"
        )


def _cmd_fit(args: argparse.Namespace) -> int:
    raw = _load_json(Path(args.config))
    if args.model is not None:
        raw["model"] = args.model
    if args.quantile:
        raw["quantiles"] = list(args.quantile)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out
    config = _coerce_config(FitConfig, raw, Path(args.config))
    digest = config_hash(config)

    data, n_dropped = ingest_csv(config.input, config.outcome, list(config.covariates))
    if n_dropped:
        print(f"note: dropped {n_dropped} incomplete rows from {config.input}", file=sys.stderr)
    scaling = {}
    if config.continuous:
        data, scaling = standardize(data, config.continuous)
        for col, (mean, sd) in scaling.items():
            print(f"standardized {col}: mean={mean:.6g} sd={sd:.6g}", file=sys.stderr)

    prior = _build_prior(config, data.k)
    runner = _fit_runner(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    root = RngStream(config.seed)
    summary_rows = []
    for p in config.quantiles:
        chain_config = ChainConfig(
            p=p,
            iterations=config.iterations,
            burn_in=config.burn_in,
            thin=config.thin,
            overdispersed_init=config.chains > 1,
        )
        # Content-keyed stream: the draws for a quantile do not depend on
        # which other quantiles the same config happens to request.
        rng = root.child(_path_id("fit", config.model, p))
        store = run_chains(runner, data, prior, chain_config, rng, config.chains)
        metadata = {
            "seed": config.seed,
            "config_hash": digest,
            "model": config.model,
            "quantile": repr(float(p)),
            "chains": config.chains,
            "iterations": config.iterations,
            "burn_in": config.burn_in,
            "thin": config.thin,
        }
        for col, (mean, sd) in scaling.items():
            metadata[f"standardize_{col}"] = f"{mean!r},{sd!r}"
        draws_path = out_dir / f"draws_{config.model}_p{p:g}.csv"
        write_draws(draws_path, store, metadata)
        print(f"wrote {draws_path}", file=sys.stderr)
        summary_rows.extend((p, config.model, s) for s in summarize(store))
    summary_path = out_dir / "summary.csv"
    write_summary(summary_path, summary_rows)
    print(f"wrote {summary_path}", file=sys.stderr)
    _print_summary_table(summary_rows)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    raw = _load_json(Path(args.config))
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out
    config = _coerce_config(SimulateConfig, raw, Path(args.config))
    grid = build_grid(
        delta_pairs=config.delta_pairs,
        quantiles=config.quantiles,
        n_pess_values=config.n_pess,
        b0_scales=config.b0_scales,
        n=config.n,
        beta_true=config.beta_true,
        replications=config.replications,
    )
    schedule = McmcSchedule(
        iterations=config.iterations,
        burn_in=config.burn_in,
        thin=config.thin,
        n_chains=config.chains,
    )
    tables = run_grid(grid, schedule, master_seed=config.seed)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for metric, table in tables.items():
        path = out_dir / f"{metric}.csv"
        table.to_csv(path, index=False)
        print(f"wrote {path} ({len(table)} rows)", file=sys.stderr)
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    store, meta = read_draws(args.draws)
    p = float(meta.get("quantile", "nan"))
    model = meta.get("model", "?")
    rows = [(p, model, s) for s in summarize(store)]
    _print_summary_table(rows)
    return 0


def _cmd_psrf(args: argparse.Namespace) -> int:
    store, _ = read_draws(args.draws)
    if store.n_chains < 2:
        raise InsufficientDraws("PSRF needs at least 2 chains in the draws file")
    if args.param is not None:
        value = psrf(store.per_chain(args.param))
        print(f"{args.param:<16} {value:.6g}")
        return 0
    for name, value in psrf_all(store).items():
        print(f"{name:<16} {value:.6g}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bqr",
        description="Bayesian binary quantile regression with optional outcome misclassification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a model per quantile and persist draws + summary")
    fit.add_argument("--config", required=True, help="JSON config file")
    fit.add_argument("--model", choices=_MODELS, help="override the config's model")
    fit.add_argument(
        "--quantile", type=float, action="append", help="override quantiles (repeatable)"
    )
    fit.add_argument("--seed", type=int, help="override the master seed")
    fit.add_argument("--out", help="override the output directory")
    fit.set_defaults(func=_cmd_fit)

    sim = sub.add_parser("simulate", help="run the scenario grid and write metric tables")
    sim.add_argument("--config", required=True, help="JSON config file")
    sim.add_argument("--seed", type=int, help="override the master seed")
    sim.add_argument("--out", help="override the output directory")
    sim.set_defaults(func=_cmd_simulate)

    summ = sub.add_parser("summarize", help="recompute the summary table from a draws file")
    summ.add_argument("--draws", required=True, help="draws CSV written by fit")
    summ.set_defaults(func=_cmd_summarize)

    ps = sub.add_parser("psrf", help="potential scale reduction factors from a draws file")
    ps.add_argument("--draws", required=True, help="draws CSV written by fit")
    ps.add_argument("--param", help="single parameter name (default: all)")
    ps.set_defaults(func=_cmd_psrf)
    return parser


def run_command(argv: Sequence[str]) -> int:
    """Parse and execute one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:  # argparse already printed usage/diagnostic
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: Sequence[str] | None = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)
