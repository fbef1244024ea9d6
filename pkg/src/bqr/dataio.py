"""File formats: dataset ingestion, draw persistence, summary tables.

Draw files are plain CSV with a small metadata header of ``#``-prefixed
``key=value`` lines (seed, config hash, model, quantile, chain layout).
Floats are written with ``repr`` so a read-back reproduces every draw bit
for bit; anything printed for humans is formatted elsewhere.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .diagnostics import Summary
from .exceptions import (
    DomainError,
    EmptyAfterFiltering,
    MissingColumn,
    NonBinaryOutcome,
    ZeroVariance,
)
from .model import Dataset, DrawStore

__all__ = [
    "ingest_csv",
    "standardize",
    "write_draws",
    "read_draws",
    "write_summary",
]

_META_KEYS = ("seed", "config_hash", "model", "quantile", "chains", "iterations", "burn_in", "thin")


def ingest_csv(path: str | Path, outcome: str, covariates: Sequence[str]) -> tuple[Dataset, int]:
    """Load a header-ed CSV into a Dataset with a prepended intercept.

    Rows with a missing or non-numeric value in the outcome or any chosen
    covariate are dropped; the count of dropped rows is returned so callers
    can report it.
    """
    path = Path(path)
    covariates = list(covariates)
    if not covariates:
        raise DomainError("at least one covariate is required")
    if len(set(covariates)) != len(covariates) or outcome in covariates:
        raise DomainError("covariate names must be unique and distinct from the outcome")
    frame = pd.read_csv(path)
    for col in [outcome, *covariates]:
        if col not in frame.columns:
            raise MissingColumn(f"column {col!r} not found in {path}")
    selected = frame[[outcome, *covariates]].apply(pd.to_numeric, errors="coerce")
    kept = selected.dropna()
    n_dropped = len(selected) - len(kept)
    if kept.empty:
        raise EmptyAfterFiltering(f"no complete rows left after filtering {path}")
    y = kept[outcome].to_numpy()
    if not np.isin(y, (0, 1)).all():
        bad = sorted(set(np.unique(y)) - {0.0, 1.0})
        raise NonBinaryOutcome(f"outcome column {outcome!r} has non-binary values {bad}")
    X = np.column_stack([np.ones(len(kept)), kept[covariates].to_numpy(dtype=float)])
    data = Dataset(
        X=X, y_obs=y.astype(np.int64), column_names=("intercept", *covariates)
    )
    return data, n_dropped


def standardize(
    data: Dataset, columns: Iterable[str]
) -> tuple[Dataset, dict[str, tuple[float, float]]]:
    """Center and scale the named columns to mean 0, sample sd 1 (ddof=1).

    Returns the transformed dataset and ``{column: (mean, sd)}`` so reported
    coefficients can be mapped back to the raw scale.  The intercept and any
    unnamed column are untouched.
    """
    X = data.X.copy()
    info: dict[str, tuple[float, float]] = {}
    for col in columns:
        if col == "intercept":
            raise DomainError("the intercept column cannot be standardized")
        try:
            j = data.column_names.index(col)
        except ValueError:
            raise MissingColumn(f"column {col!r} not in dataset {data.column_names}") from None
        mean = float(X[:, j].mean())
        sd = float(X[:, j].std(ddof=1)) if data.n > 1 else 0.0
        if sd == 0.0 or not np.isfinite(sd):
            raise ZeroVariance(f"column {col!r} has zero sample variance")
        X[:, j] = (X[:, j] - mean) / sd
        info[col] = (mean, sd)
    out = Dataset(X=X, y_obs=data.y_obs, column_names=data.column_names, y_true=data.y_true)
    return out, info


def write_draws(path: str | Path, store: DrawStore, metadata: Mapping[str, object]) -> None:
    """Persist retained draws with a ``#`` metadata header, full precision."""
    meta = dict(metadata)
    meta.setdefault("chains", store.n_chains)
    meta.setdefault("iterations", store.total_iterations)
    meta.setdefault("burn_in", store.burn_in)
    meta.setdefault("thin", store.thin)
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        for key in (*_META_KEYS, *sorted(set(meta) - set(_META_KEYS))):
            if key in meta:
                fh.write(f"# {key}={meta[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["chain", "iteration", *store.names])
        iterations = range(store.burn_in, store.total_iterations, store.thin)
        for c, chain in enumerate(store.chains):
            for row_idx, it in enumerate(iterations):
                writer.writerow([c, it, *(repr(float(v)) for v in chain[row_idx])])


def read_draws(path: str | Path) -> tuple[DrawStore, dict[str, str]]:
    """Read a draws CSV back into a DrawStore plus its metadata."""
    path = Path(path)
    meta: dict[str, str] = {}
    with path.open() as fh:
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path} has no draw header") from None
        if header[:2] != ["chain", "iteration"]:
            raise DomainError(f"{path} is not a draws file (header {header[:2]})")
        names = header[2:]
        by_chain: dict[int, list[list[float]]] = {}
        for row in reader:
            if not row:
                continue
            by_chain.setdefault(int(row[0]), []).append([float(v) for v in row[2:]])
    if not by_chain:
        raise DomainError(f"{path} contains no draws")
    try:
        total = int(meta["iterations"])
        burn = int(meta["burn_in"])
        thin = int(meta["thin"])
    except KeyError as exc:
        raise DomainError(f"{path} is missing metadata line for {exc.args[0]}") from None
    chains = [np.asarray(by_chain[c]) for c in sorted(by_chain)]
    return DrawStore(names, chains, total, burn, thin), meta


def write_summary(path: str | Path, rows: Sequence[tuple[float, str, Summary]]) -> None:
    """Write summary rows (quantile, model, Summary) as a flat CSV."""
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["quantile", "model", "variable", "mean", "lower", "upper", "excludes_zero"])
        for p, model, s in rows:
            writer.writerow(
                [
                    repr(float(p)),
                    model,
                    s.name,
                    repr(float(s.mean)),
                    repr(float(s.lower)),
                    repr(float(s.upper)),
                    int(s.excludes_zero),
                ]
            )
