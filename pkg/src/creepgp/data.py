"""Creep-test dataset ingestion, resampling, truncation and synthesis.

Dataset times are elapsed days under load (t - t0 >= 0).  The CSV schema is
a header line ``time_days,creep_coefficient`` optionally preceded by ``#``
metadata lines carrying ``specimen_id`` and ``preload_intensity``.
"""

from dataclasses import dataclass

import numpy as np

from . import ec2, gp
from .errors import CsvParseError, DataValidationError, DomainError

CSV_HEADER = "time_days,creep_coefficient"

# Logarithmic grids cannot start at zero; raw records usually do.
DEFAULT_MIN_TIME = 0.01


@dataclass
class CreepDataset:
    times: np.ndarray  # elapsed days under load, strictly increasing
    values: np.ndarray  # creep coefficients
    specimen_id: str = ""
    preload_intensity: float = 0.0  # fraction of compressive strength
    source: str = "raw"  # raw | resampled | synthetic
    truth: dict | None = None  # generating parameters of synthetic data

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise DataValidationError("times and values must be 1-D arrays of equal length")
        if self.times.size < 2:
            raise DataValidationError("a dataset needs at least 2 observations")
        if np.any(np.diff(self.times) <= 0.0):
            raise DataValidationError("observation times must be strictly increasing")
        if np.any(self.times < 0.0):
            raise DataValidationError("times are elapsed days under load and must be >= 0")
        # Synthetic noise may dip below zero near t = 0; measured creep
        # coefficients may not.
        if self.source != "synthetic" and np.any(self.values < 0.0):
            raise DataValidationError("creep coefficients must be >= 0")
        if self.source not in ("raw", "resampled", "synthetic"):
            raise DataValidationError(f"unknown source {self.source!r}")

    @property
    def n(self) -> int:
        return self.times.size


@dataclass
class SamplingScheme:
    kind: str  # equidistant | logarithmic
    count: int = 100
    min_time: float = DEFAULT_MIN_TIME

    def __post_init__(self):
        if self.kind not in ("equidistant", "logarithmic"):
            raise DataValidationError(f"unknown sampling kind {self.kind!r}")
        if self.count < 2:
            raise DataValidationError("count must be >= 2")
        if self.min_time <= 0.0:
            raise DataValidationError("min_time must be > 0")

    def grid(self, start: float, end: float) -> np.ndarray:
        """Target times over [start, end] (log grids clip start to min_time)."""
        if self.kind == "equidistant":
            return np.linspace(start, end, self.count)
        lo = max(start, self.min_time)
        if lo >= end:
            raise DataValidationError(f"logarithmic grid needs min_time < end, got [{lo}, {end}]")
        return np.geomspace(lo, end, self.count)


def load_dataset(path) -> CreepDataset:
    """Parse and validate a creep-curve CSV file."""
    meta = {"specimen_id": "", "preload_intensity": 0.0, "source": "raw"}
    times = []
    values = []
    header_seen = False
    with open(path, "r", encoding="utf-8") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    key = key.strip()
                    val = val.strip()
                    if key == "specimen_id":
                        meta["specimen_id"] = val
                    elif key == "preload_intensity":
                        try:
                            meta["preload_intensity"] = float(val)
                        except ValueError:
                            raise CsvParseError(f"bad preload_intensity {val!r}", line_number)
                    elif key == "source" and val in ("raw", "resampled", "synthetic"):
                        meta["source"] = val
                continue
            if not header_seen:
                if line.replace(" ", "") != CSV_HEADER:
                    raise CsvParseError(f"expected header {CSV_HEADER!r}, got {line!r}", line_number)
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise CsvParseError(f"expected 2 columns, got {len(parts)}", line_number)
            try:
                t, y = float(parts[0]), float(parts[1])
            except ValueError:
                raise CsvParseError(f"non-numeric row {line!r}", line_number)
            if times and t <= times[-1]:
                raise DataValidationError(
                    f"line {line_number}: time {t} not greater than previous {times[-1]}"
                )
            times.append(t)
            values.append(y)
    if not header_seen:
        raise CsvParseError(f"missing header {CSV_HEADER!r}", 1)
    if len(times) < 2:
        raise DataValidationError("a dataset needs at least 2 observations")
    return CreepDataset(times=np.array(times), values=np.array(values), **meta)


def write_dataset(dataset: CreepDataset, path) -> None:
    """Write a dataset in the ingestion CSV schema (LF, point decimals)."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if dataset.specimen_id:
            f.write(f"# specimen_id = {dataset.specimen_id}\n")
        f.write(f"# preload_intensity = {float(dataset.preload_intensity)!r}\n")
        f.write(f"# source = {dataset.source}\n")
        f.write(CSV_HEADER + "\n")
        for t, y in zip(dataset.times, dataset.values):
            f.write(f"{float(t)!r},{float(y)!r}\n")


def resample(dataset: CreepDataset, scheme: SamplingScheme) -> CreepDataset:
    """Linear interpolation of the raw record onto a scheme's grid.

    Never extrapolates: the grid must lie within the observed span.
    """
    grid = scheme.grid(dataset.times[0], dataset.times[-1])
    if grid[0] < dataset.times[0] or grid[-1] > dataset.times[-1]:
        raise DataValidationError(
            f"resampling range [{grid[0]}, {grid[-1]}] exceeds data span "
            f"[{dataset.times[0]}, {dataset.times[-1]}]"
        )
    values = np.interp(grid, dataset.times, dataset.values)
    return CreepDataset(
        times=grid,
        values=values,
        specimen_id=dataset.specimen_id,
        preload_intensity=dataset.preload_intensity,
        source="resampled" if dataset.source != "synthetic" else "synthetic",
        truth=dataset.truth,
    )


def truncate(dataset: CreepDataset, duration: float) -> CreepDataset:
    """Keep observations with elapsed time <= duration."""
    if duration <= 0.0:
        raise DomainError(f"duration must be > 0, got {duration}")
    keep = dataset.times <= duration
    if keep.sum() < 2:
        raise DataValidationError(
            f"truncation at {duration} days leaves fewer than 2 observations"
        )
    return CreepDataset(
        times=dataset.times[keep],
        values=dataset.values[keep],
        specimen_id=dataset.specimen_id,
        preload_intensity=dataset.preload_intensity,
        source=dataset.source,
        truth=dataset.truth,
    )


def synthesize(
    env: ec2.Environment,
    params_true: ec2.CreepParameters,
    hyper_true: gp.KernelHyperparameters,
    scheme: SamplingScheme,
    seed: int,
    duration: float = 100.0,
    specimen_id: str = "synthetic",
    preload_intensity: float = 0.0,
) -> CreepDataset:
    """Noiseless model curve plus one correlated SE-kernel draw plus
    independent measurement noise; the truth is kept for recovery tests.
    """
    if duration <= scheme.min_time:
        raise DomainError("duration must exceed the scheme's min_time")
    times = scheme.grid(scheme.min_time, duration)
    mean = ec2.creep_coefficient_elapsed(times, env, params_true)
    rng = np.random.default_rng(seed)
    values = np.array(mean, copy=True)
    if hyper_true.signal_std > 0.0:
        cov = gp.kernel_matrix(times, times, hyper_true)
        chol, _ = gp._cholesky_with_jitter(cov, hyper_true.signal_std**2)
        values = values + chol @ rng.standard_normal(times.size)
    if hyper_true.noise_std > 0.0:
        values = values + hyper_true.noise_std * rng.standard_normal(times.size)
    truth = {
        "t0_eff": params_true.t0_eff,
        "h0": params_true.h0,
        "n": params_true.n,
        "sigma_n": hyper_true.noise_std,
        "sigma_s": hyper_true.signal_std,
        "length_scale": hyper_true.length_scale,
        "seed": seed,
    }
    return CreepDataset(
        times=times,
        values=values,
        specimen_id=specimen_id,
        preload_intensity=preload_intensity,
        source="synthetic",
        truth=truth,
    )


def merge(datasets) -> CreepDataset:
    """Pool several specimens into one training set, sorted by time.

    Exact duplicate timestamps are averaged so times stay strictly
    increasing.  Used by the preload study to calibrate per intensity group.
    """
    datasets = list(datasets)
    if not datasets:
        raise DataValidationError("nothing to merge")
    if len(datasets) == 1:
        return datasets[0]
    times = np.concatenate([d.times for d in datasets])
    values = np.concatenate([d.values for d in datasets])
    order = np.argsort(times, kind="stable")
    times, values = times[order], values[order]
    uniq, inverse, counts = np.unique(times, return_inverse=True, return_counts=True)
    summed = np.zeros_like(uniq)
    np.add.at(summed, inverse, values)
    source = "synthetic" if all(d.source == "synthetic" for d in datasets) else "raw"
    return CreepDataset(
        times=uniq,
        values=summed / counts,
        specimen_id="+".join(d.specimen_id for d in datasets if d.specimen_id),
        preload_intensity=datasets[0].preload_intensity,
        source=source,
    )
