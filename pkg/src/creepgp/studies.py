"""Study harnesses: sampling structure, test duration and preload intensity.

Each study calibrates the configured model variant on derived training sets
and collects per-case parameter summaries plus the predicted final creep
coefficient (mixture mean at the 100-year horizon).
"""

from dataclasses import dataclass, field

import numpy as np

from . import data, ec2, gp, mcmc
from .config import PHI_INFINITY_HORIZON_DAYS, RunConfig
from .errors import ConfigurationError

# Number of posterior draws used for phi_infinity mixtures inside studies.
MIXTURE_SUBSAMPLE = 200


@dataclass
class CalibrationResult:
    label: str
    chains: list
    summary: mcmc.ParameterSummary
    report: mcmc.DiagnosticsReport
    phi_infinity_mean: float
    phi_infinity_std: float
    seed: int
    extra: dict = field(default_factory=dict)


@dataclass
class StudyReport:
    kind: str  # sampling | duration | preload
    cases: list  # CalibrationResult per case
    config_seed: int

    def rows(self):
        """Flat per-case rows for CSV/JSON serialization."""
        out = []
        for case in self.cases:
            row = {
                "case": case.label,
                "seed": case.seed,
                "phi_infinity_mean": case.phi_infinity_mean,
                "phi_infinity_std": case.phi_infinity_std,
            }
            for j, name in enumerate(case.summary.names):
                row[f"{name}_mean"] = float(case.summary.mean[j])
                row[f"{name}_std"] = float(case.summary.std[j])
            row.update(case.extra)
            out.append(row)
        return out


def calibrate(
    dataset: data.CreepDataset,
    config: RunConfig,
    label: str = "calibration",
    variant: ec2.ModelVariant | None = None,
    mcmc_config: mcmc.McmcConfig | None = None,
) -> CalibrationResult:
    """One full calibration: MH sampling, summary, diagnostics, phi_infinity."""
    variant = variant or config.variant
    mc = mcmc_config or config.mcmc
    chains = mcmc.sample_posterior(dataset, config.environment, variant, config.priors, mc)
    summary = mcmc.summarize(chains)
    report = mcmc.diagnostics(chains, config.priors)
    pooled = np.vstack([c.samples for c in chains])
    subsample = min(MIXTURE_SUBSAMPLE, pooled.shape[0])
    pred = gp.predictive_mixture(
        dataset,
        config.environment,
        variant,
        pooled,
        [PHI_INFINITY_HORIZON_DAYS],
        subsample=subsample,
    )
    return CalibrationResult(
        label=label,
        chains=chains,
        summary=summary,
        report=report,
        phi_infinity_mean=float(pred.mean[0]),
        phi_infinity_std=float(np.sqrt(pred.variance[0])),
        seed=mc.seed,
    )


def sampling_study(dataset: data.CreepDataset, config: RunConfig) -> StudyReport:
    """Equidistant vs logarithmic training sets on the same record."""
    cases = []
    for kind in ("equidistant", "logarithmic"):
        scheme = data.SamplingScheme(kind=kind, count=config.sampling.count, min_time=config.sampling.min_time)
        training = data.resample(dataset, scheme)
        cases.append(calibrate(training, config, label=kind))
    return StudyReport(kind="sampling", cases=cases, config_seed=config.seed)


def duration_study(dataset: data.CreepDataset, config: RunConfig, durations=None) -> StudyReport:
    """Truncation sweep: calibrate on progressively longer records."""
    from .config import DEFAULT_DURATION_SWEEP

    if durations is None:
        durations = config.study.get("durations", DEFAULT_DURATION_SWEEP)
    cases = []
    for duration in durations:
        truncated = data.truncate(dataset, float(duration))
        training = data.resample(truncated, config.sampling)
        case = calibrate(training, config, label=f"{float(duration):g}d")
        case.extra["duration"] = float(duration)
        cases.append(case)
    return StudyReport(kind="duration", cases=cases, config_seed=config.seed)


def preload_study(datasets, config: RunConfig) -> StudyReport:
    """Per-intensity calibration of the two-parameter and fixed-n variants."""
    groups: dict = {}
    for ds in datasets:
        groups.setdefault(ds.preload_intensity, []).append(ds)
    if not groups:
        raise ConfigurationError("preload study needs datasets labelled with preload_intensity")
    fixed_n = float(config.study.get("fixed_n", 0.34))
    t0_eff_fixed = config.variant.fixed.get("t0_eff", 32.5)
    two_param = ec2.ModelVariant(free=("h0", "n"), fixed={"t0_eff": t0_eff_fixed})
    one_param = ec2.ModelVariant(free=("h0",), fixed={"t0_eff": t0_eff_fixed, "n": fixed_n})
    cases = []
    for intensity in sorted(groups):
        merged = data.merge(groups[intensity])
        training = data.resample(merged, config.sampling)
        for variant, tag in ((two_param, "two-parameter"), (one_param, "one-parameter")):
            case = calibrate(training, config, label=f"preload={intensity:g} {tag}", variant=variant)
            case.extra["preload_intensity"] = float(intensity)
            case.extra["variant"] = tag
            cases.append(case)
    return StudyReport(kind="preload", cases=cases, config_seed=config.seed)
