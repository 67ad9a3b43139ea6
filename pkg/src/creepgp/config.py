"""YAML run configuration: schema, defaults, validation and echo.

Example (all sections optional except ``environment``):

    environment:
      relative_humidity: 65.0
      mean_compressive_strength: 38.0
      load_age: 28.0
    variant:
      free: [h0, n]
      fixed: {t0_eff: 32.5}
    priors:
      h0: [10.0, 500.0]
    mcmc:
      iterations: 50000
      burn_in: 20000
      chains: 4
      adapt: true
    sampling:
      kind: logarithmic
      count: 100
      min_time: 0.01
    sensitivity:
      means: [32.5, 50.0, 0.30]
      stds: [3.25, 5.0, 0.009]
      base_sample_size: 16384
    simulate:
      duration: 100.0
      scenarios:
        - specimen_id: demo
          preload_intensity: 0.0
          truth: {t0_eff: 32.5, h0: 50.0, n: 0.34}
          hyper: {sigma_n: 0.05, sigma_s: 0.1, length_scale: 30.0}
    study:
      durations: [10, 20, 30, 40, 60, 80, 100]
    beta_h_cap: false
    seed: 0
"""

from dataclasses import dataclass, field

import numpy as np
import yaml

from . import ec2, sobol
from .data import SamplingScheme
from .errors import ConfigurationError
from .mcmc import DEFAULT_PRIOR_BOUNDS, McmcConfig, PriorSet

DEFAULT_DURATION_SWEEP = (10.0, 20.0, 30.0, 40.0, 60.0, 80.0, 100.0)

# Predictive horizon used for the reported final creep coefficient: the
# mixture mean at 100 years under load.  A convention, echoed in reports.
PHI_INFINITY_HORIZON_DAYS = 36_500.0


@dataclass
class RunConfig:
    environment: ec2.Environment
    variant: ec2.ModelVariant
    priors: PriorSet
    mcmc: McmcConfig
    sampling: SamplingScheme
    sensitivity: sobol.SensitivityInputSpec
    simulate: dict
    study: dict
    beta_h_cap: bool = False
    seed: int = 0
    raw: dict = field(default_factory=dict)


def _require_mapping(node, name):
    if not isinstance(node, dict):
        raise ConfigurationError(f"config section {name!r} must be a mapping")
    return node


def parse_config(raw: dict) -> RunConfig:
    """Validate a parsed YAML tree into a RunConfig."""
    raw = _require_mapping(raw if raw is not None else {}, "<root>")
    try:
        env_node = _require_mapping(raw.get("environment", {}), "environment")
        env = ec2.Environment(
            relative_humidity=float(env_node.get("relative_humidity", 65.0)),
            mean_compressive_strength=float(env_node.get("mean_compressive_strength", 38.0)),
            load_age=float(env_node.get("load_age", 28.0)),
        )

        variant_node = _require_mapping(raw.get("variant", {"free": ["h0", "n"], "fixed": {"t0_eff": 32.5}}), "variant")
        variant = ec2.ModelVariant(
            free=tuple(variant_node.get("free", ())),
            fixed={k: float(v) for k, v in variant_node.get("fixed", {}).items()},
        )

        bounds = dict(DEFAULT_PRIOR_BOUNDS)
        for name, pair in _require_mapping(raw.get("priors", {}), "priors").items():
            if name not in bounds:
                raise ConfigurationError(f"unknown prior parameter {name!r}")
            lo, hi = pair
            bounds[name] = (float(lo), float(hi))
        priors = PriorSet(bounds)

        seed = int(raw.get("seed", 0))
        mcmc_node = _require_mapping(raw.get("mcmc", {}), "mcmc")
        scales = mcmc_node.get("proposal_scales")
        mc = McmcConfig(
            iterations=int(mcmc_node.get("iterations", 50_000)),
            burn_in=int(mcmc_node.get("burn_in", 20_000)),
            chains=int(mcmc_node.get("chains", 4)),
            seed=int(mcmc_node.get("seed", seed)),
            adapt=bool(mcmc_node.get("adapt", True)),
            thin=int(mcmc_node.get("thin", 1)),
            proposal_scales=None if scales is None else np.asarray(scales, dtype=float),
        )

        sampling_node = _require_mapping(raw.get("sampling", {}), "sampling")
        sampling = SamplingScheme(
            kind=sampling_node.get("kind", "logarithmic"),
            count=int(sampling_node.get("count", 100)),
            min_time=float(sampling_node.get("min_time", 0.01)),
        )

        sens_node = _require_mapping(raw.get("sensitivity", {}), "sensitivity")
        grid = sens_node.get("duration_grid")
        sens = sobol.SensitivityInputSpec(
            means=tuple(sens_node.get("means", sobol.DEFAULT_MEANS)),
            stds=tuple(sens_node.get("stds", sobol.DEFAULT_STDS)),
            duration_grid=np.asarray(grid, dtype=float) if grid is not None else sobol.default_duration_grid(),
            base_sample_size=int(sens_node.get("base_sample_size", 16_384)),
            seed=int(sens_node.get("seed", seed)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(str(exc)) from exc

    return RunConfig(
        environment=env,
        variant=variant,
        priors=priors,
        mcmc=mc,
        sampling=sampling,
        sensitivity=sens,
        simulate=_require_mapping(raw.get("simulate", {}), "simulate"),
        study=_require_mapping(raw.get("study", {}), "study"),
        beta_h_cap=bool(raw.get("beta_h_cap", False)),
        seed=seed,
        raw=raw,
    )


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f)
    return parse_config(raw)


def resolved_config_dict(config: RunConfig) -> dict:
    """Fully resolved settings for the reproducibility echo."""
    return {
        "environment": {
            "relative_humidity": config.environment.relative_humidity,
            "mean_compressive_strength": config.environment.mean_compressive_strength,
            "load_age": config.environment.load_age,
        },
        "variant": {"free": list(config.variant.free), "fixed": dict(config.variant.fixed)},
        "priors": {k: list(v) for k, v in config.priors.bounds.items()},
        "mcmc": {
            "iterations": config.mcmc.iterations,
            "burn_in": config.mcmc.burn_in,
            "chains": config.mcmc.chains,
            "seed": config.mcmc.seed,
            "adapt": config.mcmc.adapt,
            "thin": config.mcmc.thin,
            "proposal_scales": None
            if config.mcmc.proposal_scales is None
            else [float(s) for s in config.mcmc.proposal_scales],
        },
        "sampling": {
            "kind": config.sampling.kind,
            "count": config.sampling.count,
            "min_time": config.sampling.min_time,
        },
        "sensitivity": {
            "means": list(config.sensitivity.means),
            "stds": list(config.sensitivity.stds),
            "duration_grid": [float(d) for d in config.sensitivity.duration_grid],
            "base_sample_size": config.sensitivity.base_sample_size,
            "seed": config.sensitivity.seed,
        },
        "simulate": config.simulate,
        "study": config.study,
        "beta_h_cap": config.beta_h_cap,
        "seed": config.seed,
        "phi_infinity_horizon_days": PHI_INFINITY_HORIZON_DAYS,
    }


def write_resolved_config(config: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        yaml.safe_dump(resolved_config_dict(config), f, sort_keys=True)
