"""Command-line entry point.

Subcommands: calibrate, predict, sensitivity, study, simulate.  Every run
writes a resolved-config echo and seeds into the output directory so reruns
are byte-identical; wall-clock timestamps are confined to run_meta.txt.

Exit codes: 0 success, 2 validation/config error, 3 numerical failure,
4 success with diagnostics warnings.
"""

import argparse
import datetime
import json
import os
import sys

import numpy as np
import yaml

from . import data, ec2, gp, mcmc, sobol, studies
from .config import (
    PHI_INFINITY_HORIZON_DAYS,
    RunConfig,
    load_config,
    parse_config,
    write_resolved_config,
)
from .errors import (
    ConfigurationError,
    DataValidationError,
    DomainError,
    McmcError,
    NumericalError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_DIAGNOSTICS = 4


def _prepare_out(config: RunConfig, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    write_resolved_config(config, os.path.join(out_dir, "resolved_config.yaml"))
    with open(os.path.join(out_dir, "run_meta.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write(f"started_utc: {datetime.datetime.now(datetime.timezone.utc).isoformat()}\n")


def _csv_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_chain(chain: mcmc.PosteriorChain, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# seed = {chain.seed}\n")
        f.write(f"# acceptance_rate = {float(chain.acceptance_rate)!r}\n")
        f.write(",".join(chain.names) + ",log_posterior\n")
        for row, lp in zip(chain.samples, chain.log_posterior_trace):
            f.write(",".join(repr(float(v)) for v in row) + f",{float(lp)!r}\n")


def load_chain(path) -> mcmc.PosteriorChain:
    seed = 0
    acceptance = float("nan")
    names = None
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, val = body.partition("=")
                key, val = key.strip(), val.strip()
                if key == "seed":
                    seed = int(val)
                elif key == "acceptance_rate":
                    acceptance = float(val)
                continue
            if names is None:
                cols = [c.strip() for c in line.split(",")]
                if cols[-1] != "log_posterior":
                    raise DataValidationError(f"unexpected chain header in {path}")
                names = tuple(cols[:-1])
                continue
            rows.append([float(v) for v in line.split(",")])
    if names is None or not rows:
        raise DataValidationError(f"empty chain file {path}")
    arr = np.array(rows)
    return mcmc.PosteriorChain(
        samples=arr[:, :-1],
        log_posterior_trace=arr[:, -1],
        acceptance_rate=acceptance,
        seed=seed,
        names=names,
    )


def write_predictive(pred: gp.PredictiveDistribution, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("time_days,mean,std\n")
        for t, m, v in zip(pred.query_times, pred.mean, pred.variance):
            f.write(f"{float(t)!r},{float(m)!r},{float(np.sqrt(v))!r}\n")


def _write_summary(summary: mcmc.ParameterSummary, report: mcmc.DiagnosticsReport, out_dir) -> None:
    payload = {
        "parameters": {
            name: {"mean": float(summary.mean[j]), "std": float(summary.std[j])}
            for j, name in enumerate(summary.names)
        },
        "correlation": {
            "names": list(summary.names),
            "matrix": summary.correlation.tolist(),
        },
        "degenerate": list(summary.degenerate),
    }
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    lines = [
        "diagnostics",
        f"acceptance_rates: {[round(a, 4) for a in report.acceptance_rates]}",
        f"ess: {dict(zip(report.names, np.round(report.ess, 1)))}",
    ]
    if report.rhat is not None:
        lines.append(f"rhat: {dict(zip(report.names, np.round(report.rhat, 4)))}")
    if report.boundary_mass is not None:
        lines.append(f"boundary_mass: {dict(zip(report.names, np.round(report.boundary_mass, 4)))}")
    lines.append(f"flags: {report.flags if report.flags else 'none'}")
    lines.append(f"phi_infinity_horizon_days: {PHI_INFINITY_HORIZON_DAYS} (100-year convention)")
    with open(os.path.join(out_dir, "diagnostics.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(str(x) for x in lines) + "\n")


def default_query_times(count: int = 200) -> np.ndarray:
    """Log-spaced horizon from 0.01 days to 100 years under load."""
    return np.geomspace(0.01, PHI_INFINITY_HORIZON_DAYS, count)


def cmd_calibrate(config: RunConfig, dataset_files, out_dir) -> int:
    datasets = [data.load_dataset(p) for p in dataset_files]
    training = data.resample(data.merge(datasets), config.sampling)
    _prepare_out(config, out_dir)
    result = studies.calibrate(training, config)
    for k, chain in enumerate(result.chains):
        write_chain(chain, os.path.join(out_dir, f"chain_{k}.csv"))
    _write_summary(result.summary, result.report, out_dir)
    pooled = np.vstack([c.samples for c in result.chains])
    pred = gp.predictive_mixture(
        training,
        config.environment,
        config.variant,
        pooled,
        default_query_times(),
        subsample=min(studies.MIXTURE_SUBSAMPLE, pooled.shape[0]),
    )
    write_predictive(pred, os.path.join(out_dir, "predictive.csv"))
    if result.report.flags:
        print("diagnostics warnings:", "; ".join(result.report.flags), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    return EXIT_OK


def cmd_predict(config: RunConfig, chain_files, out_dir, query_times=None) -> int:
    chains = [load_chain(p) for p in chain_files]
    expected = gp.theta_names(config.variant)
    for chain, path in zip(chains, chain_files):
        if chain.names != expected:
            raise ConfigurationError(
                f"chain {path} has coordinates {chain.names}, variant expects {expected}"
            )
    # Prediction needs the training data the chains were calibrated on.
    dataset_files = config.raw.get("datasets", [])
    if not dataset_files:
        raise ConfigurationError("predict requires config key 'datasets' (training data files)")
    training = data.resample(data.merge([data.load_dataset(p) for p in dataset_files]), config.sampling)
    _prepare_out(config, out_dir)
    pooled = np.vstack([c.samples for c in chains])
    query = default_query_times() if query_times is None else np.asarray(query_times, dtype=float)
    pred = gp.predictive_mixture(
        training,
        config.environment,
        config.variant,
        pooled,
        query,
        subsample=min(studies.MIXTURE_SUBSAMPLE, pooled.shape[0]),
    )
    write_predictive(pred, os.path.join(out_dir, "predictive.csv"))
    return EXIT_OK


def cmd_sensitivity(config: RunConfig, out_dir) -> int:
    _prepare_out(config, out_dir)
    result = sobol.sobol_indices(config.sensitivity, config.environment, beta_h_cap=config.beta_h_cap)
    result.to_csv(os.path.join(out_dir, "sobol.csv"))
    return EXIT_OK


def cmd_study(config: RunConfig, kind, dataset_files, out_dir) -> int:
    datasets = [data.load_dataset(p) for p in dataset_files]
    _prepare_out(config, out_dir)
    if kind == "sampling":
        report = studies.sampling_study(data.merge(datasets), config)
    elif kind == "duration":
        report = studies.duration_study(data.merge(datasets), config)
    elif kind == "preload":
        report = studies.preload_study(datasets, config)
    else:
        raise ConfigurationError(f"unknown study kind {kind!r}")
    rows = report.rows()
    columns = sorted({key for row in rows for key in row}, key=lambda c: (c != "case", c))
    with open(os.path.join(out_dir, f"study_{kind}.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_csv_cell(row[c]) if c in row else "" for c in columns) + "\n")
    with open(os.path.join(out_dir, f"study_{kind}.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump({"kind": report.kind, "seed": report.config_seed, "cases": rows}, f, indent=2)
        f.write("\n")
    for case in report.cases:
        for k, chain in enumerate(case.chains):
            safe = case.label.replace(" ", "_").replace("=", "-")
            write_chain(chain, os.path.join(out_dir, f"chain_{safe}_{k}.csv"))
    return EXIT_OK


def cmd_simulate(config: RunConfig, out_dir) -> int:
    node = config.simulate
    if not node:
        raise ConfigurationError("simulate requires a 'simulate' config section")
    scenarios = node.get("scenarios")
    if not scenarios:
        raise ConfigurationError("simulate section needs a nonempty 'scenarios' list")
    duration = float(node.get("duration", 100.0))
    _prepare_out(config, out_dir)
    for k, scenario in enumerate(scenarios):
        truth = scenario.get("truth", {})
        params = ec2.CreepParameters(
            t0_eff=float(truth.get("t0_eff", 32.5)),
            h0=float(truth.get("h0", 50.0)),
            n=float(truth.get("n", 0.3)),
        )
        hyper_node = scenario.get("hyper", {})
        hyper = gp.KernelHyperparameters(
            signal_std=float(hyper_node.get("sigma_s", 0.1)),
            length_scale=float(hyper_node.get("length_scale", 30.0)),
            noise_std=float(hyper_node.get("sigma_n", 0.05)),
        )
        specimen = scenario.get("specimen_id", f"synthetic_{k}")
        dataset = data.synthesize(
            config.environment,
            params,
            hyper,
            config.sampling,
            seed=int(scenario.get("seed", config.seed + k)),
            duration=duration,
            specimen_id=specimen,
            preload_intensity=float(scenario.get("preload_intensity", 0.0)),
        )
        data.write_dataset(dataset, os.path.join(out_dir, f"{specimen}.csv"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="creepgp",
        description="Bayesian calibration of the EC 2 creep model with a physics-informed GP.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, datasets=False):
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if datasets:
            p.add_argument("datasets", nargs="*", help="creep-curve CSV files")

    common(sub.add_parser("calibrate", help="fit the configured variant to creep data"), datasets=True)
    p_predict = sub.add_parser("predict", help="predictive mixture from stored chains")
    common(p_predict)
    p_predict.add_argument("chains", nargs="+", help="chain CSV files from calibrate")
    p_predict.add_argument("--times", help="optional CSV/whitespace list of query times (days)")
    common(sub.add_parser("sensitivity", help="Sobol indices over the duration grid"))
    p_study = sub.add_parser("study", help="run a study harness")
    p_study.add_argument("kind", choices=("sampling", "duration", "preload"))
    common(p_study, datasets=True)
    common(sub.add_parser("simulate", help="write synthetic creep datasets"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
            config.mcmc.seed = args.seed
            config.sensitivity.seed = args.seed
        if args.command == "calibrate":
            if not args.datasets:
                raise ConfigurationError("calibrate needs at least one dataset file")
            return cmd_calibrate(config, args.datasets, args.out)
        if args.command == "predict":
            times = None
            if args.times:
                times = [float(v) for v in args.times.replace(",", " ").split()]
            return cmd_predict(config, args.chains, args.out, times)
        if args.command == "sensitivity":
            return cmd_sensitivity(config, args.out)
        if args.command == "study":
            if not args.datasets:
                raise ConfigurationError("study needs at least one dataset file")
            return cmd_study(config, args.kind, args.datasets, args.out)
        if args.command == "simulate":
            return cmd_simulate(config, args.out)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except (ConfigurationError, DataValidationError, DomainError,
            FileNotFoundError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, McmcError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
