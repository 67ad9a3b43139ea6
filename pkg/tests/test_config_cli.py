import json

import numpy as np
import pytest
import yaml

from creepgp import cli, config, data, mcmc
from creepgp.errors import ConfigurationError


BASE_CONFIG = {
    "environment": {"relative_humidity": 65.0,
                    "mean_compressive_strength": 38.0,
                    "load_age": 28.0},
    "variant": {"free": ["h0", "n"], "fixed": {"t0_eff": 32.5}},
    "mcmc": {"iterations": 3000, "burn_in": 1000, "chains": 2},
    "sampling": {"kind": "logarithmic", "count": 40},
    "simulate": {
        "duration": 100.0,
        "scenarios": [
            {"specimen_id": "demo",
             "truth": {"t0_eff": 32.5, "h0": 50.0, "n": 0.34},
             "hyper": {"sigma_n": 0.05, "sigma_s": 0.1, "length_scale": 30.0}},
        ],
    },
    "seed": 7,
}


def write_config(tmp_path, overrides=None, name="run.yaml"):
    raw = yaml.safe_load(yaml.safe_dump(BASE_CONFIG))  # deep copy
    for key, val in (overrides or {}).items():
        if isinstance(val, dict) and isinstance(raw.get(key), dict):
            raw[key].update(val)
        else:
            raw[key] = val
    path = tmp_path / name
    path.write_text(yaml.safe_dump(raw))
    return path


class TestConfigParsing:
    def test_defaults(self):
        cfg = config.parse_config({})
        assert cfg.environment.relative_humidity == 65.0
        assert cfg.variant.free == ("h0", "n")
        assert cfg.mcmc.iterations == 50000
        assert cfg.sampling.kind == "logarithmic"
        assert cfg.priors.bounds == mcmc.PriorSet().bounds

    def test_full_round_trip(self, tmp_path):
        path = write_config(tmp_path)
        cfg = config.load_config(path)
        assert cfg.seed == 7
        assert cfg.mcmc.iterations == 3000
        assert cfg.mcmc.seed == 7  # inherits top-level seed
        assert cfg.sampling.count == 40

    def test_prior_override(self, tmp_path):
        path = write_config(tmp_path, {"priors": {"h0": [20.0, 200.0]}})
        cfg = config.load_config(path)
        assert cfg.priors.bounds["h0"] == (20.0, 200.0)
        assert cfg.priors.bounds["n"] == (0.2, 0.5)

    def test_unknown_prior_rejected(self):
        with pytest.raises(ConfigurationError):
            config.parse_config({"priors": {"bogus": [0.0, 1.0]}})

    def test_bad_section_type(self):
        with pytest.raises(ConfigurationError):
            config.parse_config({"mcmc": [1, 2, 3]})

    def test_bad_value(self):
        with pytest.raises(ConfigurationError):
            config.parse_config({"environment": {"relative_humidity": "wet"}})

    def test_resolved_echo_is_valid_yaml(self, tmp_path):
        cfg = config.parse_config(yaml.safe_load(yaml.safe_dump(BASE_CONFIG)))
        out = tmp_path / "resolved.yaml"
        config.write_resolved_config(cfg, out)
        back = yaml.safe_load(out.read_text())
        assert back["seed"] == 7
        assert back["variant"]["free"] == ["h0", "n"]
        assert back["priors"]["h0"] == [10.0, 500.0]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    cfg_path = write_config(tmp)
    sim_dir = tmp / "sim"
    rc = cli.main(["simulate", "--config", str(cfg_path), "--out", str(sim_dir)])
    assert rc == cli.EXIT_OK
    return tmp, cfg_path, sim_dir / "demo.csv"


class TestCliSimulateCalibratePredict:
    def test_simulate_output(self, workspace):
        _, _, csv = workspace
        ds = data.load_dataset(csv)
        assert ds.n == 40
        assert ds.specimen_id == "demo"

    def test_calibrate_writes_artifacts(self, workspace):
        tmp, cfg_path, csv = workspace
        out = tmp / "cal"
        rc = cli.main(["calibrate", "--config", str(cfg_path),
                       "--out", str(out), str(csv)])
        # short demo chains may trip diagnostics; both exits are valid runs
        assert rc in (cli.EXIT_OK, cli.EXIT_DIAGNOSTICS)
        assert (out / "chain_0.csv").exists()
        assert (out / "chain_1.csv").exists()
        assert (out / "summary.json").exists()
        assert (out / "diagnostics.txt").exists()
        assert (out / "predictive.csv").exists()
        assert (out / "resolved_config.yaml").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["parameters"]) == {"h0", "n", "sigma_n", "sigma_s",
                                              "length_scale"}

    def test_chain_round_trip(self, workspace):
        tmp, _, _ = workspace
        chain_path = tmp / "cal" / "chain_0.csv"
        chain = cli.load_chain(chain_path)
        assert chain.names == ("h0", "n", "sigma_n", "sigma_s", "length_scale")
        assert chain.samples.shape[0] == len(chain.log_posterior_trace)
        assert 0.0 < chain.acceptance_rate < 1.0

    def test_predict_from_chains(self, workspace):
        tmp, _, csv = workspace
        cfg_path = write_config(tmp, {"datasets": [str(csv)]}, name="predict.yaml")
        out = tmp / "pred"
        rc = cli.main(["predict", "--config", str(cfg_path), "--out", str(out),
                       str(tmp / "cal" / "chain_0.csv")])
        assert rc == cli.EXIT_OK
        rows = (out / "predictive.csv").read_text().splitlines()
        assert rows[0] == "time_days,mean,std"
        body = np.array([r.split(",") for r in rows[1:]], dtype=float)
        assert np.all(body[:, 2] >= 0.0)
        assert np.all(np.diff(body[:, 0]) > 0)

    def test_predict_requires_datasets_key(self, workspace):
        tmp, cfg_path, _ = workspace
        out = tmp / "pred_fail"
        rc = cli.main(["predict", "--config", str(cfg_path), "--out", str(out),
                       str(tmp / "cal" / "chain_0.csv")])
        assert rc == cli.EXIT_CONFIG

    def test_determinism_across_runs(self, workspace):
        tmp, cfg_path, csv = workspace
        out_a = tmp / "rep_a"
        out_b = tmp / "rep_b"
        for out in (out_a, out_b):
            rc = cli.main(["calibrate", "--config", str(cfg_path),
                           "--out", str(out), str(csv)])
            assert rc in (cli.EXIT_OK, cli.EXIT_DIAGNOSTICS)
        assert (out_a / "chain_0.csv").read_text() == (out_b / "chain_0.csv").read_text()
        assert (out_a / "summary.json").read_text() == (out_b / "summary.json").read_text()
        assert (out_a / "predictive.csv").read_text() == (out_b / "predictive.csv").read_text()


class TestCliSensitivity:
    def test_writes_csv(self, tmp_path):
        cfg_path = write_config(
            tmp_path,
            {"sensitivity": {"duration_grid": [1.0, 100.0],
                             "base_sample_size": 512}})
        out = tmp_path / "sens"
        rc = cli.main(["sensitivity", "--config", str(cfg_path), "--out", str(out)])
        assert rc == cli.EXIT_OK
        rows = (out / "sobol.csv").read_text().splitlines()
        assert rows[0] == "duration,parameter,S,ST,SE_S,SE_ST"
        assert len(rows) == 1 + 2 * 3


class TestCliStudy:
    def test_sampling_study(self, tmp_path):
        cfg_path = write_config(tmp_path, {
            "mcmc": {"iterations": 1500, "burn_in": 500, "chains": 2},
            "sampling": {"kind": "logarithmic", "count": 30},
        })
        sim = tmp_path / "sim"
        assert cli.main(["simulate", "--config", str(cfg_path),
                         "--out", str(sim)]) == cli.EXIT_OK
        out = tmp_path / "study"
        rc = cli.main(["study", "sampling", str(sim / "demo.csv"),
                       "--config", str(cfg_path), "--out", str(out)])
        assert rc == cli.EXIT_OK
        report = json.loads((out / "study_sampling.json").read_text())
        labels = {c["case"] for c in report["cases"]}
        assert labels == {"equidistant", "logarithmic"}


class TestCliErrors:
    def test_missing_config_file(self, tmp_path):
        rc = cli.main(["sensitivity", "--config", str(tmp_path / "nope.yaml"),
                       "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_CONFIG

    def test_invalid_yaml(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("environment: [unclosed\n")
        rc = cli.main(["sensitivity", "--config", str(bad),
                       "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_CONFIG

    def test_calibrate_without_datasets(self, tmp_path):
        cfg_path = write_config(tmp_path)
        rc = cli.main(["calibrate", "--config", str(cfg_path),
                       "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_CONFIG

    def test_seed_override(self, tmp_path):
        cfg_path = write_config(tmp_path)
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert cli.main(["simulate", "--config", str(cfg_path), "--out",
                         str(out_a), "--seed", "99"]) == cli.EXIT_OK
        assert cli.main(["simulate", "--config", str(cfg_path), "--out",
                         str(out_b)]) == cli.EXIT_OK
        a = data.load_dataset(out_a / "demo.csv")
        b = data.load_dataset(out_b / "demo.csv")
        assert not np.array_equal(a.values, b.values)
