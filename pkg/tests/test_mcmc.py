import numpy as np
import pytest

from creepgp import data, ec2, gp, mcmc
from creepgp.errors import ConfigurationError, McmcError

ENV = ec2.Environment(65.0, 38.0, 28.0)
PARAMS = ec2.CreepParameters(32.5, 50.0, 0.34)
HYPER = gp.KernelHyperparameters(0.1, 30.0, 0.05)


class TestPriorSet:
    def test_default_bounds(self):
        p = mcmc.PriorSet()
        assert p.bounds["t0_eff"] == (0.0, 100.0)
        assert p.bounds["h0"] == (10.0, 500.0)
        assert p.bounds["n"] == (0.2, 0.5)
        assert p.bounds["sigma_n"] == (0.0, 10.0)
        assert p.bounds["sigma_s"] == (0.0, 100.0)
        assert p.bounds["length_scale"] == (0.0, 1000.0)

    def test_variant_priors_layout(self):
        v = ec2.ModelVariant(free=("h0", "n"), fixed={"t0_eff": 32.5})
        bounds = mcmc.variant_priors(mcmc.PriorSet(), v)
        np.testing.assert_allclose(
            bounds,
            [(10.0, 500.0), (0.2, 0.5), (0.0, 10.0), (0.0, 100.0), (0.0, 1000.0)],
        )

    def test_invalid_bounds(self):
        with pytest.raises(ConfigurationError):
            mcmc.PriorSet(bounds={"h0": (500.0, 10.0)})


class TestSamplerOnKnownTargets:
    """The core sampler must reproduce analytically known distributions."""

    def test_standard_normal_1d(self):
        rng = np.random.default_rng(0)
        chain, _, rate = mcmc.metropolis_hastings(
            lambda x: -0.5 * float(x[0] ** 2), np.array([3.0]),
            np.array([1.0]), iterations=60000, burn_in=10000, rng=rng, adapt=True)
        assert abs(chain[:, 0].mean()) < 0.05
        assert chain[:, 0].std() == pytest.approx(1.0, abs=0.05)
        assert 0.1 < rate < 0.6

    def test_correlated_gaussian_2d(self):
        cov = np.array([[1.0, 0.9], [0.9, 1.0]])
        prec = np.linalg.inv(cov)

        def logd(x):
            return -0.5 * float(x @ prec @ x)

        rng = np.random.default_rng(1)
        chain, _, _ = mcmc.metropolis_hastings(
            logd, np.zeros(2), np.array([0.5, 0.5]),
            iterations=80000, burn_in=20000, rng=rng, adapt=True)
        emp = np.cov(chain.T)
        np.testing.assert_allclose(emp, cov, atol=0.12)

    def test_uniform_target_stays_in_box(self):
        def logd(x):
            return 0.0 if 0.0 <= x[0] <= 1.0 else -np.inf

        rng = np.random.default_rng(2)
        chain, _, _ = mcmc.metropolis_hastings(
            logd, np.array([0.5]), np.array([0.3]),
            iterations=20000, burn_in=5000, rng=rng, adapt=True)
        assert chain[:, 0].min() >= 0.0 and chain[:, 0].max() <= 1.0
        assert chain[:, 0].mean() == pytest.approx(0.5, abs=0.03)

    def test_zero_acceptance_raises(self):
        def logd(x):
            return 0.0 if abs(x[0]) < 1e-12 else -np.inf

        rng = np.random.default_rng(3)
        with pytest.raises(McmcError):
            mcmc.metropolis_hastings(logd, np.zeros(1), np.array([10.0]),
                                     iterations=3000, burn_in=1000, rng=rng,
                                     adapt=False)

    def test_thinning(self):
        rng = np.random.default_rng(4)
        chain, _, _ = mcmc.metropolis_hastings(
            lambda x: -0.5 * float(x[0] ** 2), np.zeros(1), np.array([1.0]),
            iterations=10000, burn_in=2000, rng=rng, thin=4)
        assert len(chain) == 2000


class TestPriorOnlySampling:
    def test_recovers_uniform_priors(self):
        v = ec2.ModelVariant(free=("h0", "n"), fixed={"t0_eff": 32.5})
        priors = mcmc.PriorSet()
        cfg = mcmc.McmcConfig(iterations=40000, burn_in=10000, chains=2, seed=0)
        chains = mcmc.sample_posterior(None, ENV, v, priors, cfg)
        s = mcmc.summarize(chains)
        # uniform(a, b): mean (a+b)/2, std (b-a)/sqrt(12)
        assert s.mean[0] == pytest.approx(255.0, rel=0.10)
        assert s.std[0] == pytest.approx(490.0 / np.sqrt(12.0), rel=0.15)
        assert s.mean[1] == pytest.approx(0.35, rel=0.05)


@pytest.fixture(scope="module")
def chains():
    ds = data.synthesize(ENV, PARAMS, HYPER,
                         data.SamplingScheme("logarithmic", 60), seed=4)
    v = ec2.ModelVariant(free=("h0", "n"), fixed={"t0_eff": 32.5})
    cfg = mcmc.McmcConfig(iterations=8000, burn_in=3000, chains=2, seed=1,
                          init_candidates=64)
    return mcmc.sample_posterior(ds, ENV, v, mcmc.PriorSet(), cfg)


class TestSamplePosterior:
    def test_shapes_and_names(self, chains):
        assert len(chains) == 2
        for c in chains:
            assert c.samples.shape == (5000, 5)
            assert c.names == ("h0", "n", "sigma_n", "sigma_s", "length_scale")
            assert len(c.log_posterior_trace) == 5000
            assert 0.0 < c.acceptance_rate < 1.0

    def test_deterministic_given_seed(self, chains):
        ds = data.synthesize(ENV, PARAMS, HYPER,
                             data.SamplingScheme("logarithmic", 60), seed=4)
        v = ec2.ModelVariant(free=("h0", "n"), fixed={"t0_eff": 32.5})
        cfg = mcmc.McmcConfig(iterations=8000, burn_in=3000, chains=2, seed=1,
                              init_candidates=64)
        again = mcmc.sample_posterior(ds, ENV, v, mcmc.PriorSet(), cfg)
        np.testing.assert_array_equal(chains[0].samples, again[0].samples)

    def test_chains_differ_across_seeds(self, chains):
        assert not np.array_equal(chains[0].samples, chains[1].samples)

    def test_samples_respect_prior_support(self, chains):
        bounds = mcmc.variant_priors(mcmc.PriorSet(),
                                     ec2.ModelVariant(free=("h0", "n"),
                                                      fixed={"t0_eff": 32.5}))
        pooled = np.vstack([c.samples for c in chains])
        assert np.all(pooled >= bounds[:, 0]) and np.all(pooled <= bounds[:, 1])

    def test_summary_fields(self, chains):
        s = mcmc.summarize(chains)
        assert s.mean.shape == (5,) and s.std.shape == (5,)
        assert s.correlation.shape == (5, 5)
        np.testing.assert_allclose(np.diag(s.correlation), 1.0, atol=1e-12)


class TestDiagnostics:
    def test_ess_iid(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(4000)
        ess = mcmc.effective_sample_size(x)
        assert ess == pytest.approx(4000, rel=0.25)

    def test_ess_correlated(self):
        # AR(1) with coefficient rho: ESS ~ N * (1 - rho) / (1 + rho)
        rng = np.random.default_rng(1)
        rho = 0.9
        n = 20000
        x = np.empty(n)
        x[0] = 0.0
        eps = rng.standard_normal(n)
        for i in range(1, n):
            x[i] = rho * x[i - 1] + eps[i]
        ess = mcmc.effective_sample_size(x)
        assert ess == pytest.approx(n * (1 - rho) / (1 + rho), rel=0.3)

    def test_rhat_identical_chains(self):
        rng = np.random.default_rng(2)
        chains = [rng.standard_normal(2000) for _ in range(3)]
        r = mcmc.split_rhat(chains)
        assert r == pytest.approx(1.0, abs=0.02)

    def test_rhat_detects_disagreement(self):
        rng = np.random.default_rng(3)
        chains = [rng.standard_normal(2000), rng.standard_normal(2000) + 5.0]
        assert mcmc.split_rhat(chains) > 2.0

    def test_boundary_mass(self):
        samples = np.concatenate([np.full(900, 250.0), np.full(100, 499.9)])
        chain = mcmc.PosteriorChain(samples=samples[:, None],
                                    log_posterior_trace=np.zeros(1000),
                                    acceptance_rate=0.3, seed=0, names=("h0",))
        frac = mcmc.boundary_mass([chain], mcmc.PriorSet())
        assert frac[0] == pytest.approx(0.1, abs=1e-12)

    def test_diagnostics_report_flags(self):
        # Two wildly disagreeing pseudo-chains must trip the R-hat flag.
        names = ("h0", "n", "sigma_n", "sigma_s", "length_scale")
        rng = np.random.default_rng(4)
        a = rng.uniform(0.0, 1.0, (2000, 5)) + np.array([50, 0.3, 0.05, 0.1, 30.0])
        b = a + np.array([200.0, 0.0, 0.0, 0.0, 0.0])
        chains = [
            mcmc.PosteriorChain(samples=s, log_posterior_trace=np.zeros(len(s)),
                                acceptance_rate=0.3, seed=i, names=names)
            for i, s in enumerate((a, b))
        ]
        report = mcmc.diagnostics(chains, mcmc.PriorSet())
        assert report.rhat.max() > 1.05
        assert any("rhat" in f.lower() or "r-hat" in f.lower() for f in report.flags)
