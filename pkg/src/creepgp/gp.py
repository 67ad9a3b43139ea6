"""Gaussian Process machinery with the EC 2 creep model as mean function.

The joint parameter vector theta concatenates the variant's free creep
parameters (canonical order t0_eff, h0, n) with the kernel hyperparameters
(sigma_n, sigma_s, length_scale), stored as standard deviations.

All dataset and query times are elapsed days under load (t - t0 >= 0); the
environment's load age converts to absolute concrete age internally.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from . import backend, ec2
from .errors import ConfigurationError, DomainError, NumericalError

HYPERPARAMETER_ORDER = ("sigma_n", "sigma_s", "length_scale")

LOG_2PI = float(np.log(2.0 * np.pi))

# Diagonal jitter, relative to sigma_s**2 + sigma_n**2: start value and
# escalation ceiling (x10 steps).
JITTER_START = 1e-10
JITTER_MAX = 1e-6


@dataclass(frozen=True)
class KernelHyperparameters:
    """SE-kernel hyperparameters, stored as standard deviations."""

    signal_std: float  # sigma_s
    length_scale: float  # l, days
    noise_std: float  # sigma_n

    def __post_init__(self):
        if self.signal_std < 0.0:
            raise DomainError(f"signal_std must be >= 0, got {self.signal_std}")
        if self.length_scale <= 0.0:
            raise DomainError(f"length_scale must be > 0, got {self.length_scale}")
        if self.noise_std < 0.0:
            raise DomainError(f"noise_std must be >= 0, got {self.noise_std}")


@dataclass
class PredictiveDistribution:
    """Per-query-time predictive mean and variance."""

    query_times: np.ndarray  # elapsed days under load
    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        self.query_times = np.asarray(self.query_times, dtype=float)
        self.mean = np.asarray(self.mean, dtype=float)
        self.variance = np.asarray(self.variance, dtype=float)
        if not (self.query_times.shape == self.mean.shape == self.variance.shape):
            raise ConfigurationError("query_times, mean and variance must have equal length")
        if np.any(self.variance < 0.0):
            raise NumericalError("negative predictive variance")

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.variance)


def theta_names(variant: ec2.ModelVariant) -> tuple:
    """Coordinate names of theta for a variant, in storage order."""
    return variant.free + HYPERPARAMETER_ORDER


def split_theta(variant: ec2.ModelVariant, theta):
    """Split a theta vector into (CreepParameters, KernelHyperparameters)."""
    theta = np.asarray(theta, dtype=float)
    dim = variant.n_free + 3
    if theta.shape != (dim,):
        raise ConfigurationError(f"theta must have dimension {dim} for variant {variant.free}, got {theta.shape}")
    params = variant.resolve(theta[: variant.n_free])
    sigma_n, sigma_s, length_scale = theta[variant.n_free :]
    hyper = KernelHyperparameters(signal_std=sigma_s, length_scale=length_scale, noise_std=sigma_n)
    return params, hyper


def kernel_matrix(times_a, times_b, hyper: KernelHyperparameters) -> np.ndarray:
    """Squared-exponential kernel matrix k(a_i, b_j)."""
    ta = np.atleast_1d(np.asarray(times_a, dtype=float))
    tb = np.atleast_1d(np.asarray(times_b, dtype=float))
    sqdist = (ta[:, None] - tb[None, :]) ** 2
    return backend.se_kernel_from_sqdist(
        sqdist, hyper.signal_std**2, 0.5 / hyper.length_scale**2
    )


def _cholesky_with_jitter(a: np.ndarray, scale: float):
    """Cholesky factor of a + jitter*I, escalating jitter x10 on failure.

    scale is sigma_s**2 + sigma_n**2 (1.0 if zero) so the jitter tracks the
    kernel magnitude.  Returns (L, jitter_used).
    """
    scale = scale if scale > 0.0 else 1.0
    n = a.shape[0]
    attempted = []
    jitter = JITTER_START * scale
    ceiling = JITTER_MAX * scale
    while jitter <= ceiling * (1.0 + 1e-12):
        try:
            return np.linalg.cholesky(a + jitter * np.eye(n)), jitter
        except np.linalg.LinAlgError:
            attempted.append(jitter)
            jitter *= 10.0
    raise NumericalError("covariance factorization failed", attempted_jitters=attempted)


class GPEvaluator:
    """Caches dataset-dependent quantities for repeated theta evaluations.

    Immutable after construction; safe for concurrent readers.
    """

    def __init__(self, dataset, env: ec2.Environment, variant: ec2.ModelVariant, beta_h_cap: bool = False):
        self.env = env
        self.variant = variant
        self.beta_h_cap = beta_h_cap
        self.times = np.asarray(dataset.times, dtype=float)
        self.values = np.asarray(dataset.values, dtype=float)
        if self.times.size == 0:
            raise ConfigurationError("dataset must be nonempty")
        self._sqdist = (self.times[:, None] - self.times[None, :]) ** 2
        self._diag = np.diag_indices(self.times.size)

    def mean_vector(self, params: ec2.CreepParameters, times=None) -> np.ndarray:
        t = self.times if times is None else np.asarray(times, dtype=float)
        return ec2.creep_coefficient_elapsed(t, self.env, params, beta_h_cap=self.beta_h_cap)

    def _factorize(self, hyper: KernelHyperparameters):
        k = backend.se_kernel_from_sqdist(self._sqdist, hyper.signal_std**2, 0.5 / hyper.length_scale**2)
        scale = hyper.signal_std**2 + hyper.noise_std**2
        base = scale if scale > 0.0 else 1.0
        jitter = JITTER_START * base
        ceiling = JITTER_MAX * base
        k[self._diag] += hyper.noise_std**2 + jitter
        attempted = []
        while True:
            try:
                return np.linalg.cholesky(k), jitter
            except np.linalg.LinAlgError:
                attempted.append(jitter)
                if jitter * 10.0 > ceiling * (1.0 + 1e-12):
                    raise NumericalError("covariance factorization failed", attempted_jitters=attempted)
                k[self._diag] += 9.0 * jitter  # escalate in place
                jitter *= 10.0

    def log_marginal_likelihood(self, theta) -> float:
        params, hyper = split_theta(self.variant, theta)
        resid = self.values - self.mean_vector(params)
        chol, _ = self._factorize(hyper)
        alpha = cho_solve((chol, True), resid, check_finite=False)
        return float(
            -0.5 * resid @ alpha
            - np.sum(np.log(np.diag(chol)))
            - 0.5 * self.times.size * LOG_2PI
        )

    def posterior_predictive(self, theta, query_times) -> PredictiveDistribution:
        params, hyper = split_theta(self.variant, theta)
        query = np.atleast_1d(np.asarray(query_times, dtype=float))
        resid = self.values - self.mean_vector(params)
        chol, _ = self._factorize(hyper)
        k_star = backend.se_kernel_from_sqdist(
            (query[:, None] - self.times[None, :]) ** 2,
            hyper.signal_std**2,
            0.5 / hyper.length_scale**2,
        )
        mean = self.mean_vector(params, query) + k_star @ cho_solve((chol, True), resid, check_finite=False)
        w = solve_triangular(chol, k_star.T, lower=True, check_finite=False)
        variance = hyper.signal_std**2 - np.sum(w**2, axis=0)
        tol = JITTER_START * max(1.0, hyper.signal_std**2 + hyper.noise_std**2)
        if np.any(variance < -tol):
            raise NumericalError(f"predictive variance below -{tol:g}")
        return PredictiveDistribution(query, mean, np.clip(variance, 0.0, None))


def log_marginal_likelihood(dataset, env, variant, theta) -> float:
    """Log p(y | t, theta) of the noisy GP with creep-model mean."""
    return GPEvaluator(dataset, env, variant).log_marginal_likelihood(theta)


def log_posterior(dataset, env, variant, theta, priors) -> float:
    """Log posterior: marginal likelihood plus independent log priors.

    Returns -inf when theta falls outside the prior support; the dataset
    may be None to sample the prior alone.
    """
    names = theta_names(variant)
    lp = priors.log_density(theta, names)
    if not np.isfinite(lp):
        return -np.inf
    if dataset is None:
        return lp
    return lp + GPEvaluator(dataset, env, variant).log_marginal_likelihood(theta)


def posterior_predictive(dataset, env, variant, theta, query_times) -> PredictiveDistribution:
    """Closed-form GP posterior at the query times for a single theta."""
    return GPEvaluator(dataset, env, variant).posterior_predictive(theta, query_times)


def mixture_indices(chain_length: int, subsample: int) -> np.ndarray:
    """Deterministic evenly spaced thinning indices over a chain."""
    if subsample < 1 or subsample > chain_length:
        raise ConfigurationError(f"subsample must be in [1, {chain_length}], got {subsample}")
    if subsample == 1:
        return np.array([chain_length - 1])
    return np.round(np.linspace(0, chain_length - 1, subsample)).astype(int)


def predictive_mixture(dataset, env, variant, chain, query_times, subsample=None) -> PredictiveDistribution:
    """Monte Carlo posterior-mixture prediction over chain samples.

    Mixture mean is the average of component means; mixture variance
    follows the law of total variance.
    """
    samples = np.asarray(getattr(chain, "samples", chain), dtype=float)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise ConfigurationError("chain must contain at least one sample")
    if subsample is None:
        subsample = samples.shape[0]
    idx = mixture_indices(samples.shape[0], subsample)
    evaluator = GPEvaluator(dataset, env, variant)
    query = np.atleast_1d(np.asarray(query_times, dtype=float))
    means = np.empty((len(idx), query.size))
    variances = np.empty_like(means)
    for row, i in enumerate(idx):
        pred = evaluator.posterior_predictive(samples[i], query)
        means[row] = pred.mean
        variances[row] = pred.variance
    mix_mean = means.mean(axis=0)
    mix_var = (variances + means**2).mean(axis=0) - mix_mean**2
    return PredictiveDistribution(query, mix_mean, np.clip(mix_var, 0.0, None))
