"""Metropolis-Hastings sampling of the joint creep/kernel posterior.

Random-walk MH with independent Gaussian proposal steps per coordinate.
Chains are deterministic given their seed; multi-chain runs derive chain k's
stream from ``seed + k``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import ec2, gp
from .errors import ConfigurationError, McmcError

DEFAULT_PRIOR_BOUNDS = {
    "t0_eff": (0.0, 100.0),
    "h0": (10.0, 500.0),
    "n": (0.2, 0.5),
    "sigma_n": (0.0, 10.0),
    "sigma_s": (0.0, 100.0),
    "length_scale": (0.0, 1000.0),
}

# Fraction of the prior width used as default proposal standard deviation.
DEFAULT_PROPOSAL_FRACTION = 0.05

# Acceptance-rate window targeted by burn-in adaptation.
ADAPT_TARGET = (0.2, 0.4)
ADAPT_INTERVAL = 200

# Covariance adaptation during burn-in: refresh cadence and history window.
COV_ADAPT_INTERVAL = 1000
COV_ADAPT_WINDOW = 5000

# A parameter "hugs" a bound when samples fall within this fraction of the
# prior width from it; see boundary_mass in diagnostics.
BOUNDARY_BAND = 0.02


@dataclass(frozen=True)
class PriorSet:
    """Independent uniform priors, one (lower, upper) pair per parameter."""

    bounds: dict = field(default_factory=lambda: dict(DEFAULT_PRIOR_BOUNDS))

    def __post_init__(self):
        for name, (lo, hi) in self.bounds.items():
            if not lo < hi:
                raise ConfigurationError(f"prior for {name} must have lower < upper, got ({lo}, {hi})")

    def box(self, names) -> np.ndarray:
        """Bounds as an array of shape (len(names), 2)."""
        missing = [n for n in names if n not in self.bounds]
        if missing:
            raise ConfigurationError(f"no prior bounds for: {missing}")
        return np.array([self.bounds[n] for n in names], dtype=float)

    def in_support(self, theta, names) -> bool:
        box = self.box(names)
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(theta > box[:, 0]) and np.all(theta < box[:, 1]))

    def log_density(self, theta, names) -> float:
        """Sum of uniform log densities; -inf outside the support."""
        if not self.in_support(theta, names):
            return -np.inf
        box = self.box(names)
        return float(-np.sum(np.log(box[:, 1] - box[:, 0])))


@dataclass
class McmcConfig:
    iterations: int = 50_000
    burn_in: int = 20_000
    chains: int = 4
    seed: int = 0
    adapt: bool = True
    thin: int = 1
    proposal_scales: np.ndarray | None = None  # per-coordinate step std
    # Each chain starts at the best of this many uniform prior draws; 1
    # reproduces a plain uniform start.
    init_candidates: int = 64

    def __post_init__(self):
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigurationError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.init_candidates < 1:
            raise ConfigurationError("init_candidates must be >= 1")
        if self.chains < 1:
            raise ConfigurationError("chains must be >= 1")
        if self.thin < 1:
            raise ConfigurationError("thin must be >= 1")
        if self.proposal_scales is not None:
            self.proposal_scales = np.asarray(self.proposal_scales, dtype=float)
            if np.any(self.proposal_scales <= 0.0):
                raise ConfigurationError("proposal_scales must be > 0")


@dataclass
class PosteriorChain:
    """Post-burn-in samples with acceptance bookkeeping."""

    samples: np.ndarray  # (n_retained, dim)
    log_posterior_trace: np.ndarray
    acceptance_rate: float
    seed: int
    names: tuple


@dataclass
class ParameterSummary:
    names: tuple
    mean: np.ndarray
    std: np.ndarray
    correlation: np.ndarray
    degenerate: tuple  # names of zero-variance parameters


@dataclass
class DiagnosticsReport:
    names: tuple
    acceptance_rates: np.ndarray  # per chain
    ess: np.ndarray  # per parameter, pooled over chains
    rhat: np.ndarray | None  # per parameter; None with a single chain
    boundary_mass: np.ndarray | None  # per parameter; None without priors
    flags: list

    @property
    def ok(self) -> bool:
        return not self.flags


def metropolis_hastings(
    log_density,
    x0,
    scales,
    iterations,
    burn_in,
    rng,
    adapt=False,
    thin=1,
):
    """Random-walk MH core. Returns (samples, log_density_trace, acceptance).

    The proposal is a Gaussian step, initially independent per coordinate
    with the given scales.  With ``adapt`` the burn-in phase (only) tunes a
    global step factor towards 20-40% window acceptance and periodically
    re-estimates the proposal covariance from recent burn-in states
    (2.38^2/d scaling); the posterior for the creep problem has a strongly
    correlated h0-n ridge that a diagonal proposal cannot traverse.  The
    proposal is frozen at the end of burn-in so the retained samples target
    the exact stationary distribution.
    """
    x = np.asarray(x0, dtype=float).copy()
    lp = float(log_density(x))
    if not np.isfinite(lp):
        raise ConfigurationError("initial point has zero posterior density")
    scales = np.asarray(scales, dtype=float).copy()
    dim = x.size
    step_chol = np.diag(scales)
    step_factor = 1.0
    history = np.empty((min(burn_in, COV_ADAPT_WINDOW), dim)) if adapt and burn_in else None
    retained = []
    trace = []
    accepted = 0
    window_accepted = 0
    for i in range(iterations):
        proposal = x + step_factor * (step_chol @ rng.standard_normal(dim))
        lp_prop = float(log_density(proposal))
        if np.log(rng.random()) < lp_prop - lp:
            x = proposal
            lp = lp_prop
            accepted += 1
            window_accepted += 1
        if adapt and i < burn_in:
            if history is not None:
                history[i % COV_ADAPT_WINDOW] = x
            if (i + 1) % ADAPT_INTERVAL == 0:
                rate = window_accepted / ADAPT_INTERVAL
                if rate < ADAPT_TARGET[0]:
                    step_factor *= 0.8
                elif rate > ADAPT_TARGET[1]:
                    step_factor *= 1.2
                window_accepted = 0
            if (i + 1) >= COV_ADAPT_INTERVAL and (i + 1) % COV_ADAPT_INTERVAL == 0:
                recent = history[: min(i + 1, COV_ADAPT_WINDOW)]
                cov = np.cov(recent, rowvar=False).reshape(dim, dim)
                cov[np.diag_indices_from(cov)] += 1e-12 * scales**2 + 1e-300
                try:
                    step_chol = np.linalg.cholesky((2.38**2 / dim) * cov)
                except np.linalg.LinAlgError:
                    pass
        if i >= burn_in and (i - burn_in) % thin == 0:
            retained.append(x.copy())
            trace.append(lp)
    acceptance = accepted / iterations
    if accepted == 0:
        raise McmcError(
            "no proposal was accepted over the full run; "
            "reduce proposal_scales or check the target density"
        )
    return np.array(retained), np.array(trace), acceptance


def sample_posterior(dataset, env, variant, priors: PriorSet, config: McmcConfig):
    """MH chains over the joint posterior. Returns a list of PosteriorChain.

    ``dataset=None`` switches the likelihood off and samples the prior box
    alone.  Each chain starts from a uniform draw inside the prior box.
    """
    names = gp.theta_names(variant)
    box = priors.box(names)
    scales = config.proposal_scales
    if scales is None:
        scales = DEFAULT_PROPOSAL_FRACTION * (box[:, 1] - box[:, 0])
    elif scales.shape != (len(names),):
        raise ConfigurationError(f"proposal_scales must have dimension {len(names)}")

    if dataset is None:
        def log_post(theta):
            return priors.log_density(theta, names)
    else:
        evaluator = gp.GPEvaluator(dataset, env, variant)

        def log_post(theta):
            lp = priors.log_density(theta, names)
            if not np.isfinite(lp):
                return -np.inf
            return lp + evaluator.log_marginal_likelihood(theta)

    chains = []
    for k in range(config.chains):
        seed = config.seed + k
        rng = np.random.default_rng(seed)
        draws = box[:, 0] + rng.random((config.init_candidates, len(names))) * (box[:, 1] - box[:, 0])
        x0 = max(draws, key=log_post)
        samples, trace, acceptance = metropolis_hastings(
            log_post,
            x0,
            scales,
            config.iterations,
            config.burn_in,
            rng,
            adapt=config.adapt,
            thin=config.thin,
        )
        chains.append(
            PosteriorChain(
                samples=samples,
                log_posterior_trace=trace,
                acceptance_rate=acceptance,
                seed=seed,
                names=names,
            )
        )
    return chains


def _pool(chains) -> tuple:
    if isinstance(chains, PosteriorChain):
        chains = [chains]
    chains = list(chains)
    if not chains or any(c.samples.shape[0] == 0 for c in chains):
        raise ConfigurationError("summaries need nonempty post-burn-in chains")
    return chains, np.vstack([c.samples for c in chains])


def summarize(chains) -> ParameterSummary:
    """Pooled per-parameter mean, std and correlation matrix.

    Zero-variance parameters get correlation rows/columns of 0 (unit
    diagonal) and appear in ``degenerate``.
    """
    chains, pooled = _pool(chains)
    names = chains[0].names
    mean = pooled.mean(axis=0)
    std = pooled.std(axis=0, ddof=1) if pooled.shape[0] > 1 else np.zeros(pooled.shape[1])
    dim = pooled.shape[1]
    corr = np.eye(dim)
    live = np.where(std > 0.0)[0]
    if live.size >= 2:
        sub = np.corrcoef(pooled[:, live], rowvar=False)
        corr[np.ix_(live, live)] = sub
    degenerate = tuple(names[i] for i in range(dim) if std[i] == 0.0)
    return ParameterSummary(names=names, mean=mean, std=std, correlation=corr, degenerate=degenerate)


def effective_sample_size(x) -> float:
    """Autocorrelation-based ESS of a 1-D chain (Geyer initial positive pairs)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        return float(n)
    x = x - x.mean()
    var = x @ x / n
    if var == 0.0:
        return float(n)
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n].real / n
    rho = acov / acov[0]
    tau = 1.0
    k = 1
    while k + 1 < n:
        pair = rho[k] + rho[k + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
        k += 2
    return float(n / tau)


def split_rhat(sample_sets) -> float:
    """Split-chain potential scale reduction factor for one parameter.

    ``sample_sets`` is a list of 1-D arrays (one per chain); each is split
    in half before the between/within comparison.
    """
    halves = []
    for s in sample_sets:
        s = np.asarray(s, dtype=float)
        mid = s.size // 2
        halves.append(s[:mid])
        halves.append(s[mid : 2 * mid])
    n = min(h.size for h in halves)
    if n < 2:
        return np.nan
    stacked = np.stack([h[:n] for h in halves])
    within = stacked.var(axis=1, ddof=1).mean()
    between = n * stacked.mean(axis=1).var(ddof=1)
    if within == 0.0:
        return 1.0 if between == 0.0 else np.inf
    var_hat = (n - 1) / n * within + between / n
    return float(np.sqrt(var_hat / within))


def boundary_mass(chains, priors: PriorSet) -> np.ndarray:
    """Fraction of pooled samples within 2% of a prior bound, per parameter."""
    chains, pooled = _pool(chains)
    box = priors.box(chains[0].names)
    band = BOUNDARY_BAND * (box[:, 1] - box[:, 0])
    near_low = pooled <= box[:, 0] + band
    near_high = pooled >= box[:, 1] - band
    return (near_low | near_high).mean(axis=0)


def diagnostics(chains, priors: PriorSet | None = None) -> DiagnosticsReport:
    """Acceptance, ESS, split R-hat (>= 2 chains) and boundary-mass flags.

    Flags: ESS < 100, R-hat > 1.05, boundary mass > 10%.
    """
    chains, pooled = _pool(chains)
    names = chains[0].names
    dim = pooled.shape[1]
    acceptance = np.array([c.acceptance_rate for c in chains])
    ess = np.array(
        [sum(effective_sample_size(c.samples[:, j]) for c in chains) for j in range(dim)]
    )
    flags = []
    rhat = None
    if len(chains) >= 2:
        rhat = np.array([split_rhat([c.samples[:, j] for c in chains]) for j in range(dim)])
        for j in range(dim):
            if rhat[j] > 1.05:
                flags.append(f"R-hat {rhat[j]:.3f} > 1.05 for {names[j]}")
    for j in range(dim):
        if ess[j] < 100.0:
            flags.append(f"ESS {ess[j]:.0f} < 100 for {names[j]}")
    bmass = None
    if priors is not None:
        bmass = boundary_mass(chains, priors)
        for j in range(dim):
            if bmass[j] > 0.10:
                flags.append(
                    f"boundary mass {bmass[j]:.0%} for {names[j]}: posterior hugs a prior bound"
                )
    return DiagnosticsReport(
        names=names,
        acceptance_rates=acceptance,
        ess=ess,
        rhat=rhat,
        boundary_mass=bmass,
        flags=flags,
    )


def default_priors() -> PriorSet:
    return PriorSet()


def variant_priors(priors: PriorSet, variant: ec2.ModelVariant) -> np.ndarray:
    """Prior box restricted to a variant's theta coordinates."""
    return priors.box(gp.theta_names(variant))
