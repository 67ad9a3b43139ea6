"""Variance-based sensitivity analysis of the EC 2 creep model.

Saltelli sample design (A, B, A_B^(i)) with first-order indices from the
Saltelli 2010 estimator and total-order indices from the Jansen estimator.
Inputs are independent normals truncated at +/- 4 sigma; the scalar output
is the creep coefficient at each duration of a (log-spaced) grid.
"""

from dataclasses import dataclass, field

import numpy as np

from . import ec2
from .errors import ConfigurationError

PARAMETER_NAMES = ("t0_eff", "h0", "n")

# Default input distributions: means with standard deviations of 10%, 10%
# and 3% of the mean for t0_eff, h0 and n respectively.
DEFAULT_MEANS = (32.5, 50.0, 0.30)
DEFAULT_STDS = (3.25, 5.0, 0.009)

DEFAULT_TRUNCATION = 4.0  # sigmas
BOOTSTRAP_RESAMPLES = 200


def default_duration_grid(num: int = 26) -> np.ndarray:
    """Logarithmic duration grid from 1 to 1e5 days under load."""
    return np.logspace(0.0, 5.0, num)


@dataclass
class SensitivityInputSpec:
    means: tuple = DEFAULT_MEANS
    stds: tuple = DEFAULT_STDS
    duration_grid: np.ndarray = field(default_factory=default_duration_grid)
    base_sample_size: int = 16_384
    seed: int = 0
    truncation: float = DEFAULT_TRUNCATION

    def __post_init__(self):
        self.means = tuple(float(m) for m in self.means)
        self.stds = tuple(float(s) for s in self.stds)
        if len(self.means) != 3 or len(self.stds) != 3:
            raise ConfigurationError("means and stds must cover (t0_eff, h0, n)")
        if min(self.stds) <= 0.0:
            raise ConfigurationError("stds must be > 0")
        self.duration_grid = np.asarray(self.duration_grid, dtype=float)
        if self.duration_grid.ndim != 1 or np.any(self.duration_grid <= 0.0):
            raise ConfigurationError("duration grid must be 1-D and > 0")
        if np.any(np.diff(self.duration_grid) <= 0.0):
            raise ConfigurationError("duration grid must be strictly increasing")
        if self.base_sample_size < 2:
            raise ConfigurationError("base_sample_size must be >= 2")


@dataclass
class SobolResult:
    durations: np.ndarray
    names: tuple
    first_order: np.ndarray  # (3, n_durations)
    total_order: np.ndarray
    se_first: np.ndarray
    se_total: np.ndarray
    degenerate: np.ndarray  # bool per duration: zero output variance

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("duration,parameter,S,ST,SE_S,SE_ST\n")
            for g, d in enumerate(self.durations):
                for i, name in enumerate(self.names):
                    f.write(
                        f"{d!r},{name},{self.first_order[i, g]!r},"
                        f"{self.total_order[i, g]!r},{self.se_first[i, g]!r},"
                        f"{self.se_total[i, g]!r}\n"
                    )


def _truncated_normal(rng, mean, std, size, truncation):
    """Normal draws rejected outside mean +/- truncation*std."""
    out = rng.normal(mean, std, size)
    bad = np.abs(out - mean) > truncation * std
    while np.any(bad):
        out[bad] = rng.normal(mean, std, int(bad.sum()))
        bad = np.abs(out - mean) > truncation * std
    return out


def saltelli_matrices(spec: SensitivityInputSpec):
    """Sample design (A, B, [A_B^(1), A_B^(2), A_B^(3)]), each N x 3."""
    rng = np.random.default_rng(spec.seed)
    n = spec.base_sample_size
    a = np.column_stack(
        [_truncated_normal(rng, m, s, n, spec.truncation) for m, s in zip(spec.means, spec.stds)]
    )
    b = np.column_stack(
        [_truncated_normal(rng, m, s, n, spec.truncation) for m, s in zip(spec.means, spec.stds)]
    )
    ab = []
    for i in range(3):
        m = a.copy()
        m[:, i] = b[:, i]
        ab.append(m)
    return a, b, ab


def estimate_indices(f_a, f_b, f_ab):
    """First/total-order indices from model evaluations on the design.

    f_a, f_b: (N,) outputs on A and B; f_ab: list of (N,) outputs on the
    hybrid matrices.  Returns (S, ST) arrays of length len(f_ab), or None
    when the output variance is zero (flagged gap upstream).
    """
    f_a = np.asarray(f_a, dtype=float)
    f_b = np.asarray(f_b, dtype=float)
    if np.array_equal(f_a, f_b):
        raise ConfigurationError("degenerate design: A and B evaluations coincide")
    n = f_a.size
    pooled = np.concatenate([f_a, f_b])
    var = pooled.var(ddof=1)
    if var == 0.0:
        return None
    # Centering leaves the expectations unchanged but removes the huge
    # variance the first-order estimator picks up when |mean| >> std.
    center = pooled.mean()
    f_a = f_a - center
    f_b = f_b - center
    s = np.array([(f_b * (np.asarray(fi) - center - f_a)).sum() / n / var for fi in f_ab])
    st = np.array([((f_a - (np.asarray(fi) - center)) ** 2).sum() / (2 * n) / var for fi in f_ab])
    return s, st


def bootstrap_se(f_a, f_b, f_ab, rng, resamples=BOOTSTRAP_RESAMPLES):
    """Row-bootstrap standard errors of (S, ST)."""
    n = len(f_a)
    k = len(f_ab)
    s_draws = np.empty((resamples, k))
    st_draws = np.empty((resamples, k))
    f_ab = [np.asarray(fi) for fi in f_ab]
    for r in range(resamples):
        idx = rng.integers(0, n, n)
        est = estimate_indices(f_a[idx], f_b[idx], [fi[idx] for fi in f_ab])
        if est is None:
            s_draws[r] = np.nan
            st_draws[r] = np.nan
        else:
            s_draws[r], st_draws[r] = est
    return np.nanstd(s_draws, axis=0, ddof=1), np.nanstd(st_draws, axis=0, ddof=1)


def _evaluate_design(design, duration, env, beta_h_cap):
    return ec2.creep_coefficient_batch(
        duration, design[:, 0], design[:, 1], design[:, 2], env, beta_h_cap=beta_h_cap
    )


def sobol_indices(spec: SensitivityInputSpec, env: ec2.Environment, beta_h_cap: bool = False) -> SobolResult:
    """First- and total-order indices per duration grid point.

    Deterministic given spec.seed; bootstrap standard errors use a stream
    derived from the same seed.
    """
    a, b, ab = saltelli_matrices(spec)
    boot_rng = np.random.default_rng(spec.seed + 1)
    grid = spec.duration_grid
    shape = (3, grid.size)
    first = np.full(shape, np.nan)
    total = np.full(shape, np.nan)
    se_f = np.full(shape, np.nan)
    se_t = np.full(shape, np.nan)
    degenerate = np.zeros(grid.size, dtype=bool)
    for g, duration in enumerate(grid):
        f_a = _evaluate_design(a, duration, env, beta_h_cap)
        f_b = _evaluate_design(b, duration, env, beta_h_cap)
        f_ab = [_evaluate_design(m, duration, env, beta_h_cap) for m in ab]
        est = estimate_indices(f_a, f_b, f_ab)
        if est is None:
            degenerate[g] = True
            continue
        first[:, g], total[:, g] = est
        se_f[:, g], se_t[:, g] = bootstrap_se(f_a, f_b, f_ab, boot_rng)
    return SobolResult(
        durations=grid,
        names=PARAMETER_NAMES,
        first_order=first,
        total_order=total,
        se_first=se_f,
        se_total=se_t,
        degenerate=degenerate,
    )


def double_loop_indices(model, sampler, coarse_n, rng, dim=3):
    """Brute-force double-loop estimator of S_i and ST_i for one scalar model.

    ``model`` maps an (N, dim) matrix to (N,) outputs; ``sampler(rng, n)``
    draws an (n, dim) input sample.  O(coarse_n**2) model evaluations per
    parameter; test oracle only.
    """
    base = sampler(rng, coarse_n)
    var = model(base).var(ddof=1)
    s = np.empty(dim)
    st = np.empty(dim)
    for i in range(dim):
        cond_means = np.empty(coarse_n)
        for j in range(coarse_n):
            inner = sampler(rng, coarse_n)
            fixed_i = inner.copy()
            fixed_i[:, i] = base[j, i]  # vary the complement, x_i pinned
            cond_means[j] = model(fixed_i).mean()
        s[i] = cond_means.var(ddof=1) / var
        # E[Var(f | x_~i)]: pin complement rows, vary x_i
        tot_vars = np.empty(coarse_n)
        for j in range(coarse_n):
            inner = sampler(rng, coarse_n)
            fixed_rest = np.tile(base[j], (coarse_n, 1))
            fixed_rest[:, i] = inner[:, i]
            tot_vars[j] = model(fixed_rest).var(ddof=1)
        st[i] = tot_vars.mean() / var
    return s, st


def brute_force_indices(spec: SensitivityInputSpec, env: ec2.Environment, coarse_n: int) -> SobolResult:
    """Double-loop Monte Carlo oracle for the EC 2 model (tests only)."""
    if coarse_n > 512:
        raise ConfigurationError("coarse_n must be <= 512 for the double-loop oracle")
    rng = np.random.default_rng(spec.seed)

    def sampler(r, n):
        return np.column_stack(
            [_truncated_normal(r, m, s, n, spec.truncation) for m, s in zip(spec.means, spec.stds)]
        )

    grid = spec.duration_grid
    first = np.full((3, grid.size), np.nan)
    total = np.full((3, grid.size), np.nan)
    for g, duration in enumerate(grid):
        def model(x, _d=duration):
            return ec2.creep_coefficient_batch(_d, x[:, 0], x[:, 1], x[:, 2], env)

        first[:, g], total[:, g] = double_loop_indices(model, sampler, coarse_n, rng)
    zeros = np.zeros_like(first)
    return SobolResult(
        durations=grid,
        names=PARAMETER_NAMES,
        first_order=first,
        total_order=total,
        se_first=zeros,
        se_total=zeros,
        degenerate=np.zeros(grid.size, dtype=bool),
    )
