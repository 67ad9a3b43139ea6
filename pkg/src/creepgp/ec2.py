"""Eurocode 2 creep coefficient model.

All operations are pure functions of their arguments.  The creep coefficient
is the product of a notional (asymptotic) value phi0 and a hyperbolic time
progression controlled by beta_H and the exponent n:

    phi(t, t0) = phi0 * ((t - t0) / (beta_H + t - t0))**n

with phi0 = phi_RH * beta_fcm * beta_t0.  Strength-correction factors
alpha_1..3 = (35/f_cm)**(0.7, 0.2, 0.5) apply only for f_cm > 35 MPa.
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import ConfigurationError, DomainError

# Canonical ordering of the calibratable creep parameters; parameter vectors
# everywhere in the package list free parameters in this order.
FREE_PARAMETER_ORDER = ("t0_eff", "h0", "n")

# EC 2 prescribed defaults for parameters left out of a calibration.
EC2_DEFAULT_N = 0.3


@dataclass(frozen=True)
class Environment:
    """Fixed test environment: humidity, strength and age at loading."""

    relative_humidity: float  # RH in percent, 0 < RH <= 100
    mean_compressive_strength: float  # f_cm in MPa
    load_age: float  # t0 in days, actual age at creep-load application

    def __post_init__(self):
        if not 0.0 < self.relative_humidity <= 100.0:
            raise DomainError(f"relative_humidity must be in (0, 100], got {self.relative_humidity}")
        if self.mean_compressive_strength <= 0.0:
            raise DomainError(f"mean_compressive_strength must be > 0, got {self.mean_compressive_strength}")
        if self.load_age <= 0.0:
            raise DomainError(f"load_age must be > 0, got {self.load_age}")


@dataclass(frozen=True)
class CreepParameters:
    """The three calibratable model parameters."""

    t0_eff: float  # effective concrete age, days
    h0: float  # effective thickness, mm
    n: float  # progression exponent

    def __post_init__(self):
        if self.t0_eff <= 0.0:
            raise DomainError(f"t0_eff must be > 0, got {self.t0_eff}")
        if self.h0 <= 0.0:
            raise DomainError(f"h0 must be > 0, got {self.h0}")
        if not 0.0 < self.n < 1.0:
            raise DomainError(f"n must be in (0, 1), got {self.n}")


@dataclass(frozen=True)
class AlphaFactors:
    """Strength-correction factors for high-strength concrete."""

    alpha1: float = 1.0
    alpha2: float = 1.0
    alpha3: float = 1.0

    def __post_init__(self):
        if min(self.alpha1, self.alpha2, self.alpha3) <= 0.0:
            raise DomainError("alpha factors must be strictly positive")


def alpha_factors(f_cm: float) -> AlphaFactors:
    """Alpha factors for a given strength; all 1 when f_cm <= 35 MPa."""
    if f_cm <= 0.0:
        raise DomainError(f"f_cm must be > 0, got {f_cm}")
    if f_cm <= 35.0:
        return AlphaFactors()
    r = 35.0 / f_cm
    return AlphaFactors(r**0.7, r**0.2, r**0.5)


@dataclass(frozen=True)
class ModelVariant:
    """Which creep parameters are calibrated and which stay fixed.

    ``free`` lists a nonempty subset of FREE_PARAMETER_ORDER (stored in
    canonical order); ``fixed`` maps exactly the complement to values.
    """

    free: tuple
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        free = tuple(p for p in FREE_PARAMETER_ORDER if p in self.free)
        unknown = set(self.free) - set(FREE_PARAMETER_ORDER)
        if unknown:
            raise ConfigurationError(f"unknown free parameters: {sorted(unknown)}")
        if not free:
            raise ConfigurationError("at least one free parameter is required")
        object.__setattr__(self, "free", free)
        expected_fixed = set(FREE_PARAMETER_ORDER) - set(free)
        if set(self.fixed) != expected_fixed:
            raise ConfigurationError(
                f"fixed values must cover exactly {sorted(expected_fixed)}, got {sorted(self.fixed)}"
            )

    @property
    def n_free(self) -> int:
        return len(self.free)

    def resolve(self, free_values) -> CreepParameters:
        """Merge free values (canonical order) with the fixed ones."""
        free_values = np.atleast_1d(np.asarray(free_values, dtype=float))
        if free_values.shape != (len(self.free),):
            raise ConfigurationError(
                f"expected {len(self.free)} free values for {self.free}, got {free_values.shape}"
            )
        merged = dict(self.fixed)
        merged.update(zip(self.free, free_values))
        return CreepParameters(**{k: float(merged[k]) for k in FREE_PARAMETER_ORDER})


def resolve_parameters(variant: ModelVariant, free_values) -> CreepParameters:
    return variant.resolve(free_values)


def beta_fcm(f_cm: float) -> float:
    """Strength factor 16.8 / sqrt(f_cm)."""
    if f_cm <= 0.0:
        raise DomainError(f"f_cm must be > 0, got {f_cm}")
    return 16.8 / np.sqrt(f_cm)


def beta_t0(t0_eff: float) -> float:
    """Age-at-loading factor 1 / (0.1 + t0_eff**0.2)."""
    if t0_eff <= 0.0:
        raise DomainError(f"t0_eff must be > 0, got {t0_eff}")
    return 1.0 / (0.1 + t0_eff**0.2)


def phi_rh(relative_humidity: float, h0: float, alpha: AlphaFactors = AlphaFactors()) -> float:
    """Humidity factor (1 + (1 - RH/100) / (0.1 * h0**(1/3)) * a1) * a2."""
    if not 0.0 < relative_humidity <= 100.0:
        raise DomainError(f"relative_humidity must be in (0, 100], got {relative_humidity}")
    if h0 <= 0.0:
        raise DomainError(f"h0 must be > 0, got {h0}")
    dry = (1.0 - relative_humidity / 100.0) / (0.1 * h0 ** (1.0 / 3.0))
    return (1.0 + dry * alpha.alpha1) * alpha.alpha2


def beta_h(
    relative_humidity: float,
    h0: float,
    alpha: AlphaFactors = AlphaFactors(),
    cap: bool = False,
) -> float:
    """Progression parameter 1.5 * (1 + (0.012*RH)**18) * h0 + 250 * a3, days.

    With ``cap`` the code-compliance ceiling of 1500 * a3 is applied;
    default is the uncapped closed form.
    """
    if not 0.0 < relative_humidity <= 100.0:
        raise DomainError(f"relative_humidity must be in (0, 100], got {relative_humidity}")
    if h0 <= 0.0:
        raise DomainError(f"h0 must be > 0, got {h0}")
    value = 1.5 * (1.0 + (0.012 * relative_humidity) ** 18) * h0 + 250.0 * alpha.alpha3
    if cap:
        value = min(value, 1500.0 * alpha.alpha3)
    return value


def phi_notional(env: Environment, params: CreepParameters) -> float:
    """Asymptotic creep coefficient phi0 = phi_RH * beta_fcm * beta_t0."""
    alpha = alpha_factors(env.mean_compressive_strength)
    return (
        phi_rh(env.relative_humidity, params.h0, alpha)
        * beta_fcm(env.mean_compressive_strength)
        * beta_t0(params.t0_eff)
    )


def creep_coefficient(t, env: Environment, params: CreepParameters, beta_h_cap: bool = False):
    """Creep coefficient at absolute concrete age(s) t >= t0.

    Accepts a scalar or array of ages; returns the same shape.
    """
    t = np.asarray(t, dtype=float)
    elapsed = t - env.load_age
    if np.any(elapsed < 0.0):
        raise DomainError(f"t must be >= load_age {env.load_age}")
    return creep_coefficient_elapsed(elapsed, env, params, beta_h_cap=beta_h_cap)


def creep_coefficient_elapsed(elapsed, env: Environment, params: CreepParameters, beta_h_cap: bool = False):
    """Creep coefficient from elapsed days under load (t - t0 >= 0)."""
    elapsed = np.asarray(elapsed, dtype=float)
    if np.any(elapsed < 0.0):
        raise DomainError("elapsed time under load must be >= 0")
    alpha = alpha_factors(env.mean_compressive_strength)
    phi0 = phi_notional(env, params)
    bh = beta_h(env.relative_humidity, params.h0, alpha, cap=beta_h_cap)
    out = backend.creep_curve(np.atleast_1d(elapsed), phi0, bh, params.n)
    if elapsed.ndim == 0:
        return float(out[0])
    return out


def creep_coefficient_batch(duration, t0_eff, h0, n, env: Environment, beta_h_cap: bool = False):
    """Vectorized creep coefficient over arrays of parameter values.

    ``duration`` is a scalar elapsed time under load; t0_eff, h0, n are
    broadcastable arrays.  Used by the sensitivity analysis, where every
    sample row carries its own parameter triple.
    """
    if duration < 0.0:
        raise DomainError("duration must be >= 0")
    t0_eff = np.asarray(t0_eff, dtype=float)
    h0 = np.asarray(h0, dtype=float)
    n = np.asarray(n, dtype=float)
    alpha = alpha_factors(env.mean_compressive_strength)
    rh = env.relative_humidity
    dry = (1.0 - rh / 100.0) / (0.1 * h0 ** (1.0 / 3.0))
    phi0 = (
        (1.0 + dry * alpha.alpha1)
        * alpha.alpha2
        * (16.8 / np.sqrt(env.mean_compressive_strength))
        / (0.1 + t0_eff**0.2)
    )
    bh = 1.5 * (1.0 + (0.012 * rh) ** 18) * h0 + 250.0 * alpha.alpha3
    if beta_h_cap:
        bh = np.minimum(bh, 1500.0 * alpha.alpha3)
    return phi0 * (duration / (bh + duration)) ** n
