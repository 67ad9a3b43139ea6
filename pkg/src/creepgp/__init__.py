"""Bayesian calibration of the Eurocode 2 creep model.

A physics-informed Gaussian Process (creep model as mean function) is fitted
to creep-test time series with Metropolis-Hastings MCMC; variance-based
sensitivity analysis and study harnesses for sampling structure, test
duration and preload intensity build on the same core.
"""

from .backend import BACKEND
from .data import CreepDataset, SamplingScheme
from .ec2 import (
    AlphaFactors,
    CreepParameters,
    Environment,
    ModelVariant,
    creep_coefficient,
)
from .gp import KernelHyperparameters, PredictiveDistribution
from .mcmc import McmcConfig, PosteriorChain, PriorSet

__version__ = "0.1.0"

__all__ = [
    "AlphaFactors",
    "BACKEND",
    "CreepDataset",
    "CreepParameters",
    "Environment",
    "KernelHyperparameters",
    "McmcConfig",
    "ModelVariant",
    "PosteriorChain",
    "PredictiveDistribution",
    "PriorSet",
    "SamplingScheme",
    "creep_coefficient",
    "__version__",
]
