"""Conditional copulas with sum-of-trees parameter models and an adaptive RJ-MCMC sampler."""

from .copulas import CopulaDomainError, CopulaModel, Family, pseudo_observations
from .data import Dataset
from .sampler import ChainTrace, HyperParams, SamplerConfig, run_chain
from .tree import DecisionTree, LossPrior

__all__ = [
    "ChainTrace",
    "CopulaDomainError",
    "CopulaModel",
    "Dataset",
    "DecisionTree",
    "Family",
    "HyperParams",
    "LossPrior",
    "SamplerConfig",
    "pseudo_observations",
    "run_chain",
]

__version__ = "0.1.0"
