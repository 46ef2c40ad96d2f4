"""Configuration inequalities for networks of independent sources."""

__version__ = "0.1.0"

from .distribution import OutcomeDistribution
from .fis import FractionalWeights, fis_decomposed, fis_family, fis_greedy, fis_optimal, facet_weights, is_valid_fis
from .inequality import ViolationReport, chain_min_check, check_config, expectation_finner, max_violation
from .topology import NetworkTopology, builtin, parse_network

__all__ = [
    "FractionalWeights",
    "NetworkTopology",
    "OutcomeDistribution",
    "ViolationReport",
    "builtin",
    "chain_min_check",
    "check_config",
    "expectation_finner",
    "facet_weights",
    "fis_decomposed",
    "fis_family",
    "fis_greedy",
    "fis_optimal",
    "is_valid_fis",
    "max_violation",
    "parse_network",
]
