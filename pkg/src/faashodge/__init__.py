"""Hodge decomposition of serverless invocation flows with learned edge metrics."""

from .complex import CellComplex, ComplexError, IncidenceMatrices, build_complex, incidence_matrices, load_complex
from .hodge import BettiNumbers, HodgeDecomposition, betti, hodge_decompose, laplacians, spectrum
from .metric_learning import MetricLearningConfig, MetricLearningTrace, cost_functional, learn_metric, metric_update

__version__ = "0.1.0"

__all__ = [
    "BettiNumbers",
    "CellComplex",
    "ComplexError",
    "HodgeDecomposition",
    "IncidenceMatrices",
    "MetricLearningConfig",
    "MetricLearningTrace",
    "betti",
    "build_complex",
    "cost_functional",
    "hodge_decompose",
    "incidence_matrices",
    "laplacians",
    "learn_metric",
    "load_complex",
    "metric_update",
    "spectrum",
]
