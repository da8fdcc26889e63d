"""Data models for orthogonal non-negative matrix factorization."""

from src.models.factorization_models import FactorPair, InstanceTriple, NonNegMatrix, ProblemSpec, SolveReport
from src.models.solver_config import DingConfig, MirzalConfig, PGConfig
from src.models.experiment_models import BenchmarkRow, ExperimentGrid

__all__ = [
    'NonNegMatrix', 'FactorPair', 'ProblemSpec', 'InstanceTriple', 'SolveReport',
    'DingConfig', 'MirzalConfig', 'PGConfig', 'ExperimentGrid', 'BenchmarkRow',
]
