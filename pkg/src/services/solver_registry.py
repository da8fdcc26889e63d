#!/usr/bin/env python3
"""
Solver Registry
Maps algorithm names to solver functions and their default configurations.
"""

from typing import Any, Callable, Dict, Optional

from src.models.errors import ConfigError
from src.models.factorization_models import (
    FactorPair, InstanceKind, ProblemSpec, SolveReport
)
from src.models.solver_config import (
    CONFIG_TYPES, ITERATION_FIELDS, DingConfig, MirzalConfig, PGConfig, SolverConfigBase,
    overrides_for
)
from src.services.ding_solver import solve_ding
from src.services.mirzal_solver import solve_mirzal
from src.services.pg_solver import solve_pg

SOLVERS: Dict[str, Callable[..., SolveReport]] = {
    'ding': solve_ding,
    'mirzal': solve_mirzal,
    'pg': solve_pg,
}


def default_config(algorithm: str, kind: InstanceKind = InstanceKind.UNION) -> SolverConfigBase:
    """Default configuration of an algorithm, using the dataset preset for PG."""
    if algorithm == 'ding':
        return DingConfig()
    if algorithm == 'mirzal':
        return MirzalConfig()
    if algorithm == 'pg':
        return PGConfig.bion_preset() if InstanceKind(kind) is InstanceKind.BION else PGConfig.union_preset()
    raise ConfigError(f"Unknown algorithm: {algorithm}")


def build_config(algorithm: str, kind: InstanceKind = InstanceKind.UNION,
                 file_values: Optional[Dict[str, Any]] = None,
                 time_limit: Optional[float] = None,
                 max_iters: Optional[int] = None) -> SolverConfigBase:
    """
    Assemble a solver configuration from defaults, a config file and CLI flags.

    Args:
        algorithm: 'ding', 'mirzal' or 'pg'
        kind: Dataset kind selecting the PG preset
        file_values: Raw key=value pairs read from a config file
        time_limit: Optional --time-limit override
        max_iters: Optional --max-iters override

    Returns:
        Validated configuration
    """
    cfg = default_config(algorithm, kind)
    overrides = overrides_for(algorithm, file_values or {})
    if time_limit is not None:
        overrides['time_limit'] = time_limit
    if max_iters is not None:
        overrides[ITERATION_FIELDS[algorithm]] = max_iters
    return cfg.with_overrides(overrides)


def run_solver(algorithm: str, spec: ProblemSpec, cfg: SolverConfigBase, init: FactorPair) -> SolveReport:
    """Dispatch to the named solver."""
    if algorithm not in SOLVERS:
        raise ConfigError(f"Unknown algorithm: {algorithm}")
    if not isinstance(cfg, CONFIG_TYPES[algorithm]):
        raise ConfigError(f"{algorithm} expects {CONFIG_TYPES[algorithm].__name__}, got {type(cfg).__name__}")
    return SOLVERS[algorithm](spec, cfg, init)
