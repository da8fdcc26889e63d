#!/usr/bin/env python3
"""
Solver Configuration
Validated parameter sets for the three solver families and the benchmark harness.
"""

import hashlib
import json
import os
from typing import Dict, Any, Optional, Type

from dotenv import load_dotenv, dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.models.errors import ConfigError


class SolverConfigBase(BaseModel):
    """Common behaviour of solver configurations."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    time_limit: float = Field(60.0, gt=0, description="Wall-clock budget in seconds")

    def config_hash(self) -> str:
        """Short stable hash of the configuration values."""
        payload = json.dumps(
            {'type': type(self).__name__, **self.model_dump()}, sort_keys=True
        )
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:12]

    def with_overrides(self, overrides: Dict[str, Any]) -> 'SolverConfigBase':
        """Return a validated copy with some fields replaced."""
        if not overrides:
            return self
        try:
            return type(self).model_validate({**self.model_dump(), **overrides})
        except ValidationError as e:
            raise ConfigError(f"Invalid {type(self).__name__} override: {e}") from e


class DingConfig(SolverConfigBase):
    """Parameters of the multiplicative-update solver."""
    delta: float = Field(1e-9, gt=0, description="Denominator guard")
    max_iters: int = Field(1000, ge=1)
    rse_stall_tol: float = Field(1e-8, ge=0, description="Relative RSE change declaring convergence")


class MirzalConfig(SolverConfigBase):
    """Parameters of the modified additive update solver."""
    delta0: float = Field(1e-9, gt=0, description="Initial inner denominator guard")
    step: float = Field(10.0, gt=1, description="Growth factor of the inner guard")
    nu: float = Field(1e-8, gt=0, description="Zero-locking floor")
    max_outer_iters: int = Field(1000, ge=1)
    max_inner_tries: int = Field(64, ge=1)
    stall_tol: float = Field(1e-8, ge=0, description="Relative objective change declaring convergence")


class PGConfig(SolverConfigBase):
    """Parameters of the projected-gradient block-coordinate descent solver."""
    sigma: float = Field(0.001, gt=0, lt=1, description="Armijo sufficient-decrease parameter")
    gamma: float = Field(0.1, gt=0, lt=1, description="Step-size update factor")
    tau: float = Field(0.1, gt=0, lt=1, description="Sub-problem tolerance shrink factor")
    epsilon: float = Field(1e-10, gt=0, description="Global projected-gradient tolerance")
    max_outer_iters: int = Field(1000, ge=1)
    max_inner_iters: int = Field(20, ge=1)
    max_step_trials: int = Field(50, ge=1, description="Cap on step-size trials, growing and shrinking alike")
    min_step: float = Field(1e-20, gt=0)
    max_step: float = Field(1e20, gt=0)

    @classmethod
    def union_preset(cls, **overrides) -> 'PGConfig':
        """Parameters used on uni-orthonormal data."""
        return cls(sigma=0.001, gamma=0.1, tau=0.1, **overrides)

    @classmethod
    def bion_preset(cls, **overrides) -> 'PGConfig':
        """Parameters used on bi-orthonormal data."""
        return cls(sigma=0.001, gamma=0.75, tau=0.5, **overrides)


CONFIG_TYPES: Dict[str, Type[SolverConfigBase]] = {
    'ding': DingConfig,
    'mirzal': MirzalConfig,
    'pg': PGConfig,
}

# --max-iters maps onto a different field per solver
ITERATION_FIELDS = {
    'ding': 'max_iters',
    'mirzal': 'max_outer_iters',
    'pg': 'max_outer_iters',
}


def read_config_file(path: str) -> Dict[str, str]:
    """
    Read a key=value solver configuration file.

    Args:
        path: Path to a dotenv-style file, e.g. lines like ``sigma=0.01`` or ``pg.gamma=0.5``

    Returns:
        Dictionary of raw string values
    """
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")
    values = dotenv_values(path)
    return {key.strip(): value for key, value in values.items() if value is not None}


def overrides_for(algorithm: str, raw: Dict[str, Any]) -> Dict[str, Any]:
    """
    Select the entries of a raw key=value mapping that apply to one solver.

    Bare keys apply to every solver declaring the field; ``alg.key`` applies only to ``alg``.
    """
    if algorithm not in CONFIG_TYPES:
        raise ConfigError(f"Unknown algorithm: {algorithm}")
    fields = CONFIG_TYPES[algorithm].model_fields
    selected = {}
    for key, value in raw.items():
        if '.' in key:
            prefix, name = key.split('.', 1)
            if prefix not in CONFIG_TYPES:
                raise ConfigError(f"Unknown solver prefix in config key: {key}")
            if name not in CONFIG_TYPES[prefix].model_fields:
                raise ConfigError(f"Unknown config key: {key}")
            if prefix == algorithm:
                selected[name] = value
        elif key in fields:
            selected[key] = value
        elif not any(key in cls.model_fields for cls in CONFIG_TYPES.values()):
            raise ConfigError(f"Unknown config key: {key}")
    return selected


class HarnessSettings(BaseModel):
    """Environment-driven defaults for the command-line harness."""
    model_config = ConfigDict(frozen=True)

    output_dir: str = 'output'
    master_seed: int = Field(20240101, ge=0)
    workers: int = Field(1, ge=1)
    log_level: str = 'WARNING'


def load_harness_settings(env_path: Optional[str] = None) -> HarnessSettings:
    """Load harness settings from the environment (and a .env file if present)."""
    load_dotenv(dotenv_path=env_path)
    raw = {
        'output_dir': os.environ.get('ORTHOFACT_OUTPUT_DIR'),
        'master_seed': os.environ.get('ORTHOFACT_MASTER_SEED'),
        'workers': os.environ.get('ORTHOFACT_WORKERS'),
        'log_level': os.environ.get('ORTHOFACT_LOG_LEVEL'),
    }
    try:
        return HarnessSettings.model_validate({k: v for k, v in raw.items() if v})
    except ValidationError as e:
        raise ConfigError(f"Invalid ORTHOFACT_* environment settings: {e}") from e
