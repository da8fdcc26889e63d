#!/usr/bin/env python3
"""
Factorization Data Models
Data classes for orthogonal non-negative matrix factorization problems and results.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Dict, Any
import json

import numpy as np

from src.models.errors import DimensionMismatchError, NegativeEntryError


class OrthogonalityMode(str, Enum):
    """Which factors carry the orthogonality penalty."""
    UNI = 'uni'  # columns of G
    BI = 'bi'    # columns of G and rows of H


class InstanceKind(str, Enum):
    """Synthetic dataset families."""
    UNION = 'UNION'
    BION = 'BION'

    @property
    def file_token(self) -> str:
        """Token used in instance file names."""
        return 'BIOG' if self is InstanceKind.BION else 'UNION'

    @property
    def mode(self) -> OrthogonalityMode:
        """Orthogonality mode a solver should use on this dataset."""
        return OrthogonalityMode.BI if self is InstanceKind.BION else OrthogonalityMode.UNI


class Termination(str, Enum):
    """Reason a solver run stopped."""
    TOLERANCE = 'tolerance'
    STALL = 'stall'
    MAX_ITERS = 'max_iters'
    TIME_LIMIT = 'time_limit'
    ERROR = 'error'


def as_float_matrix(data: Any) -> np.ndarray:
    """Coerce matrix-like input to a 2-D float64 array."""
    if isinstance(data, NonNegMatrix):
        return data.data
    array = np.asarray(data, dtype=np.float64)
    if array.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2-D matrix, got {array.ndim} dimension(s)")
    return array


@dataclass
class NonNegMatrix:
    """Dense row-major float64 matrix whose entries are all non-negative."""
    data: np.ndarray

    def __post_init__(self):
        self.data = np.ascontiguousarray(as_float_matrix(self.data))
        rows, cols = self.data.shape
        if rows < 1 or cols < 1:
            raise DimensionMismatchError(f"Matrix must have at least one row and column, got {rows}x{cols}")
        if np.isnan(self.data).any():
            raise NegativeEntryError("Matrix contains NaN entries")
        if (self.data < 0).any():
            raise NegativeEntryError(f"Matrix has negative entries (min {self.data.min():.3e})")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            'rows': self.rows,
            'cols': self.cols,
            'data': self.data.ravel().tolist()
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'NonNegMatrix':
        """Create from dictionary."""
        values = np.asarray(data['data'], dtype=np.float64)
        return cls(values.reshape(data['rows'], data['cols']))


@dataclass
class FactorPair:
    """Basis matrix G (m x p) and coefficient matrix H (p x n)."""
    G: NonNegMatrix
    H: NonNegMatrix

    def __post_init__(self):
        if not isinstance(self.G, NonNegMatrix):
            self.G = NonNegMatrix(self.G)
        if not isinstance(self.H, NonNegMatrix):
            self.H = NonNegMatrix(self.H)
        if self.G.cols != self.H.rows:
            raise DimensionMismatchError(
                f"G is {self.G.rows}x{self.G.cols} but H is {self.H.rows}x{self.H.cols}"
            )

    @property
    def inner_dimension(self) -> int:
        return self.G.cols

    def arrays(self) -> tuple:
        """Return (G, H) as plain arrays."""
        return self.G.data, self.H.data


@dataclass
class ProblemSpec:
    """A penalized orthogonal NMF problem: data R, inner dimension p, penalties."""
    R: NonNegMatrix
    p: int
    mode: OrthogonalityMode = OrthogonalityMode.UNI
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not isinstance(self.R, NonNegMatrix):
            self.R = NonNegMatrix(self.R)
        self.mode = OrthogonalityMode(self.mode)
        if self.p < 1 or self.p > min(self.R.rows, self.R.cols):
            raise DimensionMismatchError(
                f"Inner dimension p={self.p} must lie in [1, {min(self.R.rows, self.R.cols)}]"
            )
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(f"Penalty parameters must be non-negative (alpha={self.alpha}, beta={self.beta})")
        # alpha only weighs the H penalty of the bi-orthogonal problem
        if self.mode is OrthogonalityMode.UNI:
            self.alpha = 0.0

    @property
    def m(self) -> int:
        return self.R.rows

    @property
    def n(self) -> int:
        return self.R.cols

    def check_factors(self, fp: FactorPair) -> None:
        """Raise if the factor pair does not conform with this problem."""
        if fp.G.shape != (self.m, self.p) or fp.H.shape != (self.p, self.n):
            raise DimensionMismatchError(
                f"Factors {fp.G.shape} / {fp.H.shape} do not conform with R {self.R.shape} and p={self.p}"
            )


@dataclass
class InstanceTriple:
    """A synthetic instance R = G_true H_true together with its provenance."""
    R: NonNegMatrix
    G_true: Optional[NonNegMatrix]
    H_true: Optional[NonNegMatrix]
    n: int
    k: int
    id: int
    kind: InstanceKind
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary (metadata only)."""
        return {
            'kind': self.kind.value,
            'n': self.n,
            'k': self.k,
            'id': self.id,
            'seed': self.seed,
            'shape': list(self.R.shape)
        }


@dataclass
class SolveReport:
    """
    Outcome of one solver run.

    ``termination`` gives why the run stopped. Inner-loop trouble that did not stop
    the run is counted in ``flags``:

    - ``delta_growth_exhausted``: a Mirzal block update ran out of damping tries
      and kept its last candidate
    - ``line_search_stalled``: a projected-gradient sub-solve found no Armijo step
    """
    algorithm: str
    factors: FactorPair
    alpha: float
    beta: float
    termination: Termination
    iterations: int
    wall_seconds: float
    rse_trace: List[float] = field(default_factory=list)
    infeas_trace: List[float] = field(default_factory=list)
    objective_trace: List[float] = field(default_factory=list)
    flags: Dict[str, int] = field(default_factory=dict)

    @property
    def final_rse(self) -> float:
        return self.rse_trace[-1]

    @property
    def final_infeas(self) -> float:
        return self.infeas_trace[-1]

    @property
    def final_objective(self) -> float:
        return self.objective_trace[-1]

    def to_dict(self, include_traces: bool = False) -> Dict[str, Any]:
        """Convert to dictionary."""
        result = {
            'algorithm': self.algorithm,
            'alpha': self.alpha,
            'beta': self.beta,
            'final_rse': self.final_rse,
            'final_infeas': self.final_infeas,
            'final_objective': self.final_objective,
            'iterations': self.iterations,
            'wall_seconds': self.wall_seconds,
            'termination': self.termination.value,
            'flags': dict(self.flags)
        }
        if include_traces:
            result['rse_trace'] = list(self.rse_trace)
            result['infeas_trace'] = list(self.infeas_trace)
            result['objective_trace'] = list(self.objective_trace)
        return result

    def to_json(self, include_traces: bool = False) -> str:
        """Convert to JSON string."""
        return json.dumps(self.to_dict(include_traces=include_traces))
