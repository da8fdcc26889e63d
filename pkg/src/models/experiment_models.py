#!/usr/bin/env python3
"""
Experiment Data Models
Grid definitions and result rows for benchmark sweeps.
"""

from dataclasses import dataclass, field
from typing import List, Dict, Any, Iterator, NamedTuple
import math

from src.models.errors import ConfigError
from src.models.factorization_models import InstanceKind

ALGORITHMS = ('ding', 'mirzal', 'pg')

RAW_COLUMNS = [
    'kind', 'n', 'k', 'p', 'replicate', 'seed', 'alg', 'alpha', 'beta',
    'final_rse', 'final_infeas', 'iters', 'wall_seconds', 'termination',
    'k_frac', 'p_frac', 'master_seed', 'config_hash',
]

AGGREGATE_COLUMNS = [
    'kind', 'n', 'k_fractions', 'mean_k', 'p_frac', 'alg', 'alpha', 'beta',
    'mean_rse', 'mean_infeas', 'mean_iters', 'mean_wall_seconds', 'count', 'errors',
]


class InstanceKey(NamedTuple):
    """Coordinates and seed of one generated instance."""
    n: int
    k: int
    k_frac: float
    replicate: int
    seed: int


@dataclass
class ExperimentCell:
    """One solve of a sweep: an instance, an inner dimension, an algorithm and penalties."""
    kind: InstanceKind
    n: int
    k: int
    k_frac: float
    p: int
    p_frac: float
    replicate: int
    instance_seed: int
    init_seed: int
    alg: str
    alpha: float
    beta: float


@dataclass
class ExperimentGrid:
    """Cartesian sweep over sizes, inner dimensions, penalties and algorithms."""
    ns: List[int]
    k_fractions: List[float] = field(default_factory=lambda: [0.2, 0.4])
    p_fractions: List[float] = field(default_factory=lambda: [0.2, 0.4, 0.6, 0.8, 1.0])
    betas: List[float] = field(default_factory=lambda: [1.0, 10.0, 100.0, 1000.0])
    algorithms: List[str] = field(default_factory=lambda: list(ALGORITHMS))
    kind: InstanceKind = InstanceKind.UNION
    replicates: int = 5
    master_seed: int = 20240101

    def __post_init__(self):
        self.kind = InstanceKind(self.kind)
        for name in ('ns', 'k_fractions', 'p_fractions', 'betas', 'algorithms'):
            if not getattr(self, name):
                raise ConfigError(f"Experiment grid needs a non-empty '{name}' list")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"Unknown algorithm(s): {', '.join(unknown)}")
        if any(not (0 < f <= 1) for f in self.p_fractions):
            raise ConfigError(f"p fractions must lie in (0, 1], got {self.p_fractions}")
        if any(not (0 < f <= 0.5) for f in self.k_fractions):
            raise ConfigError(f"k fractions must lie in (0, 0.5], got {self.k_fractions}")
        if any(b < 0 for b in self.betas):
            raise ConfigError(f"Penalty parameters must be non-negative, got {self.betas}")
        if self.replicates < 1:
            raise ConfigError("replicates must be at least 1")

    @staticmethod
    def inner_dimension(k: int, p_frac: float) -> int:
        return max(1, int(round(p_frac * k)))

    @staticmethod
    def construction_rank(n: int, k_frac: float) -> int:
        return max(1, int(round(k_frac * n)))

    def instances(self) -> Iterator[InstanceKey]:
        """Enumerate the instances the grid is run on, with their seeds."""
        from src.services.solver_common import derive_seed

        for n in self.ns:
            for k_frac in self.k_fractions:
                k = self.construction_rank(n, k_frac)
                for replicate in range(1, self.replicates + 1):
                    seed = derive_seed(self.master_seed, self.kind.value, n, k, replicate)
                    yield InstanceKey(n, k, k_frac, replicate, seed)

    def cells(self) -> Iterator[ExperimentCell]:
        """Enumerate the grid in a fixed order."""
        from src.services.solver_common import derive_seed

        for key in self.instances():
            for p_frac in self.p_fractions:
                p = self.inner_dimension(key.k, p_frac)
                # every algorithm and penalty starts from the same point
                init_seed = derive_seed(key.seed, 'init', p)
                for alg in self.algorithms:
                    betas = [0.0] if alg == 'ding' else self.betas
                    for beta in betas:
                        alpha = beta if self.kind is InstanceKind.BION else 0.0
                        yield ExperimentCell(
                            kind=self.kind, n=key.n, k=key.k, k_frac=key.k_frac, p=p, p_frac=p_frac,
                            replicate=key.replicate, instance_seed=key.seed,
                            init_seed=init_seed, alg=alg, alpha=alpha, beta=beta
                        )

    def cell_count(self) -> int:
        per_p = sum(1 if alg == 'ding' else len(self.betas) for alg in self.algorithms)
        return len(self.ns) * len(self.k_fractions) * self.replicates * len(self.p_fractions) * per_p


@dataclass
class BenchmarkRow:
    """One raw benchmark result row."""
    kind: str
    n: int
    k: int
    p: int
    replicate: int
    seed: int
    alg: str
    alpha: float
    beta: float
    final_rse: float
    final_infeas: float
    iters: int
    wall_seconds: float
    termination: str
    k_frac: float
    p_frac: float
    master_seed: int
    config_hash: str

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary keyed by raw CSV column."""
        return {name: getattr(self, name) for name in RAW_COLUMNS}

    def to_csv_fields(self) -> List[str]:
        """Render as CSV field strings with round-trippable floats."""
        return [format_field(getattr(self, name)) for name in RAW_COLUMNS]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BenchmarkRow':
        """Create from a raw CSV record (string values accepted)."""
        return cls(
            kind=str(data['kind']),
            n=int(data['n']),
            k=int(data['k']),
            p=int(data['p']),
            replicate=int(data['replicate']),
            seed=int(data['seed']),
            alg=str(data['alg']),
            alpha=float(data['alpha']),
            beta=float(data['beta']),
            final_rse=float(data['final_rse']),
            final_infeas=float(data['final_infeas']),
            iters=int(data['iters']),
            wall_seconds=float(data['wall_seconds']),
            termination=str(data['termination']),
            k_frac=float(data['k_frac']),
            p_frac=float(data['p_frac']),
            master_seed=int(data['master_seed']),
            config_hash=str(data['config_hash']),
        )


@dataclass
class AggregateRow:
    """
    Arithmetic means of one (kind, n, p fraction, algorithm, beta) group.

    The group pools every construction rank of a size; ``k_fractions`` and
    ``mean_k`` only record which ranks went in.
    """
    kind: str
    n: int
    k_fractions: str
    mean_k: float
    p_frac: float
    alg: str
    alpha: float
    beta: float
    mean_rse: float
    mean_infeas: float
    mean_iters: float
    mean_wall_seconds: float
    count: int
    errors: int

    @property
    def p_percent(self) -> int:
        """Inner dimension as a percentage of the construction rank."""
        return int(round(self.p_frac * 100))

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in AGGREGATE_COLUMNS}

    def to_csv_fields(self) -> List[str]:
        return [format_field(getattr(self, name)) for name in AGGREGATE_COLUMNS]


def format_field(value: Any) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        return f"{value:.17g}"
    return str(value)
