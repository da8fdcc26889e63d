#!/usr/bin/env python3
"""
Factorization Commands
Processes command requests: generate datasets, run single solves, sweep
benchmark grids and emit plot data.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from src.integrations.matrix_files import read_instance, write_instance
from src.models.errors import OrthoFactError
from src.models.experiment_models import ALGORITHMS, ExperimentGrid
from src.models.factorization_models import InstanceKind, ProblemSpec
from src.models.solver_config import HarnessSettings, load_harness_settings, read_config_file
from src.services.benchmark_runner import aggregate, run_grid
from src.services.instance_generator import generate_instance
from src.services.report_formatter import ReportFormatter
from src.services.solver_common import derive_seed, random_factor_pair
from src.services.solver_registry import build_config, run_solver

logger = logging.getLogger(__name__)

# Sizes of the full dataset; benchmark sweeps default to the desk-scale subset
DATASET_NS = [50, 100, 200, 500, 1000]
DESK_NS = [50, 100]
DESK_REPLICATES = 3


class FactorizationCommands:
    """Processes orthogonal NMF commands."""

    ACTIONS = ('generate', 'solve', 'benchmark', 'report')

    def __init__(self, settings: Optional[HarnessSettings] = None):
        """
        Initialize FactorizationCommands.

        Args:
            settings: Harness defaults; loaded from ORTHOFACT_* environment variables if None
        """
        self.settings = settings or load_harness_settings()
        self.formatter = ReportFormatter()

    def execute_command(self, action: str, **kwargs) -> Dict:
        """
        Execute a command.

        Args:
            action: 'generate', 'solve', 'benchmark' or 'report'
            **kwargs: Command parameters (see the matching method)

        Returns:
            Dictionary with 'success' and command-specific results, or 'error'
        """
        if not action:
            return {'success': False, 'error': 'Missing required parameter: action'}
        if action not in self.ACTIONS:
            return {'success': False, 'error': f'Unknown action: {action}'}

        try:
            result = getattr(self, action)(**kwargs)
        except (OrthoFactError, ValueError, OSError) as e:
            logger.debug("%s failed", action, exc_info=True)
            return {'success': False, 'action': action, 'error': str(e)}
        return {'success': True, 'action': action, **result}

    def generate(self, kinds: Optional[Sequence] = None, ns: Optional[List[int]] = None,
                 k_fractions: Optional[List[float]] = None, replicates: int = 5,
                 master_seed: Optional[int] = None, out: Optional[str] = None) -> Dict:
        """
        Write the instance triples of a dataset grid.

        Args:
            kinds: Dataset kinds (both if None)
            ns: Matrix sizes (the full dataset sizes if None)
            k_fractions: Construction ranks as fractions of n (0.2 and 0.4 if None)
            replicates: Instances per (n, k)
            master_seed: Seed the instance seeds are derived from
            out: Output directory

        Returns:
            Counts of triples and files, and the output directory
        """
        kinds = [InstanceKind(k) for k in (kinds or list(InstanceKind))]
        master_seed = self.settings.master_seed if master_seed is None else master_seed
        out_dir = Path(out or Path(self.settings.output_dir) / 'instances')

        triples = 0
        files = []
        for kind in kinds:
            grid = self._grid(kind, ns or DATASET_NS, k_fractions, None, None, None, replicates, master_seed)
            for key in grid.instances():
                instance = generate_instance(key.n, key.k, kind, key.replicate, key.seed)
                files.extend(write_instance(instance, out_dir).values())
                triples += 1
        logger.info("Generated %d instance triples in %s", triples, out_dir)
        return {'triples': triples, 'files': len(files), 'output_dir': str(out_dir)}

    def solve(self, instance: str, alg: str, p: Optional[int] = None, p_frac: Optional[float] = None,
              beta: float = 0.0, alpha: Optional[float] = None, seed: Optional[int] = None,
              config: Optional[str] = None, time_limit: Optional[float] = None,
              max_iters: Optional[int] = None, trace: Optional[str] = None) -> Dict:
        """
        Run one solver on one instance file.

        Args:
            instance: Path to an NMF_..._data_R_... file
            alg: 'ding', 'mirzal' or 'pg'
            p: Inner dimension (defaults to k, or p_frac * k when p_frac is given)
            p_frac: Inner dimension as a fraction of k
            beta: G orthogonality penalty
            alpha: H orthogonality penalty for BION data (defaults to beta)
            seed: Initialization seed (derived from the master seed and file name if None)
            config: Optional key=value solver config file
            time_limit: Override of the time budget in seconds
            max_iters: Override of the iteration budget
            trace: Optional path for the per-iteration trace CSV

        Returns:
            The report as a dictionary and as a JSON line
        """
        if alg not in ALGORITHMS:
            raise ValueError(f"Unknown algorithm: {alg}")
        triple = read_instance(instance)
        if p is None:
            p = ExperimentGrid.inner_dimension(triple.k, p_frac) if p_frac is not None else triple.k
        if alpha is None:
            alpha = beta if triple.kind is InstanceKind.BION else 0.0
        spec = ProblemSpec(triple.R, p, triple.kind.mode, alpha, beta)

        file_values = read_config_file(config) if config else None
        cfg = build_config(alg, triple.kind, file_values, time_limit, max_iters)
        if seed is None:
            seed = derive_seed(self.settings.master_seed, Path(instance).name, 'init', p)
        report = run_solver(alg, spec, cfg, random_factor_pair(spec.m, spec.n, p, seed))

        result = {
            'instance': triple.to_dict(),
            'p': p,
            'seed': seed,
            'config_hash': cfg.config_hash(),
            'report': report.to_dict(),
            'json': report.to_json(),
        }
        if trace:
            result['trace_file'] = str(self.formatter.write_trace_csv(report, trace))
        return result

    def benchmark(self, kinds: Optional[Sequence] = None, ns: Optional[List[int]] = None,
                  k_fractions: Optional[List[float]] = None, p_fractions: Optional[List[float]] = None,
                  betas: Optional[List[float]] = None, algorithms: Optional[List[str]] = None,
                  replicates: int = DESK_REPLICATES, master_seed: Optional[int] = None,
                  config: Optional[str] = None, time_limit: Optional[float] = None,
                  max_iters: Optional[int] = None, workers: Optional[int] = None,
                  out: Optional[str] = None) -> Dict:
        """
        Sweep a grid and write raw, aggregate and table CSVs.

        Instances are generated on the fly from the same seeds 'generate' uses.
        Failed cells are kept as 'error' rows.

        Returns:
            Paths of the written files and counts of rows and failed cells
        """
        kinds = [InstanceKind(k) for k in (kinds or [InstanceKind.UNION])]
        master_seed = self.settings.master_seed if master_seed is None else master_seed
        workers = workers or self.settings.workers
        out_dir = Path(out or Path(self.settings.output_dir) / 'benchmark')
        file_values = read_config_file(config) if config else None

        rows = []
        for kind in kinds:
            grid = self._grid(kind, ns or DESK_NS, k_fractions, p_fractions, betas, algorithms,
                              replicates, master_seed)
            configs = {
                alg: build_config(alg, kind, file_values, time_limit, max_iters)
                for alg in grid.algorithms
            }
            logger.info("Benchmarking %s: %d cells", kind.value, grid.cell_count())
            rows.extend(run_grid(grid, configs, workers))

        aggregates = aggregate(rows)
        files = {
            'raw_csv': self.formatter.write_raw_csv(rows, out_dir / 'raw.csv'),
            'aggregate_csv': self.formatter.write_aggregate_csv(aggregates, out_dir / 'aggregate.csv'),
            'rse_table_csv': self.formatter.write_pivot_csv(aggregates, 'rse', out_dir / 'table_rse.csv'),
            'infeas_table_csv': self.formatter.write_pivot_csv(aggregates, 'infeas', out_dir / 'table_infeas.csv'),
        }
        return {
            'rows': len(rows),
            'errors': sum(1 for r in rows if r.termination == 'error'),
            'files': {name: str(path) for name, path in files.items()},
            'summary': self.formatter.format_summary(aggregates, 'rse'),
        }

    def report(self, raw_csv: str, out: Optional[str] = None) -> Dict:
        """
        Turn a raw benchmark CSV into plot-data files.

        Args:
            raw_csv: CSV written by 'benchmark'
            out: Output directory (next to the CSV if None)
        """
        rows = self.formatter.read_raw_csv(raw_csv)
        out_dir = Path(out) if out else Path(raw_csv).parent / 'plots'
        written = self.formatter.write_plot_data(aggregate(rows), out_dir)
        return {'files': [str(path) for path in written], 'output_dir': str(out_dir)}

    def _grid(self, kind, ns, k_fractions, p_fractions, betas, algorithms, replicates, master_seed) -> ExperimentGrid:
        # None keeps the grid's own default
        options = {
            'k_fractions': k_fractions, 'p_fractions': p_fractions,
            'betas': betas, 'algorithms': algorithms,
        }
        return ExperimentGrid(
            ns=list(ns), kind=kind, replicates=replicates, master_seed=master_seed,
            **{name: list(value) for name, value in options.items() if value is not None}
        )
