#!/usr/bin/env python3
"""
Benchmark Runner
Runs every cell of an experiment grid, aggregates the results into group means
and lays them out as result tables.
"""

import logging
import math
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache, partial
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.models.experiment_models import (
    ALGORITHMS, AggregateRow, BenchmarkRow, ExperimentCell, ExperimentGrid
)
from src.models.factorization_models import InstanceKind, InstanceTriple, ProblemSpec, Termination
from src.models.solver_config import SolverConfigBase
from src.services.instance_generator import generate_instance
from src.services.solver_common import random_factor_pair
from src.services.solver_registry import default_config, run_solver

logger = logging.getLogger(__name__)

Configs = Dict[str, SolverConfigBase]


def default_configs(kind: InstanceKind, algorithms=ALGORITHMS) -> Configs:
    """Default configuration of every algorithm for one dataset kind."""
    return {alg: default_config(alg, kind) for alg in algorithms}


@lru_cache(maxsize=32)
def _instance(n: int, k: int, kind: InstanceKind, replicate: int, seed: int) -> InstanceTriple:
    # cells of one instance are adjacent in grid order, so a small cache suffices
    return generate_instance(n, k, kind, replicate, seed)


def run_cell(cell: ExperimentCell, configs: Configs, master_seed: int) -> BenchmarkRow:
    """
    Solve one grid cell.

    Failures never propagate: they come back as a row with termination 'error'
    and NaN metrics.
    """
    cfg = configs.get(cell.alg)
    row = dict(
        kind=cell.kind.value, n=cell.n, k=cell.k, p=cell.p, replicate=cell.replicate,
        seed=cell.instance_seed, alg=cell.alg, alpha=cell.alpha, beta=cell.beta,
        k_frac=cell.k_frac, p_frac=cell.p_frac, master_seed=master_seed,
        config_hash=cfg.config_hash() if cfg is not None else '',
    )
    try:
        if cfg is None:
            raise KeyError(f"No configuration for algorithm '{cell.alg}'")
        instance = _instance(cell.n, cell.k, cell.kind, cell.replicate, cell.instance_seed)
        spec = ProblemSpec(instance.R, cell.p, cell.kind.mode, cell.alpha, cell.beta)
        init = random_factor_pair(spec.m, spec.n, cell.p, cell.init_seed)
        report = run_solver(cell.alg, spec, cfg, init)
    except Exception as e:
        logger.error(
            "Cell failed (%s n=%d k=%d p=%d replicate=%d %s beta=%g): %s",
            cell.kind.value, cell.n, cell.k, cell.p, cell.replicate, cell.alg, cell.beta, e
        )
        return BenchmarkRow(
            final_rse=math.nan, final_infeas=math.nan, iters=0, wall_seconds=0.0,
            termination=Termination.ERROR.value, **row
        )

    return BenchmarkRow(
        final_rse=report.final_rse, final_infeas=report.final_infeas,
        iters=report.iterations, wall_seconds=report.wall_seconds,
        termination=report.termination.value, **row
    )


def run_grid(grid: ExperimentGrid, configs: Optional[Configs] = None, workers: int = 1) -> List[BenchmarkRow]:
    """
    Run every cell of a grid.

    Args:
        grid: Experiment grid
        configs: Solver configuration per algorithm (dataset defaults if None)
        workers: Number of worker processes; 1 runs inline

    Returns:
        One row per cell, in grid order regardless of completion order
    """
    configs = configs or default_configs(grid.kind, grid.algorithms)
    cells = list(grid.cells())
    logger.info("Running %d cells with %d worker(s)", len(cells), workers)
    task = partial(run_cell, configs=configs, master_seed=grid.master_seed)

    if workers <= 1:
        return [task(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, cells, chunksize=max(1, len(cells) // (4 * workers))))


def _mean(values: List[float]) -> float:
    return float(np.mean(values)) if values else math.nan


def aggregate(rows: List[BenchmarkRow]) -> List[AggregateRow]:
    """
    Arithmetic means grouped by (kind, n, p fraction, algorithm, beta).

    Both construction ranks of a size fall into the same group, so with
    k_fractions 0.2 and 0.4 each mean covers 2 x replicates solves. Error rows
    count towards ``errors`` but not towards the means. Groups keep the order in
    which they first appear.
    """
    groups: "OrderedDict[Tuple, List[BenchmarkRow]]" = OrderedDict()
    for row in rows:
        key = (row.kind, row.n, row.p_frac, row.alg, row.beta)
        groups.setdefault(key, []).append(row)

    result = []
    for (kind, n, p_frac, alg, beta), members in groups.items():
        ok = [r for r in members if r.termination != Termination.ERROR.value]
        first = members[0]
        result.append(AggregateRow(
            kind=kind, n=n, k_fractions=';'.join(f"{f:g}" for f in sorted({r.k_frac for r in members})),
            mean_k=_mean([float(r.k) for r in members]), p_frac=p_frac,
            alg=alg, alpha=first.alpha, beta=beta,
            mean_rse=_mean([r.final_rse for r in ok]),
            mean_infeas=_mean([r.final_infeas for r in ok]),
            mean_iters=_mean([float(r.iters) for r in ok]),
            mean_wall_seconds=_mean([r.wall_seconds for r in ok]),
            count=len(ok),
            errors=len(members) - len(ok),
        ))
    return result


def column_label(alg: str, beta: float) -> str:
    """Result-table column of an algorithm/penalty combination."""
    if alg == 'ding':
        return 'ding'
    return f"{alg} beta={beta:g}"


def pivot(aggregates: List[AggregateRow], metric: str) -> Tuple[List[str], List[List[object]]]:
    """
    Lay out one metric as a result table.

    Rows are (kind, n, p %), columns Ding followed by every Mirzal and PG beta.

    Args:
        aggregates: Output of aggregate()
        metric: 'rse' or 'infeas'

    Returns:
        (header, rows) with NaN where a combination was not run
    """
    attribute = {'rse': 'mean_rse', 'infeas': 'mean_infeas'}.get(metric)
    if attribute is None:
        raise ValueError(f"Unknown metric '{metric}', expected 'rse' or 'infeas'")

    columns = []
    for alg in ALGORITHMS:
        betas = sorted({a.beta for a in aggregates if a.alg == alg})
        columns.extend(column_label(alg, beta) for beta in betas)

    table: "OrderedDict[Tuple, Dict[str, float]]" = OrderedDict()
    for a in aggregates:
        row_key = (a.kind, a.n, a.p_percent)
        table.setdefault(row_key, {})[column_label(a.alg, a.beta)] = getattr(a, attribute)

    header = ['kind', 'n', 'p_percent'] + columns
    rows = [list(key) + [values.get(c, math.nan) for c in columns] for key, values in table.items()]
    return header, rows
