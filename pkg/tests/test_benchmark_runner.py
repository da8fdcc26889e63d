#!/usr/bin/env python3
"""
Tests for experiment grids, the benchmark runner and aggregation.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from src.models.errors import ConfigError
from src.models.experiment_models import ExperimentGrid
from src.models.factorization_models import InstanceKind
from src.services.benchmark_runner import aggregate, column_label, pivot, run_cell, run_grid
from src.services.solver_registry import build_config


def _small_grid(**overrides):
    options = dict(ns=[10], k_fractions=[0.2], p_fractions=[0.5, 1.0], betas=[1.0, 10.0],
                   replicates=2, master_seed=99)
    options.update(overrides)
    return ExperimentGrid(**options)


def _fast_configs(kind=InstanceKind.UNION):
    return {alg: build_config(alg, kind, max_iters=5) for alg in ('ding', 'mirzal', 'pg')}


def _without_wall_clock(rows):
    return [{k: v for k, v in row.to_dict().items() if k != 'wall_seconds'} for row in rows]


class TestExperimentGrid:

    def test_cell_enumeration(self):
        grid = _small_grid()
        cells = list(grid.cells())
        assert len(cells) == grid.cell_count() == 2 * 2 * (1 + 2 + 2)
        assert (cells[0].alg, cells[0].beta, cells[0].p) == ('ding', 0.0, 1)
        assert {c.k for c in cells} == {2}
        assert {c.p for c in cells} == {1, 2}

    def test_shared_start_per_instance_and_p(self):
        cells = [c for c in _small_grid().cells() if c.replicate == 1 and c.p == 2]
        assert len({c.init_seed for c in cells}) == 1
        assert len({c.instance_seed for c in cells}) == 1

    def test_bion_uses_alpha_equal_beta(self):
        cells = list(_small_grid(kind=InstanceKind.BION).cells())
        assert all(c.alpha == c.beta for c in cells)
        assert all(c.alpha == 0.0 for c in _small_grid().cells())

    @pytest.mark.parametrize("overrides", [
        {'algorithms': []},
        {'algorithms': ['als']},
        {'p_fractions': [0.0]},
        {'p_fractions': [1.2]},
        {'k_fractions': [0.6]},
        {'betas': [-1.0]},
        {'replicates': 0},
        {'ns': []},
    ])
    def test_invalid_grid(self, overrides):
        with pytest.raises(ConfigError):
            _small_grid(**overrides)


class TestRunGrid:

    @pytest.fixture(scope="class")
    def rows(self):
        return run_grid(_small_grid(), _fast_configs())

    def test_one_row_per_cell(self, rows):
        assert len(rows) == _small_grid().cell_count()
        assert all(r.termination != 'error' for r in rows)
        assert all(r.final_rse >= 0 and r.final_infeas >= 0 and r.wall_seconds >= 0 for r in rows)

    def test_rows_carry_provenance(self, rows):
        configs = _fast_configs()
        for row in rows:
            assert row.master_seed == 99
            assert row.seed > 0
            assert row.config_hash == configs[row.alg].config_hash()

    def test_rerun_is_identical(self, rows):
        again = run_grid(_small_grid(), _fast_configs())
        assert _without_wall_clock(again) == _without_wall_clock(rows)

    def test_worker_pool_matches_inline(self, rows):
        pooled = run_grid(_small_grid(), _fast_configs(), workers=2)
        assert _without_wall_clock(pooled) == _without_wall_clock(rows)

    def test_aggregates_match_recomputed_means(self, rows):
        aggregates = aggregate(rows)
        assert len(aggregates) == len(rows) // 2
        for a in aggregates:
            members = [r for r in rows if (r.kind, r.n, r.p_frac, r.alg, r.beta)
                       == (a.kind, a.n, a.p_frac, a.alg, a.beta)]
            assert a.count == len(members) == 2
            assert abs(a.mean_rse - sum(r.final_rse for r in members) / 2) <= 1e-12
            assert abs(a.mean_infeas - sum(r.final_infeas for r in members) / 2) <= 1e-12

    def test_pivot_layout(self, rows):
        header, table = pivot(aggregate(rows), 'rse')
        assert header == ['kind', 'n', 'p_percent', 'ding',
                          'mirzal beta=1', 'mirzal beta=10', 'pg beta=1', 'pg beta=10']
        assert [row[:3] for row in table] == [['UNION', 10, 50], ['UNION', 10, 100]]
        assert all(not math.isnan(v) for row in table for v in row[3:])

    def test_pivot_unknown_metric(self, rows):
        with pytest.raises(ValueError):
            pivot(aggregate(rows), 'objective')


class TestRankPooling:
    """Both construction ranks of a size share one table row."""

    @pytest.fixture(scope="class")
    def rows(self):
        grid = ExperimentGrid(ns=[10, 20], k_fractions=[0.2, 0.4], algorithms=['ding'], replicates=1,
                              master_seed=99)
        return run_grid(grid, _fast_configs())

    def test_one_group_per_size_and_p(self, rows):
        aggregates = aggregate(rows)
        assert len(rows) == 2 * 2 * 5
        assert len(aggregates) == 2 * 5
        assert all(a.count == 2 * 1 for a in aggregates)
        assert all(a.k_fractions == '0.2;0.4' for a in aggregates)
        assert [a.mean_k for a in aggregates if a.p_frac == 1.0] == [3.0, 6.0]

    def test_mean_covers_both_ranks(self, rows):
        (a,) = [a for a in aggregate(rows) if a.n == 20 and a.p_frac == 0.6]
        members = [r for r in rows if r.n == 20 and r.p_frac == 0.6]
        assert {r.k for r in members} == {4, 8}
        assert abs(a.mean_rse - sum(r.final_rse for r in members) / 2) <= 1e-12

    def test_table_rows(self, rows):
        header, table = pivot(aggregate(rows), 'rse')
        assert header == ['kind', 'n', 'p_percent', 'ding']
        assert [row[:3] for row in table] == [
            ['UNION', n, percent] for n in (10, 20) for percent in (20, 40, 60, 80, 100)
        ]


class TestSingleCells:

    def test_single_cell_aggregate_equals_raw(self):
        grid = _small_grid(p_fractions=[1.0], betas=[10.0], algorithms=['pg'], replicates=1)
        rows = run_grid(grid, _fast_configs())
        assert len(rows) == 1
        (a,) = aggregate(rows)
        assert a.mean_rse == rows[0].final_rse
        assert a.mean_infeas == rows[0].final_infeas

    def test_failure_becomes_error_row(self):
        cell = next(_small_grid(algorithms=['pg']).cells())
        row = run_cell(cell, {}, master_seed=99)
        assert row.termination == 'error'
        assert math.isnan(row.final_rse) and math.isnan(row.final_infeas)

    def test_error_rows_are_excluded_from_means(self):
        grid = _small_grid(p_fractions=[1.0], betas=[10.0], algorithms=['pg'], replicates=2)
        good = run_grid(grid, _fast_configs())
        bad = replace(good[1], final_rse=math.nan, final_infeas=math.nan, termination='error')
        (a,) = aggregate([good[0], bad])
        assert (a.count, a.errors) == (1, 1)
        assert a.mean_rse == good[0].final_rse

    def test_column_label(self):
        assert column_label('ding', 0.0) == 'ding'
        assert column_label('pg', 1000.0) == 'pg beta=1000'
        assert np.isclose(float(column_label('mirzal', 0.5).split('=')[1]), 0.5)
