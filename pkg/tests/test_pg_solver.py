#!/usr/bin/env python3
"""
Tests for the projected-gradient block-coordinate descent solver.
"""

import numpy as np
import pytest

from src.models.factorization_models import (
    FactorPair, InstanceKind, OrthogonalityMode, ProblemSpec, Termination
)
from src.models.solver_config import PGConfig
from src.services.instance_generator import generate_instance
from src.services.pg_solver import (
    BlockObjective, _armijo_search, armijo_pg_subsolve, objective_for_g, solve_pg
)
from src.services.solver_common import random_factor_pair


def _quadratic(target: float) -> BlockObjective:
    return BlockObjective(
        value=lambda X: 0.5 * float(np.sum((X - target) ** 2)),
        gradient=lambda X: X - target,
    )


class TestArmijoSearch:

    def test_zero_gradient_accepts_unit_step(self):
        X = np.array([[0.5, 1.0]])
        found = _armijo_search(_quadratic(0.0), X, 0.625, np.zeros_like(X), PGConfig())
        assert found is not None
        step, X_new, f_new, rhs = found
        assert step == 1.0
        np.testing.assert_array_equal(X_new, X)
        assert rhs == 0.0

    def test_step_grows_while_condition_holds(self):
        # flat quadratic: steps 1, 10 and 100 pass, 1000 overshoots
        objective = BlockObjective(
            value=lambda X: 0.005 * float(np.sum((X - 200.0) ** 2)),
            gradient=lambda X: 0.01 * (X - 200.0),
        )
        X = np.zeros((1, 1))
        step, X_new, f_new, rhs = _armijo_search(objective, X, objective.value(X), objective.gradient(X), PGConfig())
        assert step == pytest.approx(100.0)
        assert X_new[0, 0] == pytest.approx(200.0)
        assert f_new == pytest.approx(0.0, abs=1e-9)

    def test_growth_stops_at_first_failure(self):
        # F(x) = 1/2 (x - 200)^2 from x = 0: the rule holds for steps below about 2
        X = np.zeros((1, 1))
        objective = _quadratic(200.0)
        step, X_new, f_new, rhs = _armijo_search(
            objective, X, objective.value(X), objective.gradient(X), PGConfig(gamma=0.5)
        )
        assert step == 1.0
        assert X_new[0, 0] == 200.0

    def test_step_shrinks_when_unit_step_fails(self):
        # curvature 100: the unit step overshoots
        objective = BlockObjective(
            value=lambda X: 50.0 * float(np.sum((X - 1.0) ** 2)),
            gradient=lambda X: 100.0 * (X - 1.0),
        )
        X = np.zeros((1, 1))
        step, X_new, f_new, rhs = _armijo_search(objective, X, objective.value(X), objective.gradient(X), PGConfig())
        assert step == pytest.approx(0.01)
        assert f_new - objective.value(X) <= rhs

    def test_shrinking_is_capped_by_trial_budget(self):
        # curvature 1e7: the rule needs lambda * 1e7 <= 2 - 2 sigma, i.e. 54 shrinks at gamma 0.75
        objective = BlockObjective(
            value=lambda X: 5e6 * float(np.sum((X - 1.0) ** 2)),
            gradient=lambda X: 1e7 * (X - 1.0),
        )
        X = np.zeros((1, 1))
        args = (objective, X, objective.value(X), objective.gradient(X))
        assert _armijo_search(*args, PGConfig(gamma=0.75)) is None

        step, X_new, f_new, rhs = _armijo_search(*args, PGConfig(gamma=0.75, max_step_trials=60))
        assert step == pytest.approx(0.75 ** 54)
        assert f_new - objective.value(X) <= rhs

    def test_underflow_returns_none(self):
        X0 = np.zeros((1, 1))
        # any move away from X0 increases the objective
        objective = BlockObjective(
            value=lambda X: 0.0 if np.array_equal(X, X0) else 1.0,
            gradient=lambda X: -np.ones_like(X),
        )
        assert _armijo_search(objective, X0, 0.0, objective.gradient(X0), PGConfig()) is None


class TestSubsolve:

    def test_one_dimensional_quadratic(self):
        result = armijo_pg_subsolve(_quadratic(2.0), np.zeros((1, 1)), PGConfig(), eps_sub=1e-12)
        assert result.X[0, 0] == pytest.approx(2.0)
        assert result.iterations == 1
        assert not result.stalled

    def test_projection_keeps_iterates_nonnegative(self):
        result = armijo_pg_subsolve(_quadratic(-3.0), np.ones((2, 2)), PGConfig(), eps_sub=1e-12)
        np.testing.assert_array_equal(result.X, np.zeros((2, 2)))

    def test_already_optimal_takes_no_step(self):
        result = armijo_pg_subsolve(_quadratic(2.0), np.full((1, 1), 2.0), PGConfig(), eps_sub=1e-12)
        assert result.iterations == 0

    def test_stalled_line_search(self):
        X0 = np.zeros((1, 1))
        objective = BlockObjective(
            value=lambda X: 0.0 if np.array_equal(X, X0) else 1.0,
            gradient=lambda X: -np.ones_like(X),
        )
        result = armijo_pg_subsolve(objective, X0, PGConfig(), eps_sub=1e-12)
        assert result.stalled
        assert result.iterations == 0

    def test_accepted_steps_satisfy_sufficient_decrease(self):
        rng = np.random.default_rng(4)
        R, H = rng.uniform(size=(8, 6)), rng.uniform(size=(3, 6))
        steps = []
        armijo_pg_subsolve(objective_for_g(R, H, 10.0), rng.uniform(size=(8, 3)), PGConfig(), 1e-12, steps)
        assert steps
        for step in steps:
            assert step.f_after - step.f_before <= step.rhs + 1e-12
            assert step.rhs <= 0.0


class TestSolvePG:

    def test_exact_bion_instance_stops_at_once(self):
        G = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        H = np.array([[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
        spec = ProblemSpec(G @ H, 2, OrthogonalityMode.BI, alpha=1.0, beta=1.0)
        report = solve_pg(spec, PGConfig.bion_preset(), FactorPair(G, H))
        assert report.termination is Termination.TOLERANCE
        assert report.iterations == 0
        assert report.final_rse == 0.0
        assert report.final_infeas == 0.0

    def test_plain_nmf_recovers_exact_factorization(self):
        t = generate_instance(4, 2, InstanceKind.UNION, 1, seed=8)
        spec = ProblemSpec(t.R, 2, OrthogonalityMode.UNI)
        best = min(
            solve_pg(spec, PGConfig.union_preset(), random_factor_pair(4, 4, 2, seed=s)).final_rse
            for s in (1, 2, 3)
        )
        assert best < 1e-4

    def test_objective_never_increases(self):
        t = generate_instance(20, 4, InstanceKind.BION, 1, seed=31)
        spec = ProblemSpec(t.R, 4, OrthogonalityMode.BI, alpha=10.0, beta=10.0)
        steps = []
        report = solve_pg(spec, PGConfig.bion_preset(max_outer_iters=50), random_factor_pair(20, 20, 4, seed=2), steps)
        trace = report.objective_trace
        for before, after in zip(trace, trace[1:]):
            assert after <= before + 1e-10 * max(1.0, abs(before))
        assert all(s.f_after - s.f_before <= s.rhs + 1e-12 for s in steps)
        assert report.final_objective < trace[0]

    def test_iteration_budget(self):
        t = generate_instance(20, 4, InstanceKind.UNION, 1, seed=31)
        spec = ProblemSpec(t.R, 2, OrthogonalityMode.UNI, beta=1.0)
        report = solve_pg(spec, PGConfig.union_preset(max_outer_iters=3), random_factor_pair(20, 20, 2, seed=2))
        assert report.termination is Termination.MAX_ITERS
        assert report.iterations == 3
        assert len(report.objective_trace) == 4

    def test_time_budget(self):
        t = generate_instance(20, 4, InstanceKind.UNION, 1, seed=31)
        spec = ProblemSpec(t.R, 2, OrthogonalityMode.UNI, beta=1.0)
        report = solve_pg(spec, PGConfig(time_limit=1e-9), random_factor_pair(20, 20, 2, seed=2))
        assert report.termination is Termination.TIME_LIMIT
        assert report.iterations == 0


class TestPresets:

    def test_dataset_presets(self):
        union, bion = PGConfig.union_preset(), PGConfig.bion_preset()
        assert (union.sigma, union.gamma, union.tau) == (0.001, 0.1, 0.1)
        assert (bion.sigma, bion.gamma, bion.tau) == (0.001, 0.75, 0.5)
        assert union.epsilon == 1e-10
        assert (union.max_outer_iters, union.max_inner_iters) == (1000, 20)
