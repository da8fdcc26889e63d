#!/usr/bin/env python3
"""
Projected Gradient Block-Coordinate Descent
Alternating minimization of the penalized objective where each block sub-problem
is solved by projected gradient steps with an Armijo step-size search.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from src.models.factorization_models import FactorPair, ProblemSpec, SolveReport, Termination
from src.models.solver_config import PGConfig
from src.services.objective import (
    block_objective_g, block_objective_h, gradient_g, gradient_h, objective_value
)
from src.services.solver_common import (
    Deadline, TraceRecorder, project_nonneg, projected_gradient
)

logger = logging.getLogger(__name__)

__all__ = [
    'ArmijoStep', 'BlockObjective', 'SubsolveResult', 'armijo_pg_subsolve',
    'objective_for_g', 'objective_for_h', 'project_nonneg', 'projected_gradient', 'solve_pg',
]


@dataclass
class BlockObjective:
    """A block sub-problem: value and gradient as functions of the free block."""
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]


class ArmijoStep(NamedTuple):
    """Accepted step: F before, F after and the Armijo right-hand side."""
    f_before: float
    f_after: float
    rhs: float
    step_size: float


class SubsolveResult(NamedTuple):
    X: np.ndarray
    iterations: int
    last_lambda: float
    stalled: bool


def objective_for_g(R: np.ndarray, H: np.ndarray, beta: float) -> BlockObjective:
    """F_H(G) = 1/2 ||R - GH||^2 + beta/2 ||G^T G - I||^2 with H fixed."""
    return BlockObjective(
        value=lambda G: block_objective_g(R, G, H, beta),
        gradient=lambda G: gradient_g(R, G, H, beta),
    )


def objective_for_h(R: np.ndarray, G: np.ndarray, alpha: float) -> BlockObjective:
    """F_G(H) = 1/2 ||R - GH||^2 + alpha/2 ||HH^T - I||^2 with G fixed."""
    return BlockObjective(
        value=lambda H: block_objective_h(R, G, H, alpha),
        gradient=lambda H: gradient_h(R, G, H, alpha),
    )


def _armijo_search(objective: BlockObjective, X: np.ndarray, f_x: float, grad: np.ndarray,
                   cfg: PGConfig) -> Optional[Tuple[float, np.ndarray, float, float]]:
    """
    Find a step size satisfying the sufficient-decrease condition.

    Starts at 1; grows by 1/gamma while the condition holds and the projected point
    keeps changing, otherwise shrinks by gamma until it holds. Growth and shrinking
    each take at most max_step_trials trials.

    Returns:
        (lambda, X_lambda, F(X_lambda), rhs), or None if shrinking runs out of
        trials or drops below min_step
    """
    def trial(lam: float):
        X_lam = project_nonneg(X - lam * grad)
        f_lam = objective.value(X_lam)
        rhs = cfg.sigma * float(np.vdot(grad, X_lam - X))
        return f_lam - f_x <= rhs, X_lam, f_lam, rhs

    lam = 1.0
    ok, X_lam, f_lam, rhs = trial(lam)
    if ok:
        best = (lam, X_lam, f_lam, rhs)
        for _ in range(cfg.max_step_trials):
            bigger = best[0] / cfg.gamma
            if bigger > cfg.max_step:
                break
            ok, X_next, f_next, rhs_next = trial(bigger)
            if not ok or np.array_equal(X_next, best[1]):
                break
            best = (bigger, X_next, f_next, rhs_next)
        return best

    for _ in range(cfg.max_step_trials):
        lam *= cfg.gamma
        if lam < cfg.min_step:
            return None
        ok, X_lam, f_lam, rhs = trial(lam)
        if ok:
            return lam, X_lam, f_lam, rhs
    return None


def armijo_pg_subsolve(objective: BlockObjective, X0: np.ndarray, cfg: PGConfig, eps_sub: float,
                       step_log: Optional[List[ArmijoStep]] = None) -> SubsolveResult:
    """
    Projected gradient with Armijo steps on one block sub-problem.

    Stops when ||grad^P F(X)||_F <= eps_sub or after max_inner_iters accepted steps.

    Args:
        objective: Block objective (value and gradient)
        X0: Non-negative starting block
        cfg: Solver parameters (sigma, gamma, step bounds, inner budget)
        eps_sub: Sub-problem tolerance
        step_log: Optional list receiving every accepted step

    Returns:
        SubsolveResult(X, iterations, last_lambda, stalled)
    """
    X = np.asarray(X0, dtype=np.float64).copy()
    iterations = 0
    last_lambda = 0.0
    stalled = False

    while iterations < cfg.max_inner_iters:
        grad = objective.gradient(X)
        if np.linalg.norm(projected_gradient(X, grad)) <= eps_sub:
            break
        f_x = objective.value(X)
        found = _armijo_search(objective, X, f_x, grad, cfg)
        if found is None:
            logger.warning(
                "Line search stalled: no step size within %d trials and above %.1e satisfies the Armijo rule",
                cfg.max_step_trials, cfg.min_step
            )
            stalled = True
            break
        last_lambda, X, f_new, rhs = found
        if step_log is not None:
            step_log.append(ArmijoStep(f_x, f_new, rhs, last_lambda))
        iterations += 1

    return SubsolveResult(X, iterations, last_lambda, stalled)


def _squared(M: np.ndarray) -> float:
    return float(np.sum(M * M))


def solve_pg(spec: ProblemSpec, cfg: PGConfig, init: FactorPair,
             step_log: Optional[List[ArmijoStep]] = None) -> SolveReport:
    """
    Block-coordinate descent on the penalized objective.

    Stops when ||grad^P F(G,H)||_F <= epsilon ||grad F(G0,H0)||_F, or on the outer
    iteration or time budget. Sub-problem tolerances start at
    max(1e-7, epsilon) ||grad F(G0,H0)||_F and shrink by tau whenever a sub-solve
    returns without taking a step.
    """
    spec.check_factors(init)
    R = spec.R.data
    G, H = (M.copy() for M in init.arrays())
    alpha, beta = spec.alpha, spec.beta

    deadline = Deadline(cfg.time_limit)
    recorder = TraceRecorder('pg', spec)
    recorder.record(G, H)

    grad_G0 = gradient_g(R, G, H, beta)
    grad_H0 = gradient_h(R, G, H, alpha)
    grad0_norm = float(np.sqrt(_squared(grad_G0) + _squared(grad_H0)))
    eps_G = eps_H = max(1e-7, cfg.epsilon) * grad0_norm
    stop_threshold = cfg.epsilon * grad0_norm

    termination = Termination.MAX_ITERS
    grad_G, grad_H = grad_G0, grad_H0
    for _ in range(cfg.max_outer_iters):
        pg_norm = np.sqrt(
            _squared(projected_gradient(G, grad_G)) + _squared(projected_gradient(H, grad_H))
        )
        if pg_norm <= stop_threshold:
            termination = Termination.TOLERANCE
            break
        if deadline.expired():
            termination = Termination.TIME_LIMIT
            break

        result = armijo_pg_subsolve(objective_for_g(R, H, beta), G, cfg, eps_G, step_log)
        G = result.X
        if result.stalled:
            recorder.flag('line_search_stalled')
        if result.iterations == 0:
            eps_G *= cfg.tau

        result = armijo_pg_subsolve(objective_for_h(R, G, alpha), H, cfg, eps_H, step_log)
        H = result.X
        if result.stalled:
            recorder.flag('line_search_stalled')
        if result.iterations == 0:
            eps_H *= cfg.tau

        recorder.record(G, H, objective_value(R, G, H, alpha, beta))
        grad_G = gradient_g(R, G, H, beta)
        grad_H = gradient_h(R, G, H, alpha)

    return recorder.report(G, H, termination, deadline)
