#!/usr/bin/env python3
"""
Modified Additive Update Solver
Additive updates with zero-locking guards and a growing denominator damping
that enforces a non-increasing penalized objective.
"""

import logging
from typing import NamedTuple

import numpy as np

from src.models.factorization_models import FactorPair, ProblemSpec, SolveReport, Termination
from src.models.solver_config import MirzalConfig
from src.services.objective import (
    block_objective_g, block_objective_h, gradient_g, gradient_h, objective_value
)
from src.services.solver_common import (
    Deadline, TraceRecorder, project_nonneg, relative_change_small
)

logger = logging.getLogger(__name__)


class BlockUpdate(NamedTuple):
    """Result of one guarded block update."""
    matrix: np.ndarray
    delta_used: float
    tries: int
    accepted: bool


def guard_factor(M: np.ndarray, gradM: np.ndarray, nu: float) -> np.ndarray:
    """Lift entries to at least nu where the gradient is negative."""
    M = np.asarray(M, dtype=np.float64)
    gradM = np.asarray(gradM, dtype=np.float64)
    if M.shape != gradM.shape:
        raise ValueError(f"Shapes differ: M {M.shape}, gradient {gradM.shape}")
    return np.where(gradM >= 0, M, np.maximum(M, nu))


def _damped_search(current: np.ndarray, guarded: np.ndarray, grad: np.ndarray,
                   denominator: np.ndarray, objective, f_current: float,
                   delta0: float, step: float, max_tries: int) -> BlockUpdate:
    delta = delta0
    candidate = current
    for tries in range(1, max_tries + 1):
        candidate = project_nonneg(current - guarded * grad / (denominator + delta))
        if objective(candidate) <= f_current:
            return BlockUpdate(candidate, delta, tries, True)
        delta *= step
    logger.warning("Damping search exhausted %d tries (delta=%.3e)", max_tries, delta / step)
    return BlockUpdate(candidate, delta / step, max_tries, False)


def mirzal_update_G(R: np.ndarray, G: np.ndarray, H: np.ndarray, beta: float, nu: float,
                    delta0: float, step: float, max_tries: int) -> BlockUpdate:
    """
    Guarded additive update of G with H fixed.

    Retries with the damping multiplied by ``step`` until F_H(G') <= F_H(G).

    Returns:
        BlockUpdate(matrix=G', delta_used, tries, accepted)
    """
    R, G, H = (np.asarray(M, dtype=np.float64) for M in (R, G, H))
    grad = gradient_g(R, G, H, beta)
    G_bar = guard_factor(G, grad, nu)
    denominator = G_bar @ (H @ H.T)
    if beta:
        denominator = denominator + beta * (G_bar @ (G_bar.T @ G_bar))
    return _damped_search(
        G, G_bar, grad, denominator,
        lambda candidate: block_objective_g(R, candidate, H, beta),
        block_objective_g(R, G, H, beta),
        delta0, step, max_tries
    )


def mirzal_update_H(R: np.ndarray, G: np.ndarray, H: np.ndarray, alpha: float, nu: float,
                    delta0: float, step: float, max_tries: int) -> BlockUpdate:
    """Guarded additive update of H with G fixed (mirror of mirzal_update_G)."""
    R, G, H = (np.asarray(M, dtype=np.float64) for M in (R, G, H))
    grad = gradient_h(R, G, H, alpha)
    H_bar = guard_factor(H, grad, nu)
    denominator = (G.T @ G) @ H_bar
    if alpha:
        denominator = denominator + alpha * ((H_bar @ H_bar.T) @ H_bar)
    return _damped_search(
        H, H_bar, grad, denominator,
        lambda candidate: block_objective_h(R, G, candidate, alpha),
        block_objective_h(R, G, H, alpha),
        delta0, step, max_tries
    )


def solve_mirzal(spec: ProblemSpec, cfg: MirzalConfig, init: FactorPair) -> SolveReport:
    """
    Alternate guarded G and H updates until the penalized objective stalls.

    Both damping values restart from delta0 at every outer iteration.
    """
    spec.check_factors(init)
    R = spec.R.data
    G, H = (M.copy() for M in init.arrays())

    deadline = Deadline(cfg.time_limit)
    recorder = TraceRecorder('mirzal', spec)
    recorder.record(G, H)
    termination = Termination.MAX_ITERS

    for _ in range(cfg.max_outer_iters):
        if deadline.expired():
            termination = Termination.TIME_LIMIT
            break
        update = mirzal_update_G(R, G, H, spec.beta, cfg.nu, cfg.delta0, cfg.step, cfg.max_inner_tries)
        if not update.accepted:
            recorder.flag('delta_growth_exhausted')
        G = update.matrix
        update = mirzal_update_H(R, G, H, spec.alpha, cfg.nu, cfg.delta0, cfg.step, cfg.max_inner_tries)
        if not update.accepted:
            recorder.flag('delta_growth_exhausted')
        H = update.matrix
        recorder.record(G, H, objective_value(R, G, H, spec.alpha, spec.beta))
        if relative_change_small(recorder.objective[-2], recorder.objective[-1], cfg.stall_tol):
            termination = Termination.STALL
            break

    return recorder.report(G, H, termination, deadline)
