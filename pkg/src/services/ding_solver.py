#!/usr/bin/env python3
"""
Multiplicative Update Solver
Square-root multiplicative updates for uni- and bi-orthogonal NMF.
"""

import logging
from typing import Tuple

import numpy as np

from src.models.errors import NegativeEntryError
from src.models.factorization_models import (
    FactorPair, OrthogonalityMode, ProblemSpec, SolveReport, Termination
)
from src.models.solver_config import DingConfig
from src.services.solver_common import Deadline, TraceRecorder, relative_change_small

logger = logging.getLogger(__name__)


def _require_nonneg(**matrices: np.ndarray) -> None:
    for name, M in matrices.items():
        if (M < 0).any():
            raise NegativeEntryError(f"{name} has negative entries; multiplicative updates need non-negative input")


def _scaled(M: np.ndarray, numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    ratio = numerator / denominator
    if (ratio < 0).any():
        raise NegativeEntryError("Negative radicand in multiplicative update")
    return M * np.sqrt(ratio)


def _update_g(R: np.ndarray, G: np.ndarray, H: np.ndarray, delta: float) -> np.ndarray:
    RHt = R @ H.T
    return _scaled(G, RHt, G @ (G.T @ RHt) + delta)


def ding_step_bi(R: np.ndarray, G: np.ndarray, H: np.ndarray, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    One bi-orthogonal multiplicative step.

    G is updated first; the H update uses the new G.

    Args:
        R: Data matrix (m x n)
        G: Basis matrix (m x p)
        H: Coefficient matrix (p x n)
        delta: Positive guard added to the denominators

    Returns:
        Updated (G, H)
    """
    R, G, H = (np.asarray(M, dtype=np.float64) for M in (R, G, H))
    _require_nonneg(R=R, G=G, H=H)
    G_new = _update_g(R, G, H, delta)
    GtR = G_new.T @ R
    H_new = _scaled(H, GtR, (GtR @ H.T) @ H + delta)
    return G_new, H_new


def ding_step_uni(R: np.ndarray, G: np.ndarray, H: np.ndarray, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    """One uni-orthogonal multiplicative step (H rule without an orthogonality term)."""
    R, G, H = (np.asarray(M, dtype=np.float64) for M in (R, G, H))
    _require_nonneg(R=R, G=G, H=H)
    G_new = _update_g(R, G, H, delta)
    H_new = _scaled(H, G_new.T @ R, (G_new.T @ G_new) @ H + delta)
    return G_new, H_new


def solve_ding(spec: ProblemSpec, cfg: DingConfig, init: FactorPair) -> SolveReport:
    """
    Run multiplicative updates until the RSE stalls or a budget runs out.

    Stops when |RSE_t - RSE_{t-1}| <= rse_stall_tol * max(1, RSE_{t-1}).
    """
    spec.check_factors(init)
    R = spec.R.data
    G, H = (M.copy() for M in init.arrays())
    step = ding_step_bi if spec.mode is OrthogonalityMode.BI else ding_step_uni

    deadline = Deadline(cfg.time_limit)
    recorder = TraceRecorder('ding', spec)
    recorder.record(G, H)
    termination = Termination.MAX_ITERS

    for _ in range(cfg.max_iters):
        if deadline.expired():
            termination = Termination.TIME_LIMIT
            break
        G, H = step(R, G, H, cfg.delta)
        recorder.record(G, H)
        if relative_change_small(recorder.rse[-2], recorder.rse[-1], cfg.rse_stall_tol):
            termination = Termination.STALL
            break

    return recorder.report(G, H, termination, deadline)
