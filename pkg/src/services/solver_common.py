#!/usr/bin/env python3
"""
Solver Plumbing
Projection operators, seeding, initialization, budget checks and trace recording
shared by the Ding, Mirzal and projected-gradient solvers.
"""

import hashlib
import logging
import time
from typing import Dict, List, Optional

import numpy as np

from src.models.factorization_models import (
    FactorPair, NonNegMatrix, ProblemSpec, SolveReport, Termination
)
from src.services.objective import infeasibility, objective_value, rse

logger = logging.getLogger(__name__)

# Smallest positive float, so uniform draws land in the open interval (0, 1)
_OPEN_LOW = np.nextafter(0.0, 1.0)


def project_nonneg(x: np.ndarray) -> np.ndarray:
    """Entrywise max(x, 0)."""
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def projected_gradient(x: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """
    Projected gradient for the non-negativity constraint.

    Entries with x > 0 pass the gradient through; entries at the bound keep
    only a negative (descent-into-the-interior) component.
    """
    x = np.asarray(x, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if x.shape != grad.shape:
        raise ValueError(f"Shapes differ: x {x.shape}, grad {grad.shape}")
    return np.where(x > 0, grad, np.minimum(grad, 0.0))


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from an arbitrary tuple of printable parts."""
    key = ':'.join(str(part) for part in parts)
    digest = hashlib.sha256(key.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed))


def uniform_open(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws from (0, 1)."""
    return rng.uniform(_OPEN_LOW, 1.0, size=size)


def random_factor_pair(m: int, n: int, p: int, seed: int) -> FactorPair:
    """Strictly positive uniform(0,1) initial factors G (m x p), H (p x n)."""
    rng = make_rng(seed)
    G = uniform_open(rng, (m, p))
    H = uniform_open(rng, (p, n))
    return FactorPair(NonNegMatrix(G), NonNegMatrix(H))


def relative_change_small(previous: float, current: float, tol: float) -> bool:
    """|current - previous| <= tol * max(1, previous)."""
    return abs(current - previous) <= tol * max(1.0, abs(previous))


class Deadline:
    """Cooperative wall-clock budget, checked between iterations."""

    def __init__(self, seconds: float):
        self.seconds = seconds
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def expired(self) -> bool:
        return self.elapsed() >= self.seconds


class TraceRecorder:
    """Collects per-iteration RSE, infeasibility and objective values of one run."""

    LOG_EVERY = 50

    def __init__(self, algorithm: str, spec: ProblemSpec):
        self.algorithm = algorithm
        self.spec = spec
        self.rse: List[float] = []
        self.infeas: List[float] = []
        self.objective: List[float] = []
        self.flags: Dict[str, int] = {}

    def record(self, G: np.ndarray, H: np.ndarray, objective: Optional[float] = None) -> None:
        R = self.spec.R.data
        if objective is None:
            objective = objective_value(R, G, H, self.spec.alpha, self.spec.beta)
        self.rse.append(rse(R, G, H))
        self.infeas.append(infeasibility(self.spec.mode, G, H))
        self.objective.append(objective)
        iteration = len(self.rse) - 1
        if iteration % self.LOG_EVERY == 0:
            logger.debug(
                "%s iter %d: rse=%.6e infeas=%.6e objective=%.6e",
                self.algorithm, iteration, self.rse[-1], self.infeas[-1], objective
            )

    def flag(self, name: str) -> None:
        self.flags[name] = self.flags.get(name, 0) + 1

    @property
    def iterations(self) -> int:
        return max(0, len(self.rse) - 1)

    def report(self, G: np.ndarray, H: np.ndarray, termination: Termination, deadline: Deadline) -> SolveReport:
        report = SolveReport(
            algorithm=self.algorithm,
            factors=FactorPair(NonNegMatrix(G), NonNegMatrix(H)),
            alpha=self.spec.alpha,
            beta=self.spec.beta,
            termination=termination,
            iterations=self.iterations,
            wall_seconds=deadline.elapsed(),
            rse_trace=self.rse,
            infeas_trace=self.infeas,
            objective_trace=self.objective,
            flags=self.flags,
        )
        logger.info(
            "%s finished after %d iterations (%s): rse=%.6e infeas=%.6e",
            self.algorithm, report.iterations, termination.value,
            report.final_rse, report.final_infeas
        )
        return report
