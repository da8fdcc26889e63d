#!/usr/bin/env python3
"""
Objective and Quality Metrics
Frobenius norms, the penalized orthogonal NMF objective, its gradients, and the
RSE / infeasibility measures shared by all solvers.

All functions are pure: they never modify their inputs.
"""

from typing import Any

import numpy as np

from src.models.errors import DimensionMismatchError
from src.models.factorization_models import (
    FactorPair, OrthogonalityMode, ProblemSpec, as_float_matrix
)


def frobenius_norm(M: Any) -> float:
    """Return sqrt of the sum of squared entries."""
    array = np.asarray(M, dtype=np.float64)
    if array.size == 0:
        raise DimensionMismatchError("Frobenius norm of an empty matrix")
    return float(np.sqrt(np.sum(array * array)))


def _squared_norm(M: np.ndarray) -> float:
    return float(np.sum(M * M))


def _check_conforming(R: np.ndarray, G: np.ndarray, H: np.ndarray) -> None:
    if G.shape[1] != H.shape[0] or R.shape != (G.shape[0], H.shape[1]):
        raise DimensionMismatchError(
            f"R {R.shape}, G {G.shape} and H {H.shape} do not conform"
        )


def gram_deviation_g(G: np.ndarray) -> np.ndarray:
    """G^T G - I."""
    return G.T @ G - np.eye(G.shape[1])


def gram_deviation_h(H: np.ndarray) -> np.ndarray:
    """H H^T - I."""
    return H @ H.T - np.eye(H.shape[0])


def rse(R: Any, G: Any, H: Any) -> float:
    """Root-square error ||R - GH||_F / (1 + ||R||_F)."""
    R, G, H = as_float_matrix(R), as_float_matrix(G), as_float_matrix(H)
    _check_conforming(R, G, H)
    return frobenius_norm(R - G @ H) / (1.0 + frobenius_norm(R))


def infeas_uni(G: Any) -> float:
    """Deviation of the columns of G from orthonormality, ||G^T G - I||_F / (1 + sqrt(p))."""
    G = as_float_matrix(G)
    p = G.shape[1]
    return frobenius_norm(gram_deviation_g(G)) / (1.0 + np.sqrt(p))


def infeas_bi(G: Any, H: Any) -> float:
    """Joint deviation of G columns and H rows from orthonormality."""
    G, H = as_float_matrix(G), as_float_matrix(H)
    if G.shape[1] != H.shape[0]:
        raise DimensionMismatchError(f"G {G.shape} and H {H.shape} do not conform")
    p = G.shape[1]
    numerator = frobenius_norm(gram_deviation_g(G)) + frobenius_norm(gram_deviation_h(H))
    return numerator / (1.0 + np.sqrt(p))


def infeasibility(mode: OrthogonalityMode, G: Any, H: Any) -> float:
    """Infeasibility measure matching the orthogonality mode."""
    if OrthogonalityMode(mode) is OrthogonalityMode.BI:
        return infeas_bi(G, H)
    return infeas_uni(G)


def objective_value(R: np.ndarray, G: np.ndarray, H: np.ndarray, alpha: float, beta: float) -> float:
    """Array form of the penalized objective."""
    value = 0.5 * _squared_norm(R - G @ H)
    if alpha:
        value += 0.5 * alpha * _squared_norm(gram_deviation_h(H))
    if beta:
        value += 0.5 * beta * _squared_norm(gram_deviation_g(G))
    return value


def block_objective_g(R: np.ndarray, G: np.ndarray, H: np.ndarray, beta: float) -> float:
    """F_H(G): the part of the penalized objective that depends on G."""
    return objective_value(R, G, H, 0.0, beta)


def block_objective_h(R: np.ndarray, G: np.ndarray, H: np.ndarray, alpha: float) -> float:
    """F_G(H): the part of the penalized objective that depends on H."""
    return objective_value(R, G, H, alpha, 0.0)


def gradient_g(R: np.ndarray, G: np.ndarray, H: np.ndarray, beta: float) -> np.ndarray:
    """G H H^T - R H^T + beta G G^T G - beta G."""
    grad = G @ (H @ H.T) - R @ H.T
    if beta:
        grad = grad + beta * (G @ (G.T @ G)) - beta * G
    return grad


def gradient_h(R: np.ndarray, G: np.ndarray, H: np.ndarray, alpha: float) -> np.ndarray:
    """G^T G H - G^T R + alpha H H^T H - alpha H."""
    grad = (G.T @ G) @ H - G.T @ R
    if alpha:
        grad = grad + alpha * ((H @ H.T) @ H) - alpha * H
    return grad


def _unpack(spec: ProblemSpec, fp: FactorPair):
    R = spec.R.data
    G, H = fp.arrays()
    _check_conforming(R, G, H)
    return R, G, H


def penalized_objective(spec: ProblemSpec, fp: FactorPair) -> float:
    """
    Penalized objective of the problem.

    F(G,H) = 1/2 ||R - GH||^2 + alpha/2 ||HH^T - I||^2 + beta/2 ||G^T G - I||^2,
    with the alpha term absent in uni-orthogonal mode.
    """
    R, G, H = _unpack(spec, fp)
    return objective_value(R, G, H, spec.alpha, spec.beta)


def grad_G(spec: ProblemSpec, fp: FactorPair) -> np.ndarray:
    """Gradient of the penalized objective with respect to G."""
    R, G, H = _unpack(spec, fp)
    return gradient_g(R, G, H, spec.beta)


def grad_H(spec: ProblemSpec, fp: FactorPair) -> np.ndarray:
    """Gradient of the penalized objective with respect to H."""
    R, G, H = _unpack(spec, fp)
    return gradient_h(R, G, H, spec.alpha)


def projected_gradient_norm(spec: ProblemSpec, fp: FactorPair) -> float:
    """||grad^P F(G,H)||_F taken over both blocks."""
    from src.services.solver_common import projected_gradient

    R, G, H = _unpack(spec, fp)
    pg_G = projected_gradient(G, gradient_g(R, G, H, spec.beta))
    pg_H = projected_gradient(H, gradient_h(R, G, H, spec.alpha))
    return float(np.sqrt(_squared_norm(pg_G) + _squared_norm(pg_H)))
