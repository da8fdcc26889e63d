#!/usr/bin/env python3
"""
Synthetic Instance Generator
Builds UNION (orthonormal G) and BION (orthonormal G and H) instances R = G H.
"""

import logging
from typing import Callable, Optional

import numpy as np

from src.models.errors import InstanceGenerationError
from src.models.factorization_models import InstanceKind, InstanceTriple, NonNegMatrix
from src.services.solver_common import make_rng, uniform_open

logger = logging.getLogger(__name__)

# Columns with a Euclidean norm below this count as empty
ZERO_COLUMN_NORM = 1e-8

# (rng, rows, cols) -> column index chosen for every row
PositionSampler = Callable[[np.random.Generator, int, int], np.ndarray]


def _uniform_positions(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.integers(0, cols, size=rows)


def _repair_empty_columns(G: np.ndarray) -> None:
    """Move single entries into (near-)empty columns until every column is populated."""
    while True:
        norms = np.linalg.norm(G, axis=0)
        deficient = np.flatnonzero(norms < ZERO_COLUMN_NORM)
        if deficient.size == 0:
            return
        target = int(deficient[0])
        # a donor keeps at least one entry, so the loop cannot cycle
        counts = np.count_nonzero(G, axis=0)
        eligible = (counts >= 2) & (norms >= ZERO_COLUMN_NORM)
        if not eligible.any():
            raise InstanceGenerationError("Zero-column repair found no column with an entry to spare")
        donor = int(np.argmax(np.where(eligible, norms, -1.0)))
        row = int(np.flatnonzero(G[:, donor])[0])
        logger.debug("Moving entry (%d, %d) into empty column %d", row, donor, target)
        G[row, target] = G[row, donor]
        G[row, donor] = 0.0


def generate_orthonormal_factor(rows: int, cols: int, rng_seed: int,
                                position_sampler: Optional[PositionSampler] = None) -> np.ndarray:
    """
    Non-negative matrix with disjoint-support, unit-norm columns.

    Every row gets exactly one nonzero at a uniformly chosen column, with a value drawn
    uniformly from (0, 1). Empty columns are repaired by moving the first nonzero of the
    largest column into them; finally each column is scaled to unit norm.

    Args:
        rows: Number of rows (>= cols)
        cols: Number of columns
        rng_seed: Seed of the PCG64 generator
        position_sampler: Replaces the uniform column choice (used to force repairs)

    Returns:
        rows x cols array with G^T G = I
    """
    if cols < 1 or rows < cols:
        raise InstanceGenerationError(f"Need rows >= cols >= 1, got rows={rows}, cols={cols}")
    rng = make_rng(rng_seed)
    sampler = position_sampler or _uniform_positions
    positions = np.asarray(sampler(rng, rows, cols), dtype=np.int64)
    values = uniform_open(rng, rows)

    G = np.zeros((rows, cols))
    G[np.arange(rows), positions] = values
    _repair_empty_columns(G)
    return G / np.linalg.norm(G, axis=0)


def generate_instance(n: int, k: int, kind: InstanceKind, id: int, seed: int) -> InstanceTriple:
    """
    Build one synthetic instance.

    BION: G (n x k) and H^T (n x k) both have orthonormal columns.
    UNION: G as above, H (k x n) dense uniform(0, 1).

    Args:
        n: Size of the square data matrix
        k: Construction rank, n >= 2k
        kind: UNION or BION
        id: Replicate index
        seed: 64-bit instance seed

    Returns:
        InstanceTriple with R = G_true H_true
    """
    kind = InstanceKind(kind)
    if k < 1 or n < 2 * k:
        raise InstanceGenerationError(f"Need n >= 2k and k >= 1, got n={n}, k={k}")
    seed_G, seed_H = (int(s) for s in np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64))

    G = generate_orthonormal_factor(n, k, seed_G)
    if kind is InstanceKind.BION:
        H = generate_orthonormal_factor(n, k, seed_H).T.copy()
    else:
        H = uniform_open(make_rng(seed_H), (k, n))
    R = G @ H

    return InstanceTriple(
        R=NonNegMatrix(R),
        G_true=NonNegMatrix(G),
        H_true=NonNegMatrix(H),
        n=n,
        k=k,
        id=id,
        kind=kind,
        seed=seed,
    )
