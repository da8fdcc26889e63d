#!/usr/bin/env python3
"""
Instance File Store
Reads and writes instance triples as whitespace-delimited text matrices named
NMF_{BIOG|UNION}_data_{R|G|H}_n=<n>_k=<k>_id=<id>.txt.
"""

import logging
import re
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from src.models.errors import (
    InstanceConsistencyError, InstanceFilenameError, InstanceIOError,
    MatrixFormatError, RaggedRowsError
)
from src.models.factorization_models import InstanceKind, InstanceTriple, NonNegMatrix

logger = logging.getLogger(__name__)

FILENAME_PATTERN = re.compile(
    r'^NMF_(?P<token>BIOG|UNION)_data_(?P<part>[RGH])_n=(?P<n>\d+)_k=(?P<k>\d+)_id=(?P<id>\d+)\.txt$'
)
TOKEN_TO_KIND = {'BIOG': InstanceKind.BION, 'UNION': InstanceKind.UNION}

# Entrywise slack when checking R against the product of its companion factors
PRODUCT_TOLERANCE = 1e-12

PathLike = Union[str, Path]


def instance_filename(kind: InstanceKind, part: str, n: int, k: int, id: int) -> str:
    """File name of one matrix of an instance triple."""
    return f"NMF_{InstanceKind(kind).file_token}_data_{part}_n={n}_k={k}_id={id}.txt"


def parse_instance_filename(path: PathLike) -> Dict[str, object]:
    """
    Extract kind, part, n, k and id from an instance file name.

    Raises:
        InstanceFilenameError: if the name does not follow the convention
    """
    name = Path(path).name
    match = FILENAME_PATTERN.match(name)
    if not match:
        raise InstanceFilenameError(f"Not an instance file name: {name}")
    return {
        'kind': TOKEN_TO_KIND[match.group('token')],
        'part': match.group('part'),
        'n': int(match.group('n')),
        'k': int(match.group('k')),
        'id': int(match.group('id')),
    }


def write_matrix(M: np.ndarray, path: PathLike) -> None:
    """Write one matrix, one row per line, 17 significant digits."""
    try:
        np.savetxt(path, np.asarray(M, dtype=np.float64), fmt='%.17g', delimiter=' ')
    except OSError as e:
        raise InstanceIOError(f"Could not write matrix ({e.strerror or e})", str(path)) from e


def read_matrix(path: PathLike) -> np.ndarray:
    """
    Parse a whitespace-delimited text matrix.

    Raises:
        InstanceIOError: if the file cannot be read
        MatrixFormatError: if a field is not a number or the file is empty
        RaggedRowsError: if rows differ in length
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.readlines()
    except OSError as e:
        raise InstanceIOError(f"Could not read matrix ({e.strerror or e})", str(path)) from e

    rows = []
    width = None
    for line_number, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            continue
        try:
            row = [float(field) for field in fields]
        except ValueError as e:
            raise MatrixFormatError(f"Malformed number: {e}", str(path), line_number) from e
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRowsError(
                f"Row has {len(row)} fields, expected {width}", str(path), line_number
            )
        rows.append(row)

    if not rows:
        raise MatrixFormatError("File contains no matrix rows", str(path))
    return np.array(rows, dtype=np.float64)


def write_instance(t: InstanceTriple, dir: PathLike) -> Dict[str, Path]:
    """
    Save an instance triple as three text files.

    Args:
        t: Instance to write (G_true and H_true must be present)
        dir: Output directory (created if missing)

    Returns:
        Mapping of 'R', 'G', 'H' to the written paths
    """
    if dir is None or str(dir).strip() == '':
        raise InstanceIOError("Output directory must not be empty", repr(dir))
    if t.G_true is None or t.H_true is None:
        raise ValueError("Instance has no true factors to write")
    directory = Path(dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InstanceIOError(f"Could not create directory ({e.strerror or e})", str(directory)) from e

    paths = {}
    for part, matrix in (('R', t.R), ('G', t.G_true), ('H', t.H_true)):
        path = directory / instance_filename(t.kind, part, t.n, t.k, t.id)
        write_matrix(matrix.data, path)
        paths[part] = path
    logger.debug("Wrote %s instance n=%d k=%d id=%d to %s", t.kind.value, t.n, t.k, t.id, directory)
    return paths


def _companion(path_R: Path, part: str) -> Path:
    return path_R.with_name(path_R.name.replace('_data_R_', f'_data_{part}_', 1))


def read_instance(path_R: PathLike, seed: Optional[int] = None) -> InstanceTriple:
    """
    Load an instance from its R file; companion G/H files are optional.

    When both companions exist, R must equal G H entrywise within 1e-12.

    Args:
        path_R: Path to the NMF_..._data_R_... file
        seed: Instance seed to record, if known

    Returns:
        InstanceTriple (G_true / H_true None when the companions are absent)
    """
    path_R = Path(path_R)
    meta = parse_instance_filename(path_R)
    if meta['part'] != 'R':
        raise InstanceFilenameError(f"Expected an R file, got part {meta['part']}: {path_R.name}")
    if not path_R.exists():
        raise InstanceIOError("Instance file not found", str(path_R))

    R = read_matrix(path_R)
    n, k = meta['n'], meta['k']
    if R.shape != (n, n):
        raise InstanceConsistencyError(f"R is {R.shape[0]}x{R.shape[1]} but the file name says n={n}")

    G = H = None
    path_G, path_H = _companion(path_R, 'G'), _companion(path_R, 'H')
    if path_G.exists() and path_H.exists():
        G, H = read_matrix(path_G), read_matrix(path_H)
        if G.shape != (n, k) or H.shape != (k, n):
            raise InstanceConsistencyError(
                f"Factor shapes {G.shape} / {H.shape} do not match n={n}, k={k}"
            )
        deviation = float(np.max(np.abs(R - G @ H)))
        if deviation > PRODUCT_TOLERANCE:
            raise InstanceConsistencyError(f"R differs from G H by {deviation:.3e} in {path_R.name}")

    return InstanceTriple(
        R=NonNegMatrix(R),
        G_true=NonNegMatrix(G) if G is not None else None,
        H_true=NonNegMatrix(H) if H is not None else None,
        n=n,
        k=k,
        id=meta['id'],
        kind=meta['kind'],
        seed=seed,
    )
