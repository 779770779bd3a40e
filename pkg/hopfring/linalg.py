"""
Linear Algebra over GF(p)
=========================

Dense Gaussian elimination on numpy integer arrays. Degrees handled by the
verifiers are small, so dense elimination per degree is enough.
"""

from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from .errors import SingularMatrixError

logger = logging.getLogger(__name__)


def as_matrix(rows: Sequence[Sequence[int]], p: int, n_cols: Optional[int] = None) -> np.ndarray:
    if len(rows) == 0:
        return np.zeros((0, n_cols or 0), dtype=np.int64)
    return np.array(rows, dtype=np.int64) % p


def row_reduce(mat: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form over GF(p).

    Args:
        mat: Integer matrix
        p: Prime modulus

    Returns:
        (reduced matrix, list of pivot columns)
    """
    m = np.array(mat, dtype=np.int64) % p
    n_rows, n_cols = m.shape
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        nonzero = np.nonzero(m[r:, c])[0]
        if nonzero.size == 0:
            continue
        pivot = r + int(nonzero[0])
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        for i in range(n_rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank_mod_p(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return len(row_reduce(mat, p)[1])


def det_mod_p(mat: np.ndarray, p: int) -> int:
    m = np.array(mat, dtype=np.int64) % p
    n = m.shape[0]
    if n == 0:
        return 1
    det = 1
    for i in range(n):
        nonzero = np.nonzero(m[i:, i])[0]
        if nonzero.size == 0:
            return 0
        pivot = i + int(nonzero[0])
        if pivot != i:
            m[[i, pivot]] = m[[pivot, i]]
            det = -det
        pivot_val = int(m[i, i])
        det = det * pivot_val % p
        inv = pow(pivot_val, -1, p)
        for r in range(i + 1, n):
            factor = m[r, i] * inv % p
            if factor:
                m[r, i:] = (m[r, i:] - factor * m[i, i:]) % p
    return det % p


def inverse_mod_p(mat: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over GF(p); raises SingularMatrixError."""
    m = np.array(mat, dtype=np.int64) % p
    n = m.shape[0]
    augmented = np.concatenate([m, np.eye(n, dtype=np.int64)], axis=1)
    reduced, pivots = row_reduce(augmented, p)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError(f"matrix is singular mod {p}")
    return reduced[:, n:] % p


def solve_in_span(rows: np.ndarray, vector: np.ndarray, p: int) -> Optional[np.ndarray]:
    """
    Coefficients c with c @ rows == vector mod p, or None if vector is not
    in the row span.
    """
    rows = np.array(rows, dtype=np.int64) % p
    vector = np.array(vector, dtype=np.int64) % p
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=np.int64) if not vector.any() else None
    # solve rows^T c = vector
    system = np.concatenate([rows.T, vector.reshape(-1, 1)], axis=1)
    reduced, pivots = row_reduce(system, p)
    n_unknowns = rows.shape[0]
    if n_unknowns in pivots:
        return None
    solution = np.zeros(n_unknowns, dtype=np.int64)
    for r, c in enumerate(pivots):
        solution[c] = reduced[r, -1]
    return solution % p


def is_unit_triangular(mat: np.ndarray, p: int) -> bool:
    """Lower triangular with nonzero diagonal, i.e. invertible by back substitution."""
    m = np.array(mat, dtype=np.int64) % p
    if m.shape[0] != m.shape[1]:
        return False
    if np.any(np.triu(m, k=1)):
        return False
    return bool(np.all(np.diag(m) != 0))
