"""Dense symmetric eigendecompositions and the matrix norms used throughout.

All routines take plain ``numpy`` arrays. Eigenvalues are always reported in
decreasing *algebraic* order.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .exceptions import InvalidInputError

TOL_EIG = 1e-9


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_symmetric(m, check_symmetry=True) -> np.ndarray:
    """Validate ``m`` as a finite square symmetric float matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise InvalidInputError("matrix must have at least one row")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    if check_symmetry and not np.array_equal(m, m.T):
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.T)) > 1e-12 * scale:
            raise InvalidInputError("matrix is not symmetric")
    return m


def _sign_normalize(vectors: np.ndarray) -> np.ndarray:
    # first nonzero coordinate of every column made positive
    vectors = np.array(vectors, dtype=float, copy=True)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        nz = np.flatnonzero(col)
        if nz.size and col[nz[0]] < 0:
            vectors[:, j] = -col
    return vectors


def eigvals_sym(m) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, largest first."""
    m = as_symmetric(m)
    return linalg.eigvalsh(m, check_finite=False)[::-1].copy()


def leading_eigval(m) -> float:
    """Largest algebraic eigenvalue only."""
    m = as_symmetric(m)
    n = m.shape[0]
    return float(
        linalg.eigvalsh(m, subset_by_index=[n - 1, n - 1], check_finite=False)[0]
    )


def eigh_sym(m) -> SpectralDecomposition:
    """Full decomposition, columns paired with decreasing eigenvalues.

    Eigenvectors are sign-normalized so that the first nonzero coordinate of each
    column is positive.
    """
    m = as_symmetric(m)
    w, v = linalg.eigh(m, check_finite=False)
    return SpectralDecomposition(w[::-1].copy(), _sign_normalize(v[:, ::-1]))


def eigh_topk(m, k: int):
    """Top-``k`` eigenpairs as ``(values, vectors)`` with ``vectors`` of shape n x k."""
    m = as_symmetric(m)
    n = m.shape[0]
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise InvalidInputError(f"k must be an integer in [1, {n}], got {k!r}")
    w, v = linalg.eigh(m, subset_by_index=[n - k, n - 1], check_finite=False)
    return w[::-1].copy(), _sign_normalize(v[:, ::-1])


def op_norm(m) -> float:
    """Spectral norm of a symmetric matrix, ``max(|lambda_max|, |lambda_min|)``."""
    w = eigvals_sym(m)
    return float(max(abs(w[0]), abs(w[-1])))


def two_inf_norm(m) -> float:
    """Largest Euclidean row norm."""
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[None, :]
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    if m.size == 0:
        return 0.0
    return float(np.sqrt(np.max(np.sum(m * m, axis=1))))
