"""Symmetric eigendecomposition primitive for the solver's theta update.

Backed by the dense symmetric LAPACK driver; inputs are symmetrized first so
tiny floating-point asymmetry upstream cannot change the branch taken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues in ascending order; eigenvectors as orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(A: np.ndarray) -> EigenPair:
    """Decompose a symmetric matrix A into V diag(w) V^T.

    A is symmetrized as (A + A^T)/2 before decomposition; entries must be
    finite and the input symmetric to about 1e-8 to be meaningful.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    sym = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(sym)
    return EigenPair(w, V)


def eigh_sequence(As: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched decomposition of a (T, p, p) stack of symmetric matrices.

    Returns (w, V) with w of shape (T, p) ascending per matrix and V of shape
    (T, p, p) holding orthonormal eigenvector columns.
    """
    As = np.asarray(As, dtype=float)
    if not np.all(np.isfinite(As)):
        raise ValueError("matrix stack contains non-finite entries")
    sym = 0.5 * (As + As.transpose(0, 2, 1))
    return np.linalg.eigh(sym)
