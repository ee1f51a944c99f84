"""Kernel-weighted estimation of time-varying sample means and covariances.

Each time point i gets its own mean and covariance estimate, built from all
observations weighted by their temporal distance to i. A Gaussian kernel
gives smoothly decaying weights exp(-(i-j)^2 / h); a uniform kernel gives a
sliding window with the sharp cutoff |i-j| < h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import MatrixSequence, as_values

KERNEL_KINDS = ("gaussian", "uniform")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind ("gaussian" or "uniform") and positive width h."""

    kind: str
    h: float

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not self.h > 0:
            raise ValueError(f"kernel width must be positive, got {self.h}")


def kernel_weight(spec: KernelSpec, i: int, j: int) -> float:
    """Weight of observation j when estimating at time i (symmetric in i, j)."""
    d = float(i) - float(j)
    if spec.kind == "gaussian":
        return float(np.exp(-(d * d) / spec.h))
    return 1.0 if abs(d) < spec.h else 0.0


def kernel_weight_matrix(spec: KernelSpec, T: int) -> np.ndarray:
    """The full (T, T) weight matrix W[i, j] = kernel_weight(spec, i, j)."""
    d = np.arange(T, dtype=float)
    diff = d[:, None] - d[None, :]
    if spec.kind == "gaussian":
        return np.exp(-(diff * diff) / spec.h)
    return (np.abs(diff) < spec.h).astype(float)


def _check_uniform_width(spec: KernelSpec):
    if spec.kind == "uniform" and spec.h < 1:
        raise ValueError(
            f"uniform kernel width h={spec.h} is degenerate: each point needs "
            "at least its own observation (h >= 1)"
        )


def estimate_means(ts, spec: KernelSpec) -> np.ndarray:
    """Kernel-weighted means, one p-vector per time point.

    Returns the (T, p) array with xbar_i = sum_j K_h(i,j) X_j / sum_j K_h(i,j).
    """
    _check_uniform_width(spec)
    X = as_values(ts)
    W = kernel_weight_matrix(spec, X.shape[0])
    return (W @ X) / W.sum(axis=1, keepdims=True)


def estimate_covariances(ts, spec: KernelSpec, center_at_estimate: bool = False) -> MatrixSequence:
    """Kernel-weighted covariances S_i, one p x p matrix per time point.

    S_i = sum_j K_h(i,j) (X_j - xbar_j)^T (X_j - xbar_j) / sum_j K_h(i,j),
    centering each observation at its own time's mean xbar_j. With
    ``center_at_estimate`` every residual is instead taken about xbar_i, the
    mean at the time point being estimated (a sensitivity check; default off).

    Returns
    -------
    MatrixSequence of kind "covariance"; each S_i is symmetric PSD.
    """
    _check_uniform_width(spec)
    X = as_values(ts)
    T, p = X.shape
    W = kernel_weight_matrix(spec, T)
    denom = W.sum(axis=1)
    xbar = (W @ X) / denom[:, None]
    if center_at_estimate:
        covs = np.empty((T, p, p))
        for i in range(T):
            R = X - xbar[i]
            covs[i] = (R.T * W[i]) @ R / denom[i]
    else:
        R = X - xbar
        # S_i = R^T diag(W[i]) R / denom_i, batched over i
        covs = np.einsum("ij,jk,jl->ikl", W, R, R, optimize=True) / denom[:, None, None]
    covs = 0.5 * (covs + covs.transpose(0, 2, 1))
    return MatrixSequence(covs, kind="covariance")
