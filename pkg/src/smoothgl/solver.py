"""ADMM solver for temporally smoothed sparse precision sequences.

Minimizes, over symmetric positive-definite Theta_1..Theta_T,

    sum_i [ -log det Theta_i + trace(S_i Theta_i) ]
      + lambda1 * sum_i ||Theta_i||_1
      + lambda2 * sum_{i>=2} ||Theta_i - Theta_{i-1}||_1

where ||.||_1 sums absolute values over all p^2 entries. The splitting
alternates an eigendecomposition-based Theta update (independent per time
point), a fused-lasso update of the auxiliary variables Z (independent per
matrix entry), and a scaled dual update. Z is returned as the estimate: it
carries exact zeros, which is what downstream edge detection needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .data import MatrixSequence
from .flsa import soft_threshold, tv_denoise

DEFAULT_EPS = 1e-5
DEFAULT_MAX_ITER = 500


class NumericFailure(RuntimeError):
    """Raised when the iteration produces non-finite values."""


@dataclass(frozen=True)
class SolverConfig:
    """Penalty weights and iteration controls.

    lambda1/lambda2 are the sparsity and fusion weights; gamma is the
    augmented-Lagrangian step (1 works for all problems at this scale).
    Convergence requires both max_i ||Theta_i - Z_i||_F^2 < eps1 and
    max_i ||Z_i - Z_i_prev||_F^2 < eps2. penalize_diagonal=True applies
    lambda1 to every entry including the diagonal; False restricts the
    sparsity penalty to off-diagonal entries (the fusion penalty always
    covers the full matrix).
    """

    lambda1: float
    lambda2: float
    gamma: float = 1.0
    eps1: float = DEFAULT_EPS
    eps2: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    penalize_diagonal: bool = True

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "gamma", "eps1", "eps2"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("penalty weights must be nonnegative")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


@dataclass(frozen=True)
class AdmmState:
    """One iteration's variables, for inspection or explicit warm starts."""

    theta: np.ndarray
    z: np.ndarray
    u: np.ndarray
    iteration: int
    primal_residual: float
    dual_residual: float
    converged: bool


@dataclass(frozen=True)
class SingleResult:
    """Solver output: Z as `precisions`, plus convergence diagnostics."""

    precisions: MatrixSequence
    iterations_used: int
    converged: bool
    objective: float
    history: tuple = field(repr=False)


def _as_stack(x) -> np.ndarray:
    if isinstance(x, MatrixSequence):
        return x.matrices
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"expected a (T, p, p) stack, got shape {arr.shape}")
    return arr


def objective(thetas, covs, lambda1: float, lambda2: float,
              penalize_diagonal: bool = True) -> float:
    """Evaluate the estimation objective at a precision sequence.

    Raises ValueError if any Theta_i is not positive definite (the Gaussian
    log-likelihood is undefined there).
    """
    th = _as_stack(thetas)
    S = _as_stack(covs)
    if th.shape != S.shape:
        raise ValueError(f"shape mismatch: thetas {th.shape} vs covs {S.shape}")
    sign, logdet = np.linalg.slogdet(th)
    if np.any(sign <= 0):
        raise ValueError("objective undefined: precision matrix not positive definite")
    fit = float(-np.sum(logdet) + np.einsum("tij,tji->", S, th))
    if penalize_diagonal:
        l1 = float(np.sum(np.abs(th)))
    else:
        off = np.abs(th).sum() - np.abs(np.diagonal(th, axis1=1, axis2=2)).sum()
        l1 = float(off)
    fuse = float(np.sum(np.abs(np.diff(th, axis=0)))) if th.shape[0] > 1 else 0.0
    return fit + lambda1 * l1 + lambda2 * fuse


def _objective_or_inf(th, S, lambda1, lambda2, penalize_diagonal=True) -> float:
    sign, _ = np.linalg.slogdet(th)
    if np.any(sign <= 0):
        return float("inf")
    return objective(th, S, lambda1, lambda2, penalize_diagonal)


def _spectral_map(w: np.ndarray, gamma: float) -> np.ndarray:
    # theta_r = (-s + sqrt(s^2 + 4 gamma)) / (2 gamma), evaluated on the
    # branch that avoids cancellation for each sign of s
    disc = np.sqrt(w * w + 4.0 * gamma)
    return np.where(w > 0, 2.0 / (w + disc), (disc - w) / (2.0 * gamma))


def _theta_update(S: np.ndarray, z: np.ndarray, u: np.ndarray, gamma: float) -> np.ndarray:
    M = S - gamma * (z - u)
    M = 0.5 * (M + M.transpose(0, 2, 1))
    w, V = np.linalg.eigh(M)
    th = _spectral_map(w, gamma)
    out = np.matmul(V * th[:, None, :], V.transpose(0, 2, 1))
    return 0.5 * (out + out.transpose(0, 2, 1))


@numba.njit(cache=True)
def _z_update_kernel(tpu, l1, l2, penalize_diag, out):  # pragma: no cover
    T, p, _ = tpu.shape
    y = np.empty(T)
    w = np.empty(T)
    for a in range(p):
        for b in range(a, p):
            for t in range(T):
                y[t] = tpu[t, a, b]
            tv_denoise(y, l2, w)
            lam = l1 if (a != b or penalize_diag) else 0.0
            soft_threshold(w, lam, w)
            for t in range(T):
                out[t, a, b] = w[t]
                out[t, b, a] = w[t]


def _z_update(theta: np.ndarray, u: np.ndarray, lambda1: float, lambda2: float,
              gamma: float, penalize_diagonal: bool) -> np.ndarray:
    tpu = theta + u
    out = np.empty_like(tpu)
    _z_update_kernel(tpu, lambda1 / gamma, lambda2 / gamma,
                     penalize_diagonal, out)
    return out


def theta_step(covs, z, u, gamma: float = 1.0) -> MatrixSequence:
    """Likelihood-plus-quadratic update: one eigendecomposition per time point.

    For each i, with A_i = S_i - gamma (Z_i - U_i) = V D V^T, returns
    V diag(theta) V^T where theta_r = (-d_r + sqrt(d_r^2 + 4 gamma)) / (2 gamma).
    Every output is symmetric positive definite.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    out = _theta_update(_as_stack(covs), _as_stack(z), _as_stack(u), gamma)
    return MatrixSequence(out, kind="precision")


def z_step(thetas, u, lambda1: float, lambda2: float, gamma: float = 1.0,
           penalize_diagonal: bool = True) -> MatrixSequence:
    """Fused-lasso update of the auxiliary variables.

    Each of the p(p+1)/2 unordered entries (k, l) is updated independently by
    solving a length-T fused-lasso problem on the signal (Theta_i + U_i)_{k,l}
    with weights lambda1/gamma and lambda2/gamma; the result is written to
    both (k, l) and (l, k), so outputs are exactly symmetric and sparse.
    """
    th = _as_stack(thetas)
    uu = _as_stack(u)
    if th.shape != uu.shape:
        raise ValueError(f"shape mismatch: thetas {th.shape} vs u {uu.shape}")
    out = _z_update(th, uu, lambda1, lambda2, gamma, penalize_diagonal)
    return MatrixSequence(out, kind="auxiliary")


def u_step(u, thetas, z) -> MatrixSequence:
    """Scaled dual update: U + (Theta - Z), element-wise."""
    out = _as_stack(u) + (_as_stack(thetas) - _as_stack(z))
    return MatrixSequence(out, kind="dual")


def solve(covs, config: SolverConfig, warm_start: AdmmState | None = None) -> SingleResult:
    """Run the ADMM iteration to convergence or max_iter.

    Starts from Theta = I, Z = U = 0 (or an explicit warm_start). Convergence
    requires max_i ||Theta_i - Z_i||_F^2 < eps1 and
    max_i ||Z_i - Z_i_prev||_F^2 < eps2 at the same iteration. On max_iter
    without convergence the last iterate is returned with converged=False;
    non-finite values raise NumericFailure.
    """
    S = _as_stack(covs)
    T, p, _ = S.shape
    if warm_start is not None:
        theta = np.array(warm_start.theta, dtype=float)
        z = np.array(warm_start.z, dtype=float)
        u = np.array(warm_start.u, dtype=float)
    else:
        theta = np.broadcast_to(np.eye(p), (T, p, p)).copy()
        z = np.zeros((T, p, p))
        u = np.zeros((T, p, p))
    gamma = config.gamma
    history = []
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        theta = _theta_update(S, z, u, gamma)
        z_new = _z_update(theta, u, config.lambda1, config.lambda2, gamma,
                          config.penalize_diagonal)
        diff_primal = theta - z_new
        diff_dual = z_new - z
        primal = float(np.max(np.einsum("tij,tij->t", diff_primal, diff_primal)))
        dual = float(np.max(np.einsum("tij,tij->t", diff_dual, diff_dual)))
        if not np.isfinite(primal) or not np.isfinite(dual):
            raise NumericFailure(
                f"non-finite residuals at iteration {iterations} "
                f"(lambda1={config.lambda1}, lambda2={config.lambda2})"
            )
        u = u + diff_primal
        z = z_new
        history.append((primal, dual))
        if primal < config.eps1 and dual < config.eps2:
            converged = True
            break
    obj = _objective_or_inf(z, S, config.lambda1, config.lambda2,
                            config.penalize_diagonal)
    return SingleResult(
        precisions=MatrixSequence(z, kind="precision", validate=False),
        iterations_used=iterations,
        converged=converged,
        objective=obj,
        history=tuple(history),
    )
