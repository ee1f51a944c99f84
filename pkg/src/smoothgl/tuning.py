"""Data-driven selection of the kernel width and the penalty weights.

The kernel width h is chosen by maximizing the leave-one-out predictive
log-likelihood of the kernel estimates; the penalty pair (lambda1, lambda2)
is then chosen on a grid by minimizing AIC, where the degrees of freedom
count blocks of constant nonzero values in each off-diagonal entry's
trajectory (a fused estimate that never changes spends one degree of
freedom per active pair, not one per time point).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .data import MatrixSequence, as_values
from .kernels import KernelSpec, kernel_weight_matrix
from .solver import NumericFailure, SolverConfig, solve

SINGULARITY_JITTER = 1e-6
BLOCK_TOLERANCE = 1e-6

DEFAULT_LAMBDA_GRID = (0.01, 0.03, 0.1, 0.3, 1.0, 3.0)
DEFAULT_H_FRACTIONS = (1 / 20, 1 / 10, 1 / 6, 1 / 4, 1 / 3, 1 / 2)


class TuningFailure(RuntimeError):
    """Raised when every candidate in a tuning grid is unusable."""


@dataclass(frozen=True)
class TuningGrid:
    """Candidate h values and penalty values, each sorted ascending."""

    h_values: tuple
    lambda1_values: tuple = DEFAULT_LAMBDA_GRID
    lambda2_values: tuple = DEFAULT_LAMBDA_GRID

    def __post_init__(self):
        for name in ("h_values", "lambda1_values", "lambda2_values"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"{name} must be nonempty")
            if not all(np.isfinite(v) for v in vals):
                raise ValueError(f"{name} contains non-finite values")
            if list(vals) != sorted(vals):
                raise ValueError(f"{name} must be sorted ascending")
            if name == "h_values" and vals[0] <= 0:
                raise ValueError("h values must be positive")
            if name != "h_values" and vals[0] < 0:
                raise ValueError("penalty values must be nonnegative")
            object.__setattr__(self, name, vals)

    @classmethod
    def default(cls, T: int,
                lambda1_values=DEFAULT_LAMBDA_GRID,
                lambda2_values=DEFAULT_LAMBDA_GRID) -> "TuningGrid":
        """Default grid for a series of length T: h spans T/20 .. T/2."""
        hs = sorted({max(1.0, float(round(T * f))) for f in DEFAULT_H_FRACTIONS})
        return cls(tuple(hs), tuple(lambda1_values), tuple(lambda2_values))


@dataclass(frozen=True)
class TuningReport:
    """Chosen values plus the full score tables behind them."""

    chosen_h: float
    cv_table: tuple          # ((h, score), ...)
    chosen_lambda1: float
    chosen_lambda2: float
    aic_table: tuple         # (((lambda1, lambda2), score), ...)
    dof_table: tuple         # (((lambda1, lambda2), K), ...)

    def to_json(self) -> dict:
        def clean(x):
            x = float(x)
            return x if math.isfinite(x) else None

        return {
            "chosen_h": self.chosen_h,
            "cv_table": [
                {"h": h, "score": clean(s)} for h, s in sorted(self.cv_table)
            ],
            "chosen_lambda1": self.chosen_lambda1,
            "chosen_lambda2": self.chosen_lambda2,
            "aic_table": [
                {"lambda1": l1, "lambda2": l2, "score": clean(s)}
                for (l1, l2), s in sorted(self.aic_table)
            ],
            "dof_table": [
                {"lambda1": l1, "lambda2": l2, "k": int(k)}
                for (l1, l2), k in sorted(self.dof_table)
            ],
        }

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _loo_moments(X: np.ndarray, W: np.ndarray, i: int, jitter: float = SINGULARITY_JITTER):
    """Leave-one-out mean and covariance at time i.

    Observation i is removed from every sum: from the per-time means xbar_j
    that center the residuals, from the covariance average, and from the mean
    at i itself.
    """
    T, p = X.shape
    w_i = W[i]
    col_sums = W.sum(axis=1)
    denom_means = col_sums - W[:, i]
    if np.any(denom_means <= 1e-12):
        return None, None
    xbar_loo = (W @ X - np.outer(W[:, i], X[i])) / denom_means[:, None]
    resid = X - xbar_loo
    w_masked = w_i.copy()
    w_masked[i] = 0.0
    denom_cov = w_masked.sum()
    if denom_cov <= 1e-12:
        return None, None
    S = (resid.T * w_masked) @ resid / denom_cov
    S = 0.5 * (S + S.T)
    return xbar_loo[i], S


def loo_loglik(ts, spec: KernelSpec, i: int) -> float:
    """Gaussian log-score of observation i under leave-one-out estimates.

    Returns -1/2 log det(S_-i) - 1/2 (X_i - mu_-i)^T S_-i^{-1} (X_i - mu_-i),
    without the constant -p/2 log(2 pi). Singular covariances are jittered by
    1e-6 * mean(diag) on the diagonal; unrecoverable ones score -inf.
    """
    X = as_values(ts)
    T, p = X.shape
    if T < 3:
        raise ValueError(f"leave-one-out needs at least 3 time points, got {T}")
    if not 0 <= i < T:
        raise ValueError(f"time index {i} out of range [0, {T})")
    W = kernel_weight_matrix(spec, T)
    mu, S = _loo_moments(X, W, i)
    if mu is None:
        return float("-inf")
    sign, logdet = np.linalg.slogdet(S)
    if sign <= 0:
        S = S + SINGULARITY_JITTER * float(np.mean(np.diag(S))) * np.eye(p)
        sign, logdet = np.linalg.slogdet(S)
        if sign <= 0:
            return float("-inf")
    r = X[i] - mu
    try:
        quad = float(r @ np.linalg.solve(S, r))
    except np.linalg.LinAlgError:
        return float("-inf")
    return float(-0.5 * logdet - 0.5 * quad)


def cv_score(ts, spec: KernelSpec) -> float:
    """Sum of leave-one-out log-scores over all time points."""
    X = as_values(ts)
    T, p = X.shape
    if T < 3:
        raise ValueError(f"leave-one-out needs at least 3 time points, got {T}")
    W = kernel_weight_matrix(spec, T)
    total = 0.0
    eye = np.eye(p)
    for i in range(T):
        mu, S = _loo_moments(X, W, i)
        if mu is None:
            return float("-inf")
        sign, logdet = np.linalg.slogdet(S)
        if sign <= 0:
            S = S + SINGULARITY_JITTER * float(np.mean(np.diag(S))) * eye
            sign, logdet = np.linalg.slogdet(S)
            if sign <= 0:
                return float("-inf")
        r = X[i] - mu
        try:
            quad = float(r @ np.linalg.solve(S, r))
        except np.linalg.LinAlgError:
            return float("-inf")
        total += -0.5 * logdet - 0.5 * quad
    return float(total)


def select_h(ts, grid: TuningGrid, kind: str = "gaussian") -> tuple[float, tuple]:
    """Maximize the cross-validation score over grid.h_values.

    Ties go to the smallest h (the most adaptive width). Raises TuningFailure
    if every candidate scores -inf.
    """
    table = []
    for h in grid.h_values:
        spec = KernelSpec(kind, h)
        try:
            score = cv_score(ts, spec)
        except ValueError:
            score = float("-inf")
        table.append((float(h), score))
    best_h, best_score = max(table, key=lambda hs: (hs[1], -hs[0]))
    if not math.isfinite(best_score):
        raise TuningFailure("every kernel width scored -inf in cross-validation")
    return best_h, tuple(table)


def degrees_of_freedom(precisions, tolerance: float = BLOCK_TOLERANCE) -> int:
    """Count blocks of constant nonzero value across off-diagonal trajectories.

    For each unordered pair r < s, each time its entry changes value while
    nonzero contributes one block, plus one block if the pair is nonzero at
    the first time point. Equality and nonzeroness are tested with
    `tolerance`.
    """
    arr = precisions.matrices if isinstance(precisions, MatrixSequence) else np.asarray(precisions, dtype=float)
    if arr.ndim != 3:
        raise ValueError(f"expected a (T, p, p) stack, got shape {arr.shape}")
    T, p, _ = arr.shape
    iu = np.triu_indices(p, k=1)
    traces = arr[:, iu[0], iu[1]]             # (T, n_pairs)
    nonzero = np.abs(traces) > tolerance
    k = int(np.count_nonzero(nonzero[0]))
    if T > 1:
        changed = np.abs(np.diff(traces, axis=0)) > tolerance
        k += int(np.count_nonzero(changed & nonzero[1:]))
    return k


def aic(precisions, covs, K: int) -> float:
    """2 * sum_i (-log det Theta_i + trace(S_i Theta_i)) + 2K.

    Returns +inf when any Theta_i is not positive definite (degenerate fits
    never win the grid search).
    """
    th = precisions.matrices if isinstance(precisions, MatrixSequence) else np.asarray(precisions, dtype=float)
    S = covs.matrices if isinstance(covs, MatrixSequence) else np.asarray(covs, dtype=float)
    sign, logdet = np.linalg.slogdet(th)
    if np.any(sign <= 0):
        return float("inf")
    fit = float(-np.sum(logdet) + np.einsum("tij,tji->", S, th))
    return 2.0 * fit + 2.0 * int(K)


def _aic_grid(covs, grid: TuningGrid, gamma=1.0, eps1=None, eps2=None,
              max_iter=None, penalize_diagonal=True, tolerance=BLOCK_TOLERANCE,
              keep_best=False):
    """Evaluate AIC at every (lambda1, lambda2) pair; shared by the tuners."""
    aic_table = []
    dof_table = []
    best = None
    best_key = None
    best_result = None
    kwargs = {}
    if eps1 is not None:
        kwargs["eps1"] = eps1
    if eps2 is not None:
        kwargs["eps2"] = eps2
    if max_iter is not None:
        kwargs["max_iter"] = max_iter
    n_solves = 0
    n_converged = 0
    for l1 in grid.lambda1_values:
        for l2 in grid.lambda2_values:
            cfg = SolverConfig(l1, l2, gamma=gamma,
                               penalize_diagonal=penalize_diagonal, **kwargs)
            try:
                result = solve(covs, cfg)
            except NumericFailure:
                aic_table.append(((l1, l2), float("inf")))
                dof_table.append(((l1, l2), 0))
                continue
            n_solves += 1
            n_converged += int(result.converged)
            K = degrees_of_freedom(result.precisions, tolerance)
            score = aic(result.precisions, covs, K)
            aic_table.append(((l1, l2), score))
            dof_table.append(((l1, l2), K))
            # ties prefer parsimony: larger lambda1, then larger lambda2
            key = (score, -l1, -l2)
            if best is None or key < best_key:
                best = (l1, l2)
                best_key = key
                best_result = result if keep_best else None
    if best is None or not math.isfinite(best_key[0]):
        raise TuningFailure("every (lambda1, lambda2) grid point scored +inf")
    out = (best[0], best[1], tuple(aic_table), tuple(dof_table))
    if keep_best:
        return out + (best_result, (n_converged, n_solves))
    return out + ((n_converged, n_solves),)


def select_lambdas(ts, spec: KernelSpec, grid: TuningGrid, gamma: float = 1.0,
                   eps1: float | None = None, eps2: float | None = None,
                   max_iter: int | None = None, penalize_diagonal: bool = True,
                   ) -> tuple[float, float, tuple]:
    """Minimize AIC over the (lambda1, lambda2) grid at a fixed kernel.

    Runs the solver from a cold start at every pair. Ties prefer the larger
    lambda1, then the larger lambda2. Grid points whose fit is degenerate
    (non-PD) or numerically failed score +inf; if all do, raises
    TuningFailure.
    """
    from .kernels import estimate_covariances

    covs = estimate_covariances(ts, spec)
    l1, l2, aic_table, _dof, _conv = _aic_grid(
        covs, grid, gamma=gamma, eps1=eps1, eps2=eps2, max_iter=max_iter,
        penalize_diagonal=penalize_diagonal)
    return l1, l2, aic_table
