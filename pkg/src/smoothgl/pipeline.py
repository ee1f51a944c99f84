"""End-to-end fitting: kernel covariances, tuning, solve.

Thin glue over kernels/tuning/solver used by the CLI, the benchmark harness
and the narrative demos.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernels import KernelSpec, estimate_covariances
from .solver import SingleResult, SolverConfig, solve
from .tuning import TuningGrid, TuningReport, _aic_grid, select_h


def fit(ts, kernel: KernelSpec, config: SolverConfig) -> SingleResult:
    """Estimate kernel covariances and solve at fixed penalties."""
    covs = estimate_covariances(ts, kernel)
    return solve(covs, config)


@dataclass(frozen=True)
class AutoFit:
    """Tuned fit: the report, the chosen kernel, and the winning solve."""

    report: TuningReport
    kernel: KernelSpec
    result: SingleResult
    solves_converged: int
    solves_total: int


def auto_fit(ts, grid: TuningGrid, kernel_kind: str = "gaussian",
             gamma: float = 1.0, eps1: float | None = None,
             eps2: float | None = None, max_iter: int | None = None,
             penalize_diagonal: bool = True) -> AutoFit:
    """Full tuned pipeline: h by leave-one-out CV, then (lambda1, lambda2) by AIC.

    The returned result is the grid solve at the chosen pair (cold-started,
    so identical to re-solving at those values).
    """
    h, cv_table = select_h(ts, grid, kind=kernel_kind)
    kernel = KernelSpec(kernel_kind, h)
    covs = estimate_covariances(ts, kernel)
    l1, l2, aic_table, dof_table, best_result, counts = _aic_grid(
        covs, grid, gamma=gamma, eps1=eps1, eps2=eps2, max_iter=max_iter,
        penalize_diagonal=penalize_diagonal, keep_best=True)
    report = TuningReport(
        chosen_h=h,
        cv_table=cv_table,
        chosen_lambda1=l1,
        chosen_lambda2=l2,
        aic_table=aic_table,
        dof_table=dof_table,
    )
    return AutoFit(report=report, kernel=kernel, result=best_result,
                   solves_converged=counts[0], solves_total=counts[1])
