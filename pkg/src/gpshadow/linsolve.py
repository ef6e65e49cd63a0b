"""Krylov solves for the complex linear systems of the implicit time steps.

Stabilized biconjugate gradients with Jacobi preconditioning. The systems
assembled by the steppers are dominated by (i/tau) I, so they are well
conditioned for the step sizes of interest; the default tolerance keeps
solver error far below the O(tau^2) discretization error under study.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gpshadow import kernels
from gpshadow.operators import SparseOperator

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    relative_residual: float
    converged: bool


def default_max_iter(m: int) -> int:
    return max(10, math.ceil(10.0 * math.sqrt(m)))


def solve(
    A: SparseOperator,
    b: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Solve A x = b to a relative residual of ``tol``.

    Returns the iterate and a report; non-convergence within ``max_iter`` is
    reported (converged=False), not raised, so callers decide whether to
    abort a run. Deterministic for identical inputs and configuration.
    """
    if b.shape != (A.m,):
        raise ValueError(f"right-hand side of length {b.shape} does not match system size {A.m}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = default_max_iter(A.m)
    if x0 is None:
        x0 = np.zeros(A.m, dtype=np.complex128)
    elif x0.shape != (A.m,):
        raise ValueError("initial guess does not match system size")
    diag = A.diagonal()
    inv_diag = np.where(diag != 0, 1.0 / np.where(diag != 0, diag, 1.0), 1.0)
    x, iterations, relres, converged = kernels.bicgstab(
        A.indptr, A.indices, A.data, np.ascontiguousarray(b, dtype=np.complex128),
        x0, inv_diag, float(tol), int(max_iter),
    )
    return x, SolveReport(iterations=iterations, relative_residual=relres, converged=converged)
