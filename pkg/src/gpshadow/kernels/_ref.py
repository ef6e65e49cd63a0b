"""Pure-numpy reference kernels.

Used when the compiled extension is unavailable (or explicitly disabled via
GPSHADOW_PURE_PYTHON=1). Semantics match ``_core`` exactly; summation order
inside reductions may differ at roundoff level.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix with complex entries. Handles empty rows."""
    m = len(indptr) - 1
    rows = np.repeat(np.arange(m), np.diff(indptr))
    prod = data * x[indices]
    return (
        np.bincount(rows, weights=prod.real, minlength=m)
        + 1j * np.bincount(rows, weights=prod.imag, minlength=m)
    )


def bicgstab(indptr, indices, data, b, x0, inv_diag, tol, max_iter):
    """Diagonally preconditioned BiCGStab for complex CSR systems.

    Returns (x, iterations, relative_residual, converged) where the
    relative residual is the true ||b - A x|| / ||b||, recomputed at exit.
    Deterministic: the shadow residual is fixed to the initial residual.
    """
    m = len(indptr) - 1
    rows = np.repeat(np.arange(m), np.diff(indptr))

    def matvec(v):
        prod = data * v[indices]
        return (
            np.bincount(rows, weights=prod.real, minlength=m)
            + 1j * np.bincount(rows, weights=prod.imag, minlength=m)
        )

    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return np.zeros(m, dtype=np.complex128), 0, 0.0, True

    x = x0.astype(np.complex128, copy=True)
    r = b - matvec(x)
    r_shadow = r.copy()
    rho_prev = 1.0 + 0.0j
    alpha = 1.0 + 0.0j
    omega = 1.0 + 0.0j
    v = np.zeros(m, dtype=np.complex128)
    p = np.zeros(m, dtype=np.complex128)
    breakdown = 1e-300

    iterations = 0
    while iterations < max_iter:
        if np.linalg.norm(r) <= tol * b_norm:
            true_res = np.linalg.norm(b - matvec(x)) / b_norm
            if true_res <= tol:
                return x, iterations, float(true_res), True
        iterations += 1
        rho = np.vdot(r_shadow, r)
        if abs(rho) < breakdown or abs(omega) < breakdown:
            break
        if iterations == 1:
            p = r.copy()
        else:
            beta = (rho / rho_prev) * (alpha / omega)
            p = r + beta * (p - omega * v)
        p_hat = inv_diag * p
        v = matvec(p_hat)
        denom = np.vdot(r_shadow, v)
        if abs(denom) < breakdown:
            break
        alpha = rho / denom
        s = r - alpha * v
        if np.linalg.norm(s) <= tol * b_norm:
            x = x + alpha * p_hat
            r = s
            rho_prev = rho
            continue
        s_hat = inv_diag * s
        t = matvec(s_hat)
        tt = np.vdot(t, t)
        if abs(tt) < breakdown:
            break
        omega = np.vdot(t, s) / tt
        x = x + alpha * p_hat + omega * s_hat
        r = s - omega * t
        rho_prev = rho

    true_res = np.linalg.norm(b - matvec(x)) / b_norm
    return x, iterations, float(true_res), bool(true_res <= tol)
