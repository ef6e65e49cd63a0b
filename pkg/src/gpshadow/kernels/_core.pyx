# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR kernels: matrix-vector product and preconditioned BiCGStab.

Mirrors the semantics of ``_ref`` with fused C loops that release the GIL,
so independent solver runs can proceed in parallel threads.
"""

import numpy as np

cimport cython
from libc.math cimport sqrt

NAME = "compiled"


cdef void _matvec(const long[::1] indptr, const long[::1] indices,
                  const double complex[::1] data, const double complex[::1] x,
                  double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t row, k, m = indptr.shape[0] - 1
    cdef double complex acc
    for row in range(m):
        acc = 0
        for k in range(indptr[row], indptr[row + 1]):
            acc = acc + data[k] * x[indices[k]]
        out[row] = acc


cdef double complex _dotc(const double complex[::1] a,
                          const double complex[::1] b) noexcept nogil:
    cdef Py_ssize_t i
    cdef double complex acc = 0
    for i in range(a.shape[0]):
        acc = acc + a[i].conjugate() * b[i]
    return acc


cdef double _norm(const double complex[::1] a) noexcept nogil:
    cdef Py_ssize_t i
    cdef double acc = 0
    for i in range(a.shape[0]):
        acc = acc + a[i].real * a[i].real + a[i].imag * a[i].imag
    return sqrt(acc)


def csr_matvec(indptr, indices, data, x):
    """y = A @ x for a CSR matrix with complex entries. Handles empty rows."""
    cdef long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef long[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double complex[::1] dv = np.ascontiguousarray(data, dtype=np.complex128)
    cdef double complex[::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    out = np.empty(len(indptr) - 1, dtype=np.complex128)
    cdef double complex[::1] ov = out
    with nogil:
        _matvec(ip, ix, dv, xv, ov)
    return out


def bicgstab(indptr, indices, data, b, x0, inv_diag, tol, max_iter):
    """Diagonally preconditioned BiCGStab for complex CSR systems.

    Returns (x, iterations, relative_residual, converged) where the
    relative residual is the true ||b - A x|| / ||b||, recomputed at exit.
    Deterministic: the shadow residual is fixed to the initial residual.
    """
    cdef long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef long[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double complex[::1] dv = np.ascontiguousarray(data, dtype=np.complex128)
    cdef double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef double complex[::1] mv = np.ascontiguousarray(inv_diag, dtype=np.complex128)
    cdef Py_ssize_t m = len(indptr) - 1
    cdef double ctol = tol
    cdef long cmax = max_iter

    x_arr = np.array(x0, dtype=np.complex128, copy=True)
    cdef double complex[::1] x = x_arr
    r_arr = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] r = r_arr
    cdef double complex[::1] r_shadow = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] p = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] v = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] p_hat = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] s = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] s_hat = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] t = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] work = np.empty(m, dtype=np.complex128)

    cdef double b_norm, true_res, breakdown = 1e-300
    cdef double complex rho, rho_prev, alpha, omega, beta, denom, tt
    cdef long iterations = 0
    cdef Py_ssize_t i
    cdef bint converged = False, stop = False

    b_norm = _norm(bv)
    if b_norm == 0.0:
        return np.zeros(m, dtype=np.complex128), 0, 0.0, True

    with nogil:
        _matvec(ip, ix, dv, x, work)
        for i in range(m):
            r[i] = bv[i] - work[i]
            r_shadow[i] = r[i]
        rho_prev = 1
        alpha = 1
        omega = 1
        while iterations < cmax and not stop:
            if _norm(r) <= ctol * b_norm:
                _matvec(ip, ix, dv, x, work)
                for i in range(m):
                    work[i] = bv[i] - work[i]
                true_res = _norm(work) / b_norm
                if true_res <= ctol:
                    converged = True
                    break
            iterations = iterations + 1
            rho = _dotc(r_shadow, r)
            if abs(rho) < breakdown or abs(omega) < breakdown:
                break
            if iterations == 1:
                for i in range(m):
                    p[i] = r[i]
            else:
                beta = (rho / rho_prev) * (alpha / omega)
                for i in range(m):
                    p[i] = r[i] + beta * (p[i] - omega * v[i])
            for i in range(m):
                p_hat[i] = mv[i] * p[i]
            _matvec(ip, ix, dv, p_hat, v)
            denom = _dotc(r_shadow, v)
            if abs(denom) < breakdown:
                break
            alpha = rho / denom
            for i in range(m):
                s[i] = r[i] - alpha * v[i]
            if _norm(s) <= ctol * b_norm:
                for i in range(m):
                    x[i] = x[i] + alpha * p_hat[i]
                    r[i] = s[i]
                rho_prev = rho
                continue
            for i in range(m):
                s_hat[i] = mv[i] * s[i]
            _matvec(ip, ix, dv, s_hat, t)
            tt = _dotc(t, t)
            if abs(tt) < breakdown:
                break
            omega = _dotc(t, s) / tt
            for i in range(m):
                x[i] = x[i] + alpha * p_hat[i] + omega * s_hat[i]
                r[i] = s[i] - omega * t[i]
            rho_prev = rho
        _matvec(ip, ix, dv, x, work)
        for i in range(m):
            work[i] = bv[i] - work[i]
        true_res = _norm(work) / b_norm
    if converged:
        return x_arr, int(iterations), float(true_res), True
    return x_arr, int(iterations), float(true_res), bool(true_res <= ctol)
