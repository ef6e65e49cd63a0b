"""Time steppers: dissipative shadow-Lagrangian (DS-K), Crank-Nicolson, Besse.

Each step of every scheme reduces to one (or, for the nonlinear CN
fixed point, a few) sparse complex solves of

    [i I - (tau/2) H] psi_new = [i I + (tau/2) H] psi_old  - tau * coupling,

where H = -0.5 lap + V + (density diagonal). The DS-K scheme first advances
the auxiliary field phi with a dissipative leapfrog whose oscillator
frequency is tied to the step size (omega^2 tau^2 = beta_K), then performs a
single linear psi solve; replacing phi by psi recovers the nonlinear CN
scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gpshadow import linsolve
from gpshadow.grid import Grid
from gpshadow.observables import (
    ExtendedEnergyParams,
    ObservableRecord,
    energy,
    error_norms,
    extended_energy,
    mass,
)
from gpshadow.operators import SparseOperator


@dataclass(frozen=True)
class DissipationRow:
    beta: float
    alpha: float
    c: tuple[int, ...]


# Dissipative leapfrog coefficients per order K. alpha is stored already
# scaled by 1e-3 relative to the customary tabulation. The c-tail satisfies
# sum c_k = 0 and sum k*c_k = 0 for K >= 2, so constant and linear-in-n
# signals pass through undamped.
DISSIPATION_TABLE: dict[int, DissipationRow] = {
    0: DissipationRow(beta=1.3, alpha=0.0, c=()),
    2: DissipationRow(beta=1.69, alpha=0.150, c=(-2, 3, 0, -1)),
    3: DissipationRow(beta=1.75, alpha=0.057, c=(-3, 6, -2, -2, 1)),
    4: DissipationRow(beta=1.82, alpha=0.018, c=(-6, 14, -8, -3, 4, -1)),
    5: DissipationRow(beta=1.84, alpha=0.0055, c=(-14, 36, -27, -2, 12, -6, 1)),
    6: DissipationRow(beta=1.86, alpha=0.0016, c=(-36, 99, -88, 11, 32, -25, 8, -1)),
}

FP_TOL = 1e-12
FP_MAX_ITER = 100


class StepError(RuntimeError):
    """A linear solve or fixed-point iteration failed to converge."""


@dataclass
class ShadowState:
    """psi at step n plus the phi history ring needed by the leapfrog.

    ``phi_history[k]`` holds phi^(n-k) for k = 0..K+1. At n = 0 the whole
    history equals phi^0 = psi^0 (ghost values realizing phi_dot(0) = 0).
    """

    n: int
    psi: np.ndarray
    phi_history: list[np.ndarray]
    tau: float
    omega_sq: float

    @property
    def phi(self) -> np.ndarray:
        return self.phi_history[0]


def new_shadow_state(u0: np.ndarray, tau: float, k_order: int) -> ShadowState:
    row = dissipation_row(k_order)
    depth = len(row.c) if row.c else 2  # phi^n .. phi^(n-K-1)
    history = [u0.astype(np.complex128, copy=True) for _ in range(depth)]
    return ShadowState(n=0, psi=u0.astype(np.complex128, copy=True), phi_history=history,
                       tau=tau, omega_sq=row.beta / tau**2)


def dissipation_row(k_order: int) -> DissipationRow:
    try:
        return DISSIPATION_TABLE[k_order]
    except KeyError:
        raise ValueError(
            f"dissipation order {k_order} not tabulated; choose one of {sorted(DISSIPATION_TABLE)}"
        ) from None


def ds_phi_step(state: ShadowState, k_order: int) -> np.ndarray:
    """Advance the auxiliary field one step with the dissipative leapfrog.

    phi_new = 2 phi^n - phi^(n-1) + beta_K (psi^n - phi^n)
              + alpha_K * sum_k c_k phi^(n-k),  k = 0..K+1.
    """
    row = dissipation_row(k_order)
    hist = state.phi_history
    needed = len(row.c) if row.c else 0
    if len(hist) < max(needed, 2):
        raise ValueError("phi history shorter than the dissipation tail")
    phi_new = 2.0 * hist[0] - hist[1] + row.beta * (state.psi - hist[0])
    if row.c:
        tail = row.c[0] * hist[0]
        for k in range(1, len(row.c)):
            tail = tail + row.c[k] * hist[k]
        phi_new = phi_new + row.alpha * tail
    return phi_new


class StepOperators:
    """Pre-assembled pieces of the per-step linear system for one grid.

    Holds H0 = -0.5*lap + V in CSR form together with the positions of its
    diagonal entries, so each step only rebuilds the value array.
    """

    def __init__(self, grid: Grid, laplacian_op: SparseOperator, potential_op: SparseOperator):
        self.grid = grid
        self.h0 = (-0.5) * laplacian_op + potential_op
        self.diag_pos = self.h0.diagonal_positions()
        self.v_values = potential_op.diagonal().real

    def half_step_solve(
        self,
        psi_n: np.ndarray,
        density_diag: np.ndarray,
        rhs_extra: np.ndarray | None,
        tau: float,
        tol: float,
        max_iter: int | None = None,
    ) -> tuple[np.ndarray, linsolve.SolveReport]:
        """Solve [iI - (tau/2)(H0 + D)] x = [iI + (tau/2)(H0 + D)] psi_n + rhs_extra."""
        half = 0.5 * tau
        A = self.h0.scaled_with_diagonal(-half, 1j - half * density_diag, self.diag_pos)
        b = 1j * psi_n + half * (self.h0 @ psi_n) + half * density_diag * psi_n
        if rhs_extra is not None:
            b = b + rhs_extra
        return linsolve.solve(A, b, tol=tol, max_iter=max_iter, x0=psi_n)


def ds_psi_step(
    psi_n: np.ndarray,
    phi_n: np.ndarray,
    phi_np1: np.ndarray,
    ops: StepOperators,
    tau: float,
    kappa: float,
    tol: float = linsolve.DEFAULT_TOL,
) -> np.ndarray:
    """One linear shadow-Lagrangian psi update given the advanced phi.

    Implements i psi_new = i psi_n - (tau/2) lap(psi_half) + tau V psi_half
    + tau kappa (|phi_np1|^2 + |phi_n|^2)/2 * (2 psi_half - phi_half) with
    half-step arithmetic averages; exactly one linear solve.
    """
    dens = 0.5 * kappa * (np.abs(phi_np1) ** 2 + np.abs(phi_n) ** 2)
    phi_half = 0.5 * (phi_np1 + phi_n)
    rhs_extra = -tau * dens * phi_half
    x, report = ops.half_step_solve(psi_n, 2.0 * dens, rhs_extra, tau, tol)
    if not report.converged:
        raise StepError(
            f"psi-update solve stalled at relative residual {report.relative_residual:.3e}"
        )
    return x


def cn_step(
    psi_n: np.ndarray,
    ops: StepOperators,
    tau: float,
    kappa: float,
    fp_tol: float = FP_TOL,
    fp_max_iter: int = FP_MAX_ITER,
) -> np.ndarray:
    """One nonlinear Crank-Nicolson step via fixed-point iteration.

    The density factor kappa (|psi_new|^2 + |psi_n|^2)/2 is frozen at the
    previous iterate, the resulting linear system solved, and the loop
    stopped once successive iterates differ by at most fp_tol in L2.
    """
    sqrt_w = np.sqrt(ops.grid.quad_weight)
    lin_tol = max(1e-13, 0.01 * fp_tol)
    psi_k = psi_n.copy()
    for _ in range(fp_max_iter):
        dens = 0.5 * kappa * (np.abs(psi_k) ** 2 + np.abs(psi_n) ** 2)
        psi_next, report = ops.half_step_solve(psi_n, dens, None, tau, lin_tol)
        if not report.converged:
            raise StepError(
                f"linear solve inside CN stalled at residual {report.relative_residual:.3e}"
            )
        if sqrt_w * np.linalg.norm(psi_next - psi_k) <= fp_tol:
            return psi_next
        psi_k = psi_next
    raise StepError(f"CN fixed point did not converge within {fp_max_iter} iterations")


def besse_step(
    psi_n: np.ndarray,
    density_half: np.ndarray,
    ops: StepOperators,
    tau: float,
    kappa: float,
    tol: float = linsolve.DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """One relaxation step: advance the half-step density, then one linear solve.

    density_new = 2 |psi_n|^2 - density_half pointwise, then solve the CN-type
    system with frozen density kappa * density_new. The density variable is
    initialized to |u0|^2 before the first step.
    """
    density_new = 2.0 * np.abs(psi_n) ** 2 - density_half
    x, report = ops.half_step_solve(psi_n, kappa * density_new, None, tau, tol)
    if not report.converged:
        raise StepError(
            f"relaxation solve stalled at relative residual {report.relative_residual:.3e}"
        )
    return x, density_new


def forced_consistent_ds_step(
    psi_n: np.ndarray,
    ops: StepOperators,
    tau: float,
    kappa: float,
    fp_tol: float = FP_TOL,
    fp_max_iter: int = FP_MAX_ITER,
) -> np.ndarray:
    """DS psi update with phi forced equal to psi (test hook).

    Iterates the shadow update with phi^n := psi^n and phi^(n+1) := the
    current iterate until self-consistent; the fixed point satisfies the
    nonlinear CN equation, so the result matches a converged cn_step.
    """
    sqrt_w = np.sqrt(ops.grid.quad_weight)
    psi_k = psi_n.copy()
    for _ in range(fp_max_iter):
        psi_next = ds_psi_step(psi_n, psi_n, psi_k, ops, tau, kappa, tol=max(1e-13, 0.01 * fp_tol))
        if sqrt_w * np.linalg.norm(psi_next - psi_k) <= fp_tol:
            return psi_next
        psi_k = psi_next
    raise StepError(f"forced-consistency fixed point did not converge within {fp_max_iter} iterations")


# --- full trajectories ------------------------------------------------------

@dataclass
class RunResult:
    psi: np.ndarray
    phi: np.ndarray | None
    records: list[ObservableRecord]
    status: str  # ok | unstable | solver_failure
    steps_completed: int
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _num_steps(T: float, tau: float) -> int:
    n = round(T / tau)
    if n < 1 or abs(n * tau - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(f"step size {tau} does not divide the final time {T}")
    return n


def _record(
    n: int,
    tau: float,
    psi: np.ndarray,
    phi: np.ndarray | None,
    ops: StepOperators,
    kappa: float,
    potential_op: SparseOperator,
    ext: tuple[np.ndarray, ExtendedEnergyParams] | None = None,
) -> ObservableRecord:
    grid = ops.grid
    e_psi = energy(psi, grid, potential_op, kappa)
    if phi is None:
        eta_val, cons_l2, cons_h1 = 0.0, 0.0, 0.0
    else:
        e_phi = energy(phi, grid, potential_op, kappa)
        eta_val = abs(e_psi - e_phi)
        cons_l2, cons_h1 = error_norms(psi, phi, grid)
    ext_val = None
    if ext is not None and phi is not None:
        phi_prev, params = ext
        ext_val = extended_energy(psi, phi, phi_prev, tau, params, grid, potential_op, kappa)
    return ObservableRecord(
        n=n, t=n * tau, mass=mass(psi, grid), energy=e_psi, eta=eta_val,
        consistency_l2=cons_l2, consistency_h1=cons_h1, extended_energy=ext_val,
    )


def ds_run(
    grid: Grid,
    laplacian_op: SparseOperator,
    potential_op: SparseOperator,
    u0: np.ndarray,
    kappa: float,
    tau: float,
    T: float,
    k_order: int = 5,
    cadence: int = 1,
    tol: float = linsolve.DEFAULT_TOL,
    observers: list | None = None,
    extended_params: ExtendedEnergyParams | None = None,
    force_phi_equals_psi: bool = False,
) -> RunResult:
    """Integrate the shadow-Lagrangian system from u0 to time T.

    Per step: the explicit dissipative phi update, then one linear psi
    solve. Observables are recorded at the given cadence (and always at the
    first and last step); ``observers`` callables receive (n, t, psi, phi).
    Aborts with the series collected so far on solver failure or on
    non-finite field values, which is how the undamped K=0 instability
    surfaces.
    """
    n_steps = _num_steps(T, tau)
    state = new_shadow_state(u0, tau, k_order)
    ops = StepOperators(grid, laplacian_op, potential_op)
    ext = None
    if extended_params is not None:
        ext = (state.phi_history[1], extended_params)
    records = [_record(0, tau, state.psi, state.phi, ops, kappa, potential_op, ext)]
    _notify(observers, 0, 0.0, state.psi, state.phi)
    for n in range(1, n_steps + 1):
        try:
            if force_phi_equals_psi:
                psi_new = forced_consistent_ds_step(state.psi, ops, tau, kappa)
                phi_new = psi_new
            else:
                phi_new = ds_phi_step(state, k_order)
                psi_new = ds_psi_step(state.psi, state.phi, phi_new, ops, tau, kappa, tol=tol)
        except StepError as err:
            return RunResult(state.psi, state.phi, records, "solver_failure", n - 1, str(err))
        phi_prev = state.phi
        state.phi_history = [phi_new] + state.phi_history[:-1]
        state.psi = psi_new
        state.n = n
        if not (np.all(np.isfinite(psi_new)) and np.all(np.isfinite(phi_new))):
            records.append(_record(n, tau, psi_new, phi_new, ops, kappa, potential_op, None))
            return RunResult(psi_new, phi_new, records, "unstable", n,
                             f"non-finite field values at step {n}")
        if n % cadence == 0 or n == n_steps:
            ext = (phi_prev, extended_params) if extended_params is not None else None
            records.append(_record(n, tau, state.psi, state.phi, ops, kappa, potential_op, ext))
            _notify(observers, n, n * tau, state.psi, state.phi)
    return RunResult(state.psi, state.phi, records, "ok", n_steps)


def cn_run(
    grid: Grid,
    laplacian_op: SparseOperator,
    potential_op: SparseOperator,
    u0: np.ndarray,
    kappa: float,
    tau: float,
    T: float,
    cadence: int = 1,
    fp_tol: float = FP_TOL,
    fp_max_iter: int = FP_MAX_ITER,
    observers: list | None = None,
) -> RunResult:
    """Integrate with the nonlinear Crank-Nicolson scheme (reference baseline)."""
    n_steps = _num_steps(T, tau)
    ops = StepOperators(grid, laplacian_op, potential_op)
    psi = u0.astype(np.complex128, copy=True)
    records = [_record(0, tau, psi, None, ops, kappa, potential_op)]
    _notify(observers, 0, 0.0, psi, None)
    for n in range(1, n_steps + 1):
        try:
            psi = cn_step(psi, ops, tau, kappa, fp_tol=fp_tol, fp_max_iter=fp_max_iter)
        except StepError as err:
            return RunResult(psi, None, records, "solver_failure", n - 1, str(err))
        if not np.all(np.isfinite(psi)):
            records.append(_record(n, tau, psi, None, ops, kappa, potential_op))
            return RunResult(psi, None, records, "unstable", n, f"non-finite values at step {n}")
        if n % cadence == 0 or n == n_steps:
            records.append(_record(n, tau, psi, None, ops, kappa, potential_op))
            _notify(observers, n, n * tau, psi, None)
    return RunResult(psi, None, records, "ok", n_steps)


def besse_run(
    grid: Grid,
    laplacian_op: SparseOperator,
    potential_op: SparseOperator,
    u0: np.ndarray,
    kappa: float,
    tau: float,
    T: float,
    cadence: int = 1,
    tol: float = linsolve.DEFAULT_TOL,
    observers: list | None = None,
) -> RunResult:
    """Integrate with the two-level relaxation scheme (linear solves only)."""
    n_steps = _num_steps(T, tau)
    ops = StepOperators(grid, laplacian_op, potential_op)
    psi = u0.astype(np.complex128, copy=True)
    density_half = np.abs(psi) ** 2
    records = [_record(0, tau, psi, None, ops, kappa, potential_op)]
    _notify(observers, 0, 0.0, psi, None)
    for n in range(1, n_steps + 1):
        try:
            psi, density_half = besse_step(psi, density_half, ops, tau, kappa, tol=tol)
        except StepError as err:
            return RunResult(psi, None, records, "solver_failure", n - 1, str(err))
        if not np.all(np.isfinite(psi)):
            records.append(_record(n, tau, psi, None, ops, kappa, potential_op))
            return RunResult(psi, None, records, "unstable", n, f"non-finite values at step {n}")
        if n % cadence == 0 or n == n_steps:
            records.append(_record(n, tau, psi, None, ops, kappa, potential_op))
            _notify(observers, n, n * tau, psi, None)
    return RunResult(psi, None, records, "ok", n_steps)


def _notify(observers, n, t, psi, phi):
    if observers:
        for obs in observers:
            obs(n, t, psi, phi)


def run_scheme(
    scheme: str,
    k_order: int,
    grid: Grid,
    laplacian_op: SparseOperator,
    potential_op: SparseOperator,
    u0: np.ndarray,
    kappa: float,
    tau: float,
    T: float,
    cadence: int = 1,
    observers: list | None = None,
    extended_params: ExtendedEnergyParams | None = None,
) -> RunResult:
    """Dispatch a full run by scheme id ('ds', 'cn' or 'besse')."""
    if scheme == "ds":
        return ds_run(grid, laplacian_op, potential_op, u0, kappa, tau, T,
                      k_order=k_order, cadence=cadence, observers=observers,
                      extended_params=extended_params)
    if scheme == "cn":
        return cn_run(grid, laplacian_op, potential_op, u0, kappa, tau, T,
                      cadence=cadence, observers=observers)
    if scheme == "besse":
        return besse_run(grid, laplacian_op, potential_op, u0, kappa, tau, T,
                         cadence=cadence, observers=observers)
    raise ValueError(f"unknown scheme {scheme!r}")
