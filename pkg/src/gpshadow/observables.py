"""Quadrature functionals: mass, energies, consistency indicator, error norms.

All integrals use the interior midpoint rule. The gradient contribution is
the forward-difference Dirichlet form with zero extension at the boundary,
which coincides with <-lap_h u, u> * weight by summation by parts, so
energy identities hold discretely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gpshadow.grid import Grid
from gpshadow.operators import SparseOperator


@dataclass
class ObservableRecord:
    n: int
    t: float
    mass: float
    energy: float
    eta: float
    consistency_l2: float
    consistency_h1: float
    extended_energy: float | None = None


@dataclass(frozen=True)
class ExtendedEnergyParams:
    """Fictitious mass and oscillator frequency of the extended-energy diagnostic."""

    mu: float
    omega: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.omega <= 0:
            raise ValueError("omega must be positive")


def quad_sum(grid: Grid, values: np.ndarray) -> float:
    return float(grid.quad_weight * np.sum(values))


def mass(psi: np.ndarray, grid: Grid) -> float:
    """L2 norm sqrt(int |psi|^2 dx) of a field."""
    return float(np.sqrt(grid.quad_weight) * np.linalg.norm(psi))


def gradient_quad(grid: Grid, u: np.ndarray) -> float:
    """int |grad u|^2 dx via forward differences with zero boundary extension."""
    lattice = u.reshape(grid.interior_shape)
    total = 0.0
    for axis in range(grid.dim):
        pad = [(0, 0)] * grid.dim
        pad[axis] = (1, 1)
        padded = np.pad(lattice, pad)
        d = np.diff(padded, axis=axis) / grid.h[axis]
        total += float(np.sum(np.abs(d) ** 2))
    return grid.quad_weight * total


def energy(psi: np.ndarray, grid: Grid, potential_op: SparseOperator, kappa: float) -> float:
    """E(u) = int 0.5 |grad u|^2 + V |u|^2 + (kappa/2) |u|^4 dx."""
    density = np.abs(psi) ** 2
    value = 0.5 * gradient_quad(grid, psi)
    value += quad_sum(grid, potential_op.diagonal().real * density)
    value += 0.5 * kappa * quad_sum(grid, density**2)
    return value


def eta(psi: np.ndarray, phi: np.ndarray, grid: Grid, potential_op: SparseOperator, kappa: float) -> float:
    """Consistency indicator |E(psi) - E(phi)|, an O(tau^2) error proxy."""
    return abs(energy(psi, grid, potential_op, kappa) - energy(phi, grid, potential_op, kappa))


def extended_energy(
    psi: np.ndarray,
    phi_n: np.ndarray,
    phi_nm1: np.ndarray,
    tau: float,
    params: ExtendedEnergyParams,
    grid: Grid,
    potential_op: SparseOperator,
    kappa: float,
) -> float:
    """Conserved functional of the extended system, for the cubic interaction.

    int 0.5 |grad phi|^2 + (mu/2) |phi_dot|^2 + V0 |psi|^2
        + (mu omega^2 / 2) |psi - phi|^2 + (kappa/2) rho |2 psi - phi|^2 dx,

    with rho = |phi|^2 and phi_dot approximated by the backward difference
    (phi_n - phi_nm1)/tau. Diagnostic only: the dissipative stepper does not
    conserve it exactly.
    """
    rho = np.abs(phi_n) ** 2
    phi_dot = (phi_n - phi_nm1) / tau
    value = 0.5 * gradient_quad(grid, phi_n)
    value += 0.5 * params.mu * quad_sum(grid, np.abs(phi_dot) ** 2)
    value += quad_sum(grid, potential_op.diagonal().real * np.abs(psi) ** 2)
    value += 0.5 * params.mu * params.omega**2 * quad_sum(grid, np.abs(psi - phi_n) ** 2)
    value += 0.5 * kappa * quad_sum(grid, rho * np.abs(2.0 * psi - phi_n) ** 2)
    return value


def error_norms(psi: np.ndarray, ref: np.ndarray, grid: Grid) -> tuple[float, float]:
    """(L2, H1) norms of psi - ref on a common grid."""
    if psi.shape != ref.shape or psi.shape != (grid.m,):
        raise ValueError("fields must live on the same grid")
    diff = psi - ref
    l2_sq = grid.quad_weight * float(np.linalg.norm(diff) ** 2)
    h1 = np.sqrt(l2_sq + gradient_quad(grid, diff))
    return float(np.sqrt(l2_sq)), float(h1)
