import numpy as np
import pytest
from oracles import gradient_sum_1d, gradient_sum_2d, smooth_state

from conftest import random_field
from gpshadow.grid import build_grid, eval_on_grid
from gpshadow.model import gpe_rhs, potential_fn
from gpshadow.observables import (
    ExtendedEnergyParams,
    energy,
    error_norms,
    eta,
    extended_energy,
    gradient_quad,
    mass,
)
from gpshadow.operators import laplacian, potential_diagonal


def zero_potential(grid):
    return potential_diagonal(grid, lambda *c: np.zeros_like(c[0]))


def test_mass_zero_and_constant():
    g = build_grid((0.0, 1.0), 3)
    assert mass(np.zeros(1, dtype=complex), g) == 0.0
    assert mass(np.ones(1, dtype=complex), g) == pytest.approx(np.sqrt(0.5))


def test_mass_of_normalized_field(rng, grid_2d_small):
    u = random_field(grid_2d_small, rng)
    u /= np.sqrt(grid_2d_small.quad_weight) * np.linalg.norm(u)
    assert mass(u, grid_2d_small) == pytest.approx(1.0, abs=1e-12)


def test_gradient_quad_matches_loop_oracle(rng, grid_1d_small, grid_2d_small):
    u1 = random_field(grid_1d_small, rng)
    expected = gradient_sum_1d(u1, grid_1d_small.h[0])
    assert gradient_quad(grid_1d_small, u1) == pytest.approx(expected, rel=1e-12)
    u2 = random_field(grid_2d_small, rng)
    expected2 = gradient_sum_2d(u2.reshape(grid_2d_small.interior_shape), *grid_2d_small.h)
    assert gradient_quad(grid_2d_small, u2) == pytest.approx(expected2, rel=1e-12)


def test_gradient_quad_equals_dirichlet_form(rng, grid_2d_small):
    # summation by parts: sum over edges of |forward difference|^2 equals
    # <-lap u, u> in the grid inner product
    g = grid_2d_small
    lap = laplacian(g)
    for _ in range(3):
        u = random_field(g, rng)
        dirichlet = g.quad_weight * np.real(np.vdot(u, -(lap @ u)))
        assert gradient_quad(g, u) == pytest.approx(dirichlet, rel=1e-12)


def test_energy_zero_field(grid_2d_small):
    assert energy(np.zeros(grid_2d_small.m, dtype=complex), grid_2d_small,
                  zero_potential(grid_2d_small), 5.0) == 0.0


def test_energy_of_discrete_eigenfunction():
    # for the exact discrete Dirichlet eigenfunction sin(x) on (0, pi) the
    # kinetic energy is 0.5 * lambda_h with lambda_h = (4/h^2) sin^2(h/2),
    # which tends to the analytic value 0.5 as h -> 0
    g = build_grid((0.0, np.pi), 65)
    x = g.interior_coords()[0]
    psi = np.sin(x).astype(complex)
    psi /= np.sqrt(g.quad_weight) * np.linalg.norm(psi)
    h = g.h[0]
    lam_h = (4.0 / h**2) * np.sin(h / 2.0) ** 2
    e = energy(psi, g, zero_potential(g), 0.0)
    assert e == pytest.approx(0.5 * lam_h, rel=1e-12)
    assert e == pytest.approx(0.5, abs=2e-3)


def test_energy_scaling_termwise(rng, grid_2d_small):
    # doubling the field quadruples the quadratic terms and multiplies the
    # quartic term by 16
    g = grid_2d_small
    pot = potential_diagonal(g, potential_fn({"kind": "harmonic", "gamma": [1.0, 1.0]}))
    u = random_field(g, rng)
    quadratic = energy(u, g, pot, 0.0)
    quartic = energy(u, g, zero_potential(g), 2.0) - energy(u, g, zero_potential(g), 0.0)
    assert energy(2.0 * u, g, pot, 0.0) == pytest.approx(4.0 * quadratic, rel=1e-12)
    total = energy(2.0 * u, g, pot, 2.0)
    assert total == pytest.approx(4.0 * quadratic + 16.0 * quartic, rel=1e-12)


def test_eta_consistent_fields(rng, grid_2d_small):
    g = grid_2d_small
    pot = zero_potential(g)
    u = random_field(g, rng)
    assert eta(u, u, g, pot, 3.0) == 0.0
    v = random_field(g, rng)
    assert eta(u, v, g, pot, 3.0) == eta(v, u, g, pot, 3.0)


def test_extended_energy_zero_field(grid_2d_small):
    g = grid_2d_small
    zero = np.zeros(g.m, dtype=complex)
    params = ExtendedEnergyParams(mu=0.3, omega=10.0)
    assert extended_energy(zero, zero, zero, 0.1, params, g, zero_potential(g), 4.0) == 0.0


def test_extended_energy_collapses_to_energy(grid_2d_small, rng):
    # with phi = psi and a stationary history the oscillator and kinetic-mu
    # terms vanish and the diagnostic equals the plain energy, for any mu
    g = grid_2d_small
    pot = potential_diagonal(g, potential_fn({"kind": "harmonic", "gamma": [2.0, 1.0]}))
    u = smooth_state(g, seed=3)
    kappa = 6.0
    for mu in (0.0, 0.5, 42.0):
        params = ExtendedEnergyParams(mu=mu, omega=25.0)
        ext = extended_energy(u, u, u, 0.05, params, g, pot, kappa)
        assert ext == pytest.approx(energy(u, g, pot, kappa), rel=1e-12)


def test_extended_energy_against_pointwise_oracle(rng, grid_2d_small):
    # mu = 0: direct pointwise sums of the three surviving terms
    g = grid_2d_small
    vharm = potential_fn({"kind": "harmonic", "gamma": [1.0, 1.0]})
    pot = potential_diagonal(g, vharm)
    kappa = 2.5
    params = ExtendedEnergyParams(mu=0.0, omega=17.0)
    x, y = g.interior_coords()
    v0 = vharm(x, y)
    w = g.quad_weight
    for seed in range(3):
        local = np.random.default_rng(seed)
        psi = local.standard_normal(g.m) + 1j * local.standard_normal(g.m)
        phi = local.standard_normal(g.m) + 1j * local.standard_normal(g.m)
        rho = np.abs(phi) ** 2
        oracle = (
            0.5 * gradient_sum_2d(phi.reshape(g.interior_shape), *g.h)
            + w * float(np.sum(v0 * np.abs(psi) ** 2))
            + 0.5 * kappa * w * float(np.sum(rho * np.abs(2.0 * psi - phi) ** 2))
        )
        value = extended_energy(psi, phi, phi, 0.1, params, g, pot, kappa)
        assert value == pytest.approx(oracle, rel=1e-12)


def test_extended_energy_initial_value_options(grid_2d_small):
    # option 2 (phi_dot(0) = 0) reproduces E(u0) exactly; option 1
    # (phi_dot(0) from the evolution equation at t=0) adds (mu/2)|u0_dot|^2
    g = grid_2d_small
    pot = potential_diagonal(g, potential_fn({"kind": "harmonic", "gamma": [1.0, 1.0]}))
    lap = laplacian(g)
    kappa = 4.0
    tau = 0.01
    u0 = smooth_state(g, seed=5)
    mu = 0.7
    params = ExtendedEnergyParams(mu=mu, omega=1.0 / tau)
    option2 = extended_energy(u0, u0, u0, tau, params, g, pot, kappa)
    assert option2 == pytest.approx(energy(u0, g, pot, kappa), rel=1e-12)
    u0_dot = -1j * gpe_rhs(u0, pot, kappa, lap)
    option1 = extended_energy(u0, u0, u0 - tau * u0_dot, tau, params, g, pot, kappa)
    kinetic = 0.5 * mu * g.quad_weight * float(np.linalg.norm(u0_dot) ** 2)
    assert option1 == pytest.approx(energy(u0, g, pot, kappa) + kinetic, rel=1e-12)


def test_extended_params_validation():
    with pytest.raises(ValueError):
        ExtendedEnergyParams(mu=-1.0, omega=1.0)
    with pytest.raises(ValueError):
        ExtendedEnergyParams(mu=0.0, omega=0.0)


def test_error_norms_identical_fields(rng, grid_2d_small):
    u = random_field(grid_2d_small, rng)
    assert error_norms(u, u, grid_2d_small) == (0.0, 0.0)


def test_error_norms_single_node_bump():
    # hand quadrature: l2 = sqrt(0.5); the two difference quotients are +-2,
    # so h1 = sqrt(0.5 + 0.5 * (4 + 4)) = sqrt(4.5)
    g = build_grid((0.0, 1.0), 3)
    psi = np.array([1.0 + 0.0j])
    ref = np.zeros(1, dtype=complex)
    l2, h1 = error_norms(psi, ref, g)
    assert l2 == pytest.approx(np.sqrt(0.5), rel=1e-14)
    assert h1 == pytest.approx(np.sqrt(4.5), rel=1e-14)


def test_h1_dominates_l2(rng, grid_2d_small):
    for _ in range(5):
        u = random_field(grid_2d_small, rng)
        v = random_field(grid_2d_small, rng)
        l2, h1 = error_norms(u, v, grid_2d_small)
        assert h1 >= l2


def test_error_norms_grid_mismatch(grid_1d_small, grid_2d_small):
    with pytest.raises(ValueError):
        error_norms(np.zeros(grid_1d_small.m, dtype=complex),
                    np.zeros(grid_2d_small.m, dtype=complex), grid_1d_small)
