import json

import numpy as np
import pytest

from conftest import random_field
from gpshadow.grid import build_grid
from gpshadow.model import (
    ProblemConfig,
    build_problem,
    cubic_nonlinearity,
    cubic_shadow_rhs,
    gpe_rhs,
    load_config,
    potential_fn,
    save_config,
    shadow_rhs_general,
)
from gpshadow.operators import laplacian, potential_diagonal


def setup_ops(grid):
    lap = laplacian(grid)
    pot = potential_diagonal(grid, potential_fn({"kind": "harmonic", "gamma": [1.0, 2.0]}))
    return lap, pot


def test_rhs_zero_fields(grid_2d_small):
    lap, pot = setup_ops(grid_2d_small)
    zero = np.zeros(grid_2d_small.m, dtype=complex)
    out = shadow_rhs_general(zero, zero, cubic_nonlinearity(5.0), pot, lap)
    assert np.array_equal(out, zero)


def test_rhs_cubic_identity_no_potential(rng, grid_2d_small):
    # 0.5 V[rho] psi + 0.5 rho V'[rho] (3 psi - 2 phi) collapses to
    # kappa rho (2 psi - phi) for the cubic density part
    g = grid_2d_small
    lap = laplacian(g)
    kappa = 7.5
    for _ in range(5):
        psi = random_field(g, rng)
        phi = random_field(g, rng)
        general = shadow_rhs_general(psi, phi, cubic_nonlinearity(kappa), None, lap)
        direct = -0.5 * (lap @ psi) + kappa * np.abs(phi) ** 2 * (2.0 * psi - phi)
        assert np.linalg.norm(general - direct) <= 1e-12 * np.linalg.norm(direct)


def test_rhs_general_matches_cubic_fast_path(rng, grid_2d_small):
    g = grid_2d_small
    lap, pot = setup_ops(g)
    kappa = 3.0
    for _ in range(5):
        psi = random_field(g, rng)
        phi = random_field(g, rng)
        general = shadow_rhs_general(psi, phi, cubic_nonlinearity(kappa), pot, lap)
        fast = cubic_shadow_rhs(psi, phi, pot, kappa, lap)
        assert np.linalg.norm(general - fast) <= 1e-12 * np.linalg.norm(fast)


def test_rhs_reduces_to_gpe_when_consistent(rng, grid_2d_small):
    g = grid_2d_small
    lap, pot = setup_ops(g)
    psi = random_field(g, rng)
    coupled = shadow_rhs_general(psi, psi, cubic_nonlinearity(2.0), pot, lap)
    reference = gpe_rhs(psi, pot, 2.0, lap)
    assert np.allclose(coupled, reference, atol=1e-13)


def test_mp1_configuration():
    config = build_problem("mp1")
    assert config.T == 4.0
    assert config.kappa == 100.0
    assert config.potential == {"kind": "harmonic", "gamma": [2.0, 1.0]}
    assert config.ground_state.omega == 0.8
    assert config.ground_state.kappa0 == 100.0
    assert config.ground_state.potential == {"kind": "harmonic", "gamma": [1.0, 1.0]}
    assert config.bounds == ((-6.0, 6.0), (-6.0, 6.0))


def test_mp2_configuration():
    config = build_problem("mp2")
    assert config.T == 1.0
    assert config.kappa == 20.0
    assert config.potential == {"kind": "checkerboard"}
    assert config.ground_state.kappa0 == 10.0
    assert config.ground_state.omega == 0.0
    parts = config.ground_state.potential["parts"]
    assert {p["kind"] for p in parts} == {"checkerboard", "harmonic"}


def test_invalid_configs_rejected():
    with pytest.raises(ValueError):
        build_problem("mp3")
    with pytest.raises(ValueError):
        build_problem("custom", tau=0.0)
    with pytest.raises(ValueError):
        build_problem("custom", tau=2.0, T=1.0)
    with pytest.raises(ValueError):
        build_problem("custom", scheme="rk4")
    with pytest.raises(ValueError):
        build_problem("custom", scheme="ds", k_order=1)
    with pytest.raises(ValueError):
        build_problem("custom", nonsense=1)


def test_config_json_round_trip(tmp_path):
    config = build_problem("mp2", tau=2.0**-7, scheme="besse")
    path = tmp_path / "mp2.json"
    save_config(path, config)
    loaded = load_config(path)
    assert loaded == config
    # the file is plain JSON mirroring the config fields
    raw = json.loads(path.read_text())
    assert raw["kappa"] == 20.0
    assert raw["ground_state"]["kappa0"] == 10.0


def test_potential_fn_sum_and_none(grid_2d_small):
    x, y = grid_2d_small.interior_coords()
    none_v = potential_fn(None)(x, y)
    assert np.array_equal(none_v, np.zeros_like(x))
    total = potential_fn({
        "kind": "sum",
        "parts": [{"kind": "harmonic", "gamma": [2.0, 2.0]}, {"kind": "checkerboard"}],
    })(x, y)
    harmonic = x**2 + y**2
    checker = np.floor(5.0 + 2.0 * np.sin(np.pi / 3.0 * x) * np.sin(np.pi / 3.0 * y))
    assert np.allclose(total, harmonic + checker)
    with pytest.raises(ValueError):
        potential_fn({"kind": "mexican-hat"})


def test_grid_resolution_default_and_override():
    config = build_problem("mp1")
    assert config.make_grid().h == (0.1, 0.1)
    assert config.make_grid(241).h == (0.05, 0.05)
