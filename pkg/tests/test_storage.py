import json

import numpy as np
import pytest

from conftest import random_field
from gpshadow.grid import build_grid
from gpshadow.observables import ObservableRecord
from gpshadow.storage import (
    Snapshot,
    content_hash,
    read_series,
    read_snapshot,
    read_snapshot_checked,
    read_table,
    write_density,
    write_series,
    write_snapshot,
    write_table,
)


def make_snapshot(grid, payload, kind="psi", config_hash="abc123"):
    return Snapshot(bounds=grid.bounds, n=grid.n, t=0.5, kind=kind,
                    config_hash=config_hash, payload=payload)


def test_snapshot_round_trip_bit_identical(tmp_path, rng, grid_2d_small):
    payload = random_field(grid_2d_small, rng)
    path = tmp_path / "field.csv"
    write_snapshot(path, make_snapshot(grid_2d_small, payload))
    loaded = read_snapshot(path)
    assert np.array_equal(loaded.payload, payload)
    assert loaded.bounds == grid_2d_small.bounds
    assert loaded.n == grid_2d_small.n
    assert loaded.t == 0.5
    assert loaded.kind == "psi"
    assert loaded.grid().m == grid_2d_small.m


def test_snapshot_zero_field(tmp_path, grid_1d_small):
    payload = np.zeros(grid_1d_small.m, dtype=complex)
    path = tmp_path / "zero.csv"
    write_snapshot(path, make_snapshot(grid_1d_small, payload))
    text = path.read_text().splitlines()
    assert text[0] == "real,imag"
    assert len(text) == 1 + grid_1d_small.m
    assert all(line == "0.0,0.0" for line in text[1:])


def test_snapshot_length_mismatch_rejected(tmp_path, grid_2d_small, rng):
    payload = random_field(grid_2d_small, rng)
    path = tmp_path / "bad.csv"
    write_snapshot(path, make_snapshot(grid_2d_small, payload))
    sidecar = json.loads((tmp_path / "bad.csv.json").read_text())
    sidecar["n"] = [5, 5]
    (tmp_path / "bad.csv.json").write_text(json.dumps(sidecar))
    with pytest.raises(ValueError):
        read_snapshot(path)


def test_snapshot_hash_mismatch_warns_not_fails(tmp_path, grid_1d_small, rng):
    payload = random_field(grid_1d_small, rng)
    path = tmp_path / "field.csv"
    write_snapshot(path, make_snapshot(grid_1d_small, payload, config_hash="aaaa"))
    with pytest.warns(UserWarning, match="different configuration"):
        loaded = read_snapshot_checked(path, expected_hash="bbbb")
    assert np.array_equal(loaded.payload, payload)


def test_series_round_trip_and_header(tmp_path):
    rows = [
        ObservableRecord(n=0, t=0.0, mass=1.0, energy=2.5, eta=0.0,
                         consistency_l2=0.0, consistency_h1=0.0, extended_energy=2.5),
        ObservableRecord(n=4, t=0.2, mass=0.99999999, energy=2.4999999173,
                         consistency_l2=1.25e-7, consistency_h1=3.5e-6,
                         eta=1e-8, extended_energy=None),
    ]
    path = tmp_path / "series.csv"
    write_series(path, rows)
    text = path.read_text().splitlines()
    assert text[0] == "n,t,mass,energy,eta,consistency_l2,consistency_h1,extended_energy"
    loaded = read_series(path)
    assert loaded == rows


def test_series_empty(tmp_path):
    path = tmp_path / "empty.csv"
    write_series(path, [])
    assert path.read_text() == "n,t,mass,energy,eta,consistency_l2,consistency_h1,extended_energy\n"
    assert read_series(path) == []


def test_series_full_precision(tmp_path):
    value = 0.1 + 0.2  # not representable as a short decimal
    rows = [ObservableRecord(n=1, t=value, mass=value, energy=value, eta=value,
                             consistency_l2=value, consistency_h1=value)]
    path = tmp_path / "precise.csv"
    write_series(path, rows)
    loaded = read_series(path)[0]
    assert loaded.t == value
    assert loaded.mass == value


def test_writers_are_deterministic(tmp_path, grid_2d_small, rng):
    payload = random_field(grid_2d_small, rng)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_snapshot(a, make_snapshot(grid_2d_small, payload))
    write_snapshot(b, make_snapshot(grid_2d_small, payload))
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.json").read_bytes() == (tmp_path / "b.csv.json").read_bytes()


def test_density_matrix_shape_and_boundary(tmp_path, rng):
    g = build_grid(((-1.0, 1.0), (-2.0, 2.0)), (5, 7))
    field = random_field(g, rng)
    path = tmp_path / "density.csv"
    write_density(path, g, field, t=1.25, config_hash="xyz")
    matrix = np.loadtxt(path, delimiter=",")
    assert matrix.shape == (g.n[1], g.n[0])  # rows over y, columns over x
    assert np.all(matrix[0] == 0.0) and np.all(matrix[-1] == 0.0)
    assert np.all(matrix[:, 0] == 0.0) and np.all(matrix[:, -1] == 0.0)
    interior = np.abs(field.reshape(g.interior_shape)) ** 2
    assert np.allclose(matrix[1:-1, 1:-1], interior.T)
    header = json.loads((tmp_path / "density.csv.json").read_text())
    assert header["kind"] == "density"
    assert header["t"] == 1.25


def test_table_round_trip(tmp_path):
    rows = [
        {"scheme": "ds-k5", "tau": 0.0625, "l2_error": 1.2e-2, "h1_error": 3.4e-2,
         "eta": 5.6e-2, "fitted_rate": None},
        {"scheme": "ds-k5", "tau": 0.03125, "l2_error": 3.1e-3, "h1_error": 8.6e-3,
         "eta": 1.4e-2, "fitted_rate": 1.953},
    ]
    path = tmp_path / "table.csv"
    write_table(path, rows)
    text = path.read_text().splitlines()
    assert text[0] == "scheme,tau,l2_error,h1_error,eta,fitted_rate"
    assert read_table(path) == rows


def test_content_hash_stable_and_sensitive():
    payload = {"kappa": 10.0, "n": [121, 121]}
    assert content_hash(payload) == content_hash({"n": [121, 121], "kappa": 10.0})
    assert content_hash(payload) != content_hash({"kappa": 10.5, "n": [121, 121]})
    assert len(content_hash(payload)) == 64
