"""Persistence: field snapshots, observable series, convergence tables, caching.

Everything is plain CSV with JSON sidecars for headers; writers are
deterministic (identical inputs give byte-identical files) and floats are
written with shortest round-trip precision so reads are lossless.
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gpshadow.grid import Grid, build_grid
from gpshadow.observables import ObservableRecord

SERIES_HEADER = "n,t,mass,energy,eta,consistency_l2,consistency_h1,extended_energy"
TABLE_HEADER = "scheme,tau,l2_error,h1_error,eta,fitted_rate"


@dataclass
class Snapshot:
    """One complex field plus the grid metadata needed to reuse it."""

    bounds: tuple
    n: tuple
    t: float
    kind: str  # psi | phi | u0 | density
    config_hash: str
    payload: np.ndarray  # flat complex field over interior nodes

    def grid(self) -> Grid:
        return build_grid(self.bounds, self.n)


def _fmt(x: float) -> str:
    return repr(float(x))


def _sidecar(path) -> Path:
    return Path(str(path) + ".json")


def write_snapshot(path, snap: Snapshot) -> None:
    """Write the field payload as a real,imag CSV plus a JSON header sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "bounds": [list(b) for b in snap.bounds],
        "n": list(snap.n),
        "t": snap.t,
        "kind": snap.kind,
        "config_hash": snap.config_hash,
        "payload_len": 2 * len(snap.payload),
    }
    lines = ["real,imag"]
    lines.extend(f"{_fmt(v.real)},{_fmt(v.imag)}" for v in snap.payload)
    _atomic_write(path, "\n".join(lines) + "\n")
    _atomic_write(_sidecar(path), json.dumps(header, indent=2, sort_keys=True) + "\n")


def read_snapshot(path) -> Snapshot:
    path = Path(path)
    with open(_sidecar(path), "r", encoding="utf-8") as fh:
        header = json.load(fh)
    raw = np.loadtxt(path, delimiter=",", skiprows=1, dtype=float, ndmin=2)
    payload = raw[:, 0] + 1j * raw[:, 1]
    bounds = tuple(tuple(b) for b in header["bounds"])
    n = tuple(header["n"])
    expected_m = int(np.prod([ni - 2 for ni in n]))
    if len(payload) != expected_m or header.get("payload_len") != 2 * len(payload):
        raise ValueError(
            f"snapshot payload length {len(payload)} does not match header grid ({expected_m} nodes)"
        )
    return Snapshot(bounds=bounds, n=n, t=float(header["t"]), kind=header["kind"],
                    config_hash=header["config_hash"], payload=payload)


def read_snapshot_checked(path, expected_hash: str) -> Snapshot:
    """Load a snapshot, warning (not failing) when the config hash differs."""
    snap = read_snapshot(path)
    if snap.config_hash != expected_hash:
        warnings.warn(
            f"snapshot {path} was produced by a different configuration "
            f"({snap.config_hash[:12]} != {expected_hash[:12]})",
            stacklevel=2,
        )
    return snap


def write_series(path, rows: list[ObservableRecord]) -> None:
    """Observable series as CSV with the fixed column order of SERIES_HEADER."""
    lines = [SERIES_HEADER]
    for r in rows:
        ext = "" if r.extended_energy is None else _fmt(r.extended_energy)
        lines.append(
            f"{r.n},{_fmt(r.t)},{_fmt(r.mass)},{_fmt(r.energy)},{_fmt(r.eta)},"
            f"{_fmt(r.consistency_l2)},{_fmt(r.consistency_h1)},{ext}"
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, "\n".join(lines) + "\n")


def read_series(path) -> list[ObservableRecord]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != SERIES_HEADER:
            raise ValueError(f"unexpected series header {header!r}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rows.append(ObservableRecord(
                n=int(parts[0]), t=float(parts[1]), mass=float(parts[2]),
                energy=float(parts[3]), eta=float(parts[4]),
                consistency_l2=float(parts[5]), consistency_h1=float(parts[6]),
                extended_energy=float(parts[7]) if parts[7] else None,
            ))
    return rows


def write_density(path, grid: Grid, field: np.ndarray, t: float, config_hash: str = "") -> None:
    """|field|^2 on the full grid (boundary zeros included), as a CSV matrix.

    Rows run over the second coordinate (y), columns over the first (x), so
    the matrix renders directly as an image of the physical domain; the JSON
    sidecar carries bounds and node counts.
    """
    interior = np.abs(field.reshape(grid.interior_shape)) ** 2
    if grid.dim == 1:
        full = np.zeros((1, grid.n[0]))
        full[0, 1:-1] = interior
    else:
        full = np.zeros((grid.n[1], grid.n[0]))
        full[1:-1, 1:-1] = interior.T
    header = {
        "bounds": [list(b) for b in grid.bounds],
        "n": list(grid.n),
        "t": t,
        "kind": "density",
        "config_hash": config_hash,
    }
    lines = [",".join(_fmt(v) for v in row) for row in full]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, "\n".join(lines) + "\n")
    _atomic_write(_sidecar(path), json.dumps(header, indent=2, sort_keys=True) + "\n")


def write_table(path, rows: list[dict]) -> None:
    """Convergence table CSV: scheme,tau,l2_error,h1_error,eta,fitted_rate."""
    lines = [TABLE_HEADER]
    for r in rows:
        rate = "" if r.get("fitted_rate") is None else _fmt(r["fitted_rate"])
        lines.append(
            f"{r['scheme']},{_fmt(r['tau'])},{_fmt(r['l2_error'])},"
            f"{_fmt(r['h1_error'])},{_fmt(r['eta'])},{rate}"
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, "\n".join(lines) + "\n")


def read_table(path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TABLE_HEADER:
            raise ValueError(f"unexpected table header {header!r}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rows.append({
                "scheme": parts[0], "tau": float(parts[1]), "l2_error": float(parts[2]),
                "h1_error": float(parts[3]), "eta": float(parts[4]),
                "fitted_rate": float(parts[5]) if parts[5] else None,
            })
    return rows


def content_hash(payload: dict) -> str:
    """Stable hash of a JSON-serializable description, for cache filenames."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
