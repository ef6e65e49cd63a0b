"""Experiment orchestration: ground states, single evolutions, tau sweeps.

A study runs a set of (scheme, tau) pairs against one cached Crank-Nicolson
reference solution and reports final-time errors with fitted convergence
rates between adjacent step sizes. Pairs are independent and run on a small
thread pool; all outputs go through the storage module so repeated studies
with a warm cache are byte-identical.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gpshadow import storage
from gpshadow.grid import Grid
from gpshadow.groundstate import GroundStateResult, ground_state
from gpshadow.integrators import run_scheme
from gpshadow.model import (
    GroundStateSpec,
    ProblemConfig,
    assemble_evolution_operators,
    build_problem,
    load_config,
)
from gpshadow.observables import error_norms

SCHEME_IDS = ("ds-k0", "ds-k2", "ds-k3", "ds-k4", "ds-k5", "ds-k6", "cn", "besse")


def parse_scheme_id(scheme_id: str) -> tuple[str, int]:
    """'ds-k5' -> ('ds', 5); 'cn' -> ('cn', 0); 'besse' -> ('besse', 0)."""
    if scheme_id in ("cn", "besse"):
        return scheme_id, 0
    if scheme_id.startswith("ds-k"):
        return "ds", int(scheme_id[4:])
    raise ValueError(f"unknown scheme id {scheme_id!r}; expected one of {SCHEME_IDS}")


@dataclass(frozen=True)
class StudySpec:
    """A convergence sweep: problem, schemes, step sizes, reference step."""

    problem: ProblemConfig
    schemes: tuple[str, ...]
    taus: tuple[float, ...]
    tau_ref: float
    out_dir: str
    cadence: int = 1
    resolution: int | None = None
    jobs: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "taus", tuple(sorted(self.taus, reverse=True)))
        if len(self.taus) == 0:
            raise ValueError("at least one step size is required")
        if not self.tau_ref < min(self.taus) / 4:
            raise ValueError("tau_ref must be smaller than a quarter of the finest tau")
        for s in self.schemes:
            parse_scheme_id(s)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.to_dict(),
            "schemes": list(self.schemes),
            "taus": list(self.taus),
            "tau_ref": self.tau_ref,
            "cadence": self.cadence,
            "resolution": self.resolution,
        }

    @staticmethod
    def from_dict(d: dict, out_dir: str) -> "StudySpec":
        return StudySpec(
            problem=ProblemConfig.from_dict(d["problem"]),
            schemes=tuple(d["schemes"]),
            taus=tuple(float(t) for t in d["taus"]),
            tau_ref=float(d["tau_ref"]),
            out_dir=out_dir,
            cadence=int(d.get("cadence", 1)),
            resolution=d.get("resolution"),
            jobs=d.get("jobs"),
        )


def resolve_problem(problem: str | ProblemConfig) -> ProblemConfig:
    if isinstance(problem, ProblemConfig):
        return problem
    if problem in ("mp1", "mp2"):
        return build_problem(problem)
    path = Path(problem)
    if path.exists():
        return load_config(path)
    raise ValueError(f"unknown problem {problem!r} (not a stock name or a config path)")


# --- ground-state stage -----------------------------------------------------

def ground_state_cache_key(spec: GroundStateSpec, grid: Grid) -> str:
    return storage.content_hash({
        "ground_state": spec.to_dict(),
        "bounds": [list(b) for b in grid.bounds],
        "n": list(grid.n),
    })


def compute_initial_state(
    config: ProblemConfig,
    grid: Grid,
    cache_dir: str | None = None,
) -> tuple[np.ndarray, GroundStateResult | None, Path | None]:
    """Ground-state initial data, loaded from the cache when available.

    Returns (field, flow result or None on a cache hit, cache path).
    """
    if config.ground_state is None:
        raise ValueError(f"config {config.name!r} has no initial-state specification")
    key = ground_state_cache_key(config.ground_state, grid)
    cache_path = None
    if cache_dir is not None:
        cache_path = Path(cache_dir) / f"groundstate_{key}.csv"
        if cache_path.exists():
            snap = storage.read_snapshot_checked(cache_path, key)
            return snap.payload, None, cache_path
    result = ground_state(grid, config.ground_state)
    if cache_path is not None:
        storage.write_snapshot(cache_path, storage.Snapshot(
            bounds=grid.bounds, n=grid.n, t=0.0, kind="u0",
            config_hash=key, payload=result.field,
        ))
    return result.field, result, cache_path


# --- reference solution -----------------------------------------------------

def reference_cache_key(config: ProblemConfig, grid: Grid, tau_ref: float) -> str:
    payload = config.to_dict()
    payload.update({
        "tau": tau_ref, "scheme": "cn", "k_order": 0,
        "grid_n": list(grid.n), "role": "reference",
    })
    return storage.content_hash(payload)


def reference_solution(
    config: ProblemConfig,
    grid: Grid,
    u0: np.ndarray,
    tau_ref: float,
    cache_dir: str | None = None,
) -> np.ndarray:
    """Crank-Nicolson solution at the final time, cached by content hash."""
    key = reference_cache_key(config, grid, tau_ref)
    cache_path = None
    if cache_dir is not None:
        cache_path = Path(cache_dir) / f"reference_{key}.csv"
        if cache_path.exists():
            return storage.read_snapshot_checked(cache_path, key).payload
    lap, pot = assemble_evolution_operators(config, grid)
    result = run_scheme("cn", 0, grid, lap, pot, u0, config.kappa, tau_ref, config.T,
                        cadence=max(1, round(config.T / tau_ref)))
    if not result.ok:
        raise RuntimeError(f"reference run failed: {result.status} ({result.message})")
    if cache_path is not None:
        storage.write_snapshot(cache_path, storage.Snapshot(
            bounds=grid.bounds, n=grid.n, t=config.T, kind="psi",
            config_hash=key, payload=result.psi,
        ))
    return result.psi


# --- sweeps ------------------------------------------------------------------

@dataclass
class ConvergenceRow:
    scheme: str
    tau: float
    l2_error: float
    h1_error: float
    eta: float
    fitted_rate: float | None = None
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme, "tau": self.tau, "l2_error": self.l2_error,
            "h1_error": self.h1_error, "eta": self.eta, "fitted_rate": self.fitted_rate,
        }


def _sweep_single(
    config: ProblemConfig,
    grid: Grid,
    u0: np.ndarray,
    scheme_id: str,
    tau: float,
    cadence: int,
    reference: np.ndarray,
    out_dir: Path | None,
) -> ConvergenceRow:
    scheme, k_order = parse_scheme_id(scheme_id)
    lap, pot = assemble_evolution_operators(config, grid)
    result = run_scheme(scheme, k_order, grid, lap, pot, u0, config.kappa, tau, config.T,
                        cadence=cadence)
    if out_dir is not None:
        tag = f"{scheme_id}_tau{tau:g}".replace(".", "p")
        storage.write_series(out_dir / f"series_{tag}.csv", result.records)
    if not result.ok:
        return ConvergenceRow(scheme=scheme_id, tau=tau, l2_error=float("nan"),
                              h1_error=float("nan"), eta=float("nan"), status=result.status)
    l2, h1 = error_norms(result.psi, reference, grid)
    eta_final = result.records[-1].eta
    return ConvergenceRow(scheme=scheme_id, tau=tau, l2_error=l2, h1_error=h1, eta=eta_final)


def fit_adjacent_rates(rows: list[ConvergenceRow]) -> None:
    """Attach log2 error-ratio rates between adjacent step sizes, per scheme."""
    by_scheme: dict[str, list[ConvergenceRow]] = {}
    for row in rows:
        by_scheme.setdefault(row.scheme, []).append(row)
    for scheme_rows in by_scheme.values():
        scheme_rows.sort(key=lambda r: -r.tau)
        for prev, cur in zip(scheme_rows, scheme_rows[1:]):
            if np.isfinite(prev.l2_error) and np.isfinite(cur.l2_error) and cur.l2_error > 0:
                cur.fitted_rate = float(
                    np.log2(prev.l2_error / cur.l2_error) / np.log2(prev.tau / cur.tau)
                )


def fitted_slope(taus, errors) -> float:
    """Least-squares slope of log2(error) against log2(tau)."""
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = np.isfinite(errors) & (errors > 0)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log2(taus[keep]), np.log2(errors[keep]), 1)[0])


def run_study(study: StudySpec, u0: np.ndarray | None = None) -> list[ConvergenceRow]:
    """Execute a full convergence study and write its outputs.

    Computes (or loads) the ground state and the reference solution, then
    runs every (scheme, tau) pair on independent worker threads. Failed runs
    become rows with NaN errors and the sweep continues.
    """
    out_dir = Path(study.out_dir)
    cache_dir = out_dir / "cache"
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = study.problem.make_grid(study.resolution)
    if u0 is None:
        u0, _, _ = compute_initial_state(study.problem, grid, cache_dir=str(cache_dir))
    reference = reference_solution(study.problem, grid, u0, study.tau_ref,
                                   cache_dir=str(cache_dir))
    pairs = [(s, t) for s in study.schemes for t in study.taus]
    jobs = study.jobs or min(len(pairs), os.cpu_count() or 1)

    def work(pair):
        scheme_id, tau = pair
        return _sweep_single(study.problem, grid, u0, scheme_id, tau, study.cadence,
                             reference, out_dir)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(work, pairs))
    else:
        rows = [work(p) for p in pairs]
    fit_adjacent_rates(rows)
    ordered = [row for s in study.schemes for row in rows if row.scheme == s]
    storage.write_table(out_dir / "convergence.csv", [r.to_dict() for r in ordered])
    return ordered
