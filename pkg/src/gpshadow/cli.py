"""Command-line entry point.

Subcommands: ``groundstate`` (compute and cache initial data), ``evolve``
(one trajectory with observable series and density snapshots), ``converge``
(tau sweep against a Crank-Nicolson reference) and ``tables`` (dump the
dissipation coefficients).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from gpshadow import storage
from gpshadow.groundstate import count_vortices
from gpshadow.harness import (
    SCHEME_IDS,
    StudySpec,
    compute_initial_state,
    parse_scheme_id,
    resolve_problem,
    run_study,
)
from gpshadow.integrators import DISSIPATION_TABLE, run_scheme
from gpshadow.model import assemble_evolution_operators


def _parse_tau(text: str) -> float:
    """Accept plain floats and '2^-8' style powers."""
    if "^" in text:
        base, exponent = text.split("^")
        return float(base) ** float(exponent)
    return float(text)


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", default=None, help="stock problem name (mp1 | mp2)")
    p.add_argument("--config", default=None, help="path to a problem config JSON")
    p.add_argument("--resolution", type=int, default=None,
                   help="nodes per dimension incl. boundary (default from config; 121 = desk scale)")
    p.add_argument("--out", default="out", help="output directory")


def _problem_from_args(args) -> "ProblemConfig":
    if (args.problem is None) == (args.config is None):
        raise SystemExit("specify exactly one of --problem or --config")
    return resolve_problem(args.problem if args.problem else args.config)


def cmd_groundstate(args) -> int:
    config = _problem_from_args(args)
    if args.seed_phase is not None and config.ground_state is not None:
        config = dataclasses.replace(
            config,
            ground_state=dataclasses.replace(config.ground_state, seed_phase=args.seed_phase),
        )
    grid = config.make_grid(args.resolution)
    out = Path(args.out)
    field, result, cache_path = compute_initial_state(config, grid, cache_dir=str(out / "cache"))
    from gpshadow.groundstate import GroundStateProblem  # local import to keep startup light

    problem = GroundStateProblem(grid, config.ground_state)
    report = {
        "energy0": problem.energy0(field),
        "cache_hit": result is None,
        "iterations": None if result is None else result.iterations,
        "converged": True if result is None else result.converged,
        "vortices": count_vortices(grid, field) if grid.dim == 2 else 0,
        "snapshot": str(cache_path),
    }
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"groundstate_{config.name}_report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    storage.write_density(out / f"groundstate_{config.name}_density.csv", grid, field, 0.0)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_evolve(args) -> int:
    config = _problem_from_args(args)
    if args.tau is not None:
        config = dataclasses.replace(config, tau=_parse_tau(args.tau))
    if args.scheme is not None:
        scheme, k_order = parse_scheme_id(args.scheme) if "-" in args.scheme else (args.scheme, args.k)
        config = dataclasses.replace(config, scheme=scheme, k_order=k_order)
    elif args.k is not None:
        config = dataclasses.replace(config, k_order=args.k)
    grid = config.make_grid(args.resolution)
    out = Path(args.out)
    u0, _, _ = compute_initial_state(config, grid, cache_dir=str(out / "cache"))
    lap, pot = assemble_evolution_operators(config, grid)
    tag = f"{config.name}_{config.scheme}" + (f"k{config.k_order}" if config.scheme == "ds" else "")

    density_every = args.density_cadence

    def snapshot_observer(n, t, psi, phi):
        if density_every and n % density_every == 0:
            storage.write_density(out / f"density_{tag}_n{n:06d}.csv", grid, psi, t)

    result = run_scheme(config.scheme, config.k_order, grid, lap, pot, u0,
                        config.kappa, config.tau, config.T, cadence=args.cadence,
                        observers=[snapshot_observer] if density_every else None)
    storage.write_series(out / f"series_{tag}.csv", result.records)
    storage.write_density(out / f"density_{tag}_initial.csv", grid, u0, 0.0)
    storage.write_density(out / f"density_{tag}_final.csv", grid, result.psi, result.records[-1].t)
    correlation = _mass_energy_correlation(result.records)
    print(f"status={result.status} steps={result.steps_completed} "
          f"mass_energy_correlation={correlation:.4f} "
          f"series={out / f'series_{tag}.csv'}")
    return 0 if result.ok else 3


def _mass_energy_correlation(records) -> float:
    """Correlation of the mass and energy traces (reported, never asserted)."""
    import numpy as np

    masses = np.array([r.mass for r in records])
    energies = np.array([r.energy for r in records])
    if len(masses) < 2 or masses.std() == 0 or energies.std() == 0:
        return float("nan")
    return float(np.corrcoef(masses, energies)[0, 1])


def cmd_converge(args) -> int:
    config = _problem_from_args(args)
    schemes = tuple(s.strip() for s in args.schemes.split(","))
    taus = tuple(_parse_tau(t.strip()) for t in args.taus.split(","))
    study = StudySpec(problem=config, schemes=schemes, taus=taus,
                      tau_ref=_parse_tau(args.tau_ref), out_dir=args.out,
                      cadence=args.cadence, resolution=args.resolution, jobs=args.jobs)
    rows = run_study(study)
    for row in rows:
        rate = "" if row.fitted_rate is None else f" rate={row.fitted_rate:.3f}"
        print(f"{row.scheme:7s} tau={row.tau:<12g} l2={row.l2_error:.6e} "
              f"h1={row.h1_error:.6e}{rate} [{row.status}]")
    print(f"table={Path(args.out) / 'convergence.csv'}")
    return 0


def cmd_tables(args) -> int:
    print("k,beta,alpha," + ",".join(f"c{i}" for i in range(8)))
    for k in sorted(DISSIPATION_TABLE):
        row = DISSIPATION_TABLE[k]
        cs = ",".join(str(c) for c in row.c)
        print(f"{k},{row.beta},{row.alpha},{cs}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gpshadow",
                                     description="Shadow-Lagrangian integrators for the "
                                                 "Gross-Pitaevskii equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gs = sub.add_parser("groundstate", help="compute (or load) ground-state initial data")
    _add_problem_args(p_gs)
    p_gs.add_argument("--seed-phase", action=argparse.BooleanOptionalAction, default=None,
                      help="force the vortex phase factor in the seed on/off")
    p_gs.set_defaults(func=cmd_groundstate)

    p_ev = sub.add_parser("evolve", help="run one trajectory")
    _add_problem_args(p_ev)
    p_ev.add_argument("--scheme", default=None, help=f"one of {SCHEME_IDS} or ds/cn/besse")
    p_ev.add_argument("--k", type=int, default=None, help="dissipation order for ds")
    p_ev.add_argument("--tau", default=None, help="step size (accepts 2^-8 style)")
    p_ev.add_argument("--cadence", type=int, default=1, help="record observables every c steps")
    p_ev.add_argument("--density-cadence", type=int, default=0,
                      help="write density snapshots every c steps (0: initial/final only)")
    p_ev.set_defaults(func=cmd_evolve)

    p_cv = sub.add_parser("converge", help="tau sweep against a CN reference")
    _add_problem_args(p_cv)
    p_cv.add_argument("--schemes", default="ds-k5,cn,besse",
                      help="comma-separated scheme ids")
    p_cv.add_argument("--taus", default="2^-4,2^-5,2^-6,2^-7,2^-8",
                      help="comma-separated step sizes")
    p_cv.add_argument("--tau-ref", default="2^-11", help="reference step size")
    p_cv.add_argument("--cadence", type=int, default=1)
    p_cv.add_argument("--jobs", type=int, default=None, help="worker threads (default: auto)")
    p_cv.set_defaults(func=cmd_converge)

    p_tb = sub.add_parser("tables", help="print the dissipation coefficient table")
    p_tb.set_defaults(func=cmd_tables)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
