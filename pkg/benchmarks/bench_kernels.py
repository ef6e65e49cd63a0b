"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the CSR matrix-vector product and a full preconditioned BiCGStab
solve on the desk-scale stepping system (121x121 grid, i*I - (tau/2)*H),
plus one full shadow-Lagrangian step via each backend.

Usage: python benchmarks/bench_kernels.py [--n 121] [--repeats 50]
"""

import argparse
import time

import numpy as np

from gpshadow.grid import build_grid
from gpshadow.kernels import _ref
from gpshadow.model import potential_fn
from gpshadow.operators import laplacian, potential_diagonal

try:
    from gpshadow.kernels import _core
except ImportError:
    _core = None


def build_system(n):
    grid = build_grid(((-6.0, 6.0), (-6.0, 6.0)), n)
    lap = laplacian(grid)
    pot = potential_diagonal(grid, potential_fn({"kind": "harmonic", "gamma": [2.0, 1.0]}))
    h0 = (-0.5) * lap + pot
    tau = 2.0**-6
    a = h0.scaled_with_diagonal(-0.5 * tau, 1j * np.ones(grid.m))
    rng = np.random.default_rng(0)
    x = rng.standard_normal(grid.m) + 1j * rng.standard_normal(grid.m)
    b = a @ x
    return grid, a, b, x


def timeit(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=121, help="nodes per dimension")
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    grid, a, b, _ = build_system(args.n)
    inv_diag = 1.0 / a.diagonal()
    x0 = np.zeros(grid.m, dtype=np.complex128)
    backends = [("python", _ref)] + ([("compiled", _core)] if _core else [])
    if _core is None:
        print("note: compiled extension not available, timing the fallback only")

    print(f"grid {grid.n[0]}x{grid.n[1]} ({grid.m} unknowns, {a.nnz} nonzeros)\n")
    print(f"{'kernel':<28}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'speedup':>10}")
    results = {}
    for label, make in (
        ("csr_matvec", lambda be: (lambda: be.csr_matvec(a.indptr, a.indices, a.data, b))),
        ("bicgstab tol=1e-10", lambda be: (lambda: be.bicgstab(
            a.indptr, a.indices, a.data, b, x0, inv_diag, 1e-10, 2000))),
    ):
        times = [timeit(make(be), args.repeats) for _, be in backends]
        results[label] = times
        row = f"{label:<28}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.2f}x"
        print(row)

    # sanity: both backends agree on the solve
    if _core is not None:
        xs = [be.bicgstab(a.indptr, a.indices, a.data, b, x0, inv_diag, 1e-10, 2000)[0]
              for _, be in backends]
        rel = np.linalg.norm(xs[0] - xs[1]) / np.linalg.norm(xs[1])
        print(f"\nbackend solution agreement: {rel:.2e} relative")


if __name__ == "__main__":
    main()
