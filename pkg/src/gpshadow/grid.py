"""Uniform tensor-product grids on rectangles with homogeneous Dirichlet boundaries.

Fields live on the interior nodes only (boundary values are identically
zero) and are stored as flat complex arrays in row-major interior order.
Integrals use the interior midpoint rule with weight h1*...*hd.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Bounds = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class Grid:
    """Uniform grid over a 1D interval or 2D rectangle.

    ``n`` counts nodes per dimension including the two boundary nodes, so the
    spacing is h_i = (b_i - a_i) / (n_i - 1). Interior nodes are indexed
    row-major over the interior lattice ((n_1-2) x ... x (n_d-2)); the flat
    index of interior lattice point (i, j) in 2D is i*(n_2-2) + j.
    """

    bounds: Bounds
    n: tuple[int, ...]
    h: tuple[float, ...]
    dim: int
    m: int
    quad_weight: float

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(ni - 2 for ni in self.n)

    def axis_coords(self, axis: int, interior_only: bool = True) -> np.ndarray:
        """Node coordinates along one axis, by default without the endpoints."""
        a, b = self.bounds[axis]
        full = a + self.h[axis] * np.arange(self.n[axis])
        full[-1] = b
        return full[1:-1] if interior_only else full

    def interior_coords(self) -> tuple[np.ndarray, ...]:
        """Per-dimension coordinate arrays of length m, in interior-index order."""
        axes = [self.axis_coords(d) for d in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        x, y = np.meshgrid(axes[0], axes[1], indexing="ij")
        return (x.ravel(), y.ravel())

    def flat_index(self, *lattice_idx: int) -> int:
        """Flat interior index of an interior lattice point."""
        if len(lattice_idx) != self.dim:
            raise ValueError(f"expected {self.dim} indices, got {len(lattice_idx)}")
        shape = self.interior_shape
        for i, s in zip(lattice_idx, shape):
            if not 0 <= i < s:
                raise IndexError(f"lattice index {lattice_idx} outside interior {shape}")
        if self.dim == 1:
            return lattice_idx[0]
        return lattice_idx[0] * shape[1] + lattice_idx[1]


def build_grid(bounds, n_per_dim) -> Grid:
    """Construct a grid from per-dimension intervals and node counts.

    ``bounds`` is (a, b) in 1D or ((a1, b1), (a2, b2)) in 2D; ``n_per_dim``
    is an int (same count for every dimension) or a per-dimension sequence.
    Requires n_i >= 3 so at least one interior node exists.
    """
    if np.ndim(bounds[0]) == 0:
        bounds = (tuple(bounds),)
    bounds = tuple((float(a), float(b)) for a, b in bounds)
    dim = len(bounds)
    if dim not in (1, 2):
        raise ValueError(f"only 1D and 2D grids are supported, got dim={dim}")
    if np.ndim(n_per_dim) == 0:
        n = (int(n_per_dim),) * dim
    else:
        n = tuple(int(k) for k in n_per_dim)
    if len(n) != dim:
        raise ValueError("n_per_dim does not match the number of bounds")
    for (a, b), ni in zip(bounds, n):
        if not b > a:
            raise ValueError(f"degenerate interval [{a}, {b}]")
        if ni < 3:
            raise ValueError(f"need at least 3 nodes per dimension, got {ni}")
    h = tuple((b - a) / (ni - 1) for (a, b), ni in zip(bounds, n))
    m = int(np.prod([ni - 2 for ni in n]))
    quad_weight = float(np.prod(h))
    return Grid(bounds=bounds, n=n, h=h, dim=dim, m=m, quad_weight=quad_weight)


def eval_on_grid(grid: Grid, f) -> np.ndarray:
    """Evaluate ``f`` at the interior nodes, returning a flat complex field.

    ``f`` receives one coordinate array per dimension (each of length m) and
    must evaluate elementwise, e.g. ``lambda x, y: x * np.exp(1j * y)``.
    """
    values = f(*grid.interior_coords())
    field = np.asarray(values, dtype=np.complex128)
    if field.shape != (grid.m,):
        field = np.broadcast_to(field, (grid.m,)).astype(np.complex128)
    return np.ascontiguousarray(field)
