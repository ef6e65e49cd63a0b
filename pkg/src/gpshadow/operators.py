"""Sparse operators over interior grid nodes: Laplacian, potentials, rotation.

Operators are immutable CSR matrices with a deterministic layout (entries
sorted row-major, duplicates summed, explicit zeros dropped) so repeated
assembly is reproducible bit-for-bit.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from gpshadow import kernels
from gpshadow.grid import Grid


@dataclass(frozen=True)
class SparseOperator:
    """Square complex CSR matrix acting on flat interior fields."""

    m: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.data)

    def apply(self, x: np.ndarray) -> np.ndarray:
        if x.shape != (self.m,):
            raise ValueError(f"field of length {x.shape} does not match operator size {self.m}")
        return kernels.csr_matvec(self.indptr, self.indices, self.data, x)

    def __matmul__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        if other.m != self.m:
            raise ValueError("operator size mismatch")
        rows = np.concatenate([_entry_rows(self), _entry_rows(other)])
        cols = np.concatenate([self.indices, other.indices])
        vals = np.concatenate([self.data, other.data])
        return from_coo(self.m, rows, cols, vals)

    def __mul__(self, scalar: complex) -> "SparseOperator":
        return from_coo(self.m, _entry_rows(self), self.indices, self.data * scalar)

    __rmul__ = __mul__

    def scaled_with_diagonal(
        self, scale: complex, diag: np.ndarray | complex, dpos: np.ndarray | None = None
    ) -> "SparseOperator":
        """scale * self + diag(diag), assuming self stores every diagonal entry.

        This is the per-time-step assembly path: the sparsity pattern is
        reused, only the value array is rebuilt. Callers in hot loops pass a
        precomputed ``dpos = self.diagonal_positions()``.
        """
        data = self.data * scale
        if dpos is None:
            dpos = self.diagonal_positions()
        data[dpos] = data[dpos] + diag
        return dataclasses.replace(self, data=data)

    def diagonal(self) -> np.ndarray:
        diag = np.zeros(self.m, dtype=np.complex128)
        rows = _entry_rows(self)
        on_diag = rows == self.indices
        diag[self.indices[on_diag]] = self.data[on_diag]
        return diag

    def diagonal_positions(self) -> np.ndarray:
        """Positions of the diagonal entries in ``data``; requires a full diagonal."""
        pos = np.flatnonzero(_entry_rows(self) == self.indices)
        if len(pos) != self.m:
            raise ValueError("operator does not store every diagonal entry")
        return pos

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.m, self.m), dtype=np.complex128)
        dense[_entry_rows(self), self.indices] = self.data
        return dense


def _entry_rows(op: SparseOperator) -> np.ndarray:
    return np.repeat(np.arange(op.m, dtype=np.int64), np.diff(op.indptr))


def from_coo(m: int, rows, cols, vals) -> SparseOperator:
    """Build a CSR operator from coordinate triplets.

    Entries are sorted row-major, duplicate coordinates are summed, and
    exact-zero values are dropped, giving a canonical layout.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.complex128)
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if len(rows) > 0:
        new_group = np.empty(len(rows), dtype=bool)
        new_group[0] = True
        new_group[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(new_group)
        vals = np.add.reduceat(vals, starts)
        rows = rows[new_group]
        cols = cols[new_group]
        keep = vals != 0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr)
    return SparseOperator(m=m, indptr=indptr, indices=cols, data=vals)


def identity(grid_or_m) -> SparseOperator:
    m = grid_or_m.m if isinstance(grid_or_m, Grid) else int(grid_or_m)
    idx = np.arange(m, dtype=np.int64)
    return from_coo(m, idx, idx, np.ones(m, dtype=np.complex128))


def laplacian(grid: Grid) -> SparseOperator:
    """Second-order central-difference Laplacian with Dirichlet closure.

    3-point stencil in 1D, 5-point in 2D; symmetric and negative
    semidefinite. The one-half factor of the kinetic term is applied by
    callers.
    """
    shape = grid.interior_shape
    m = grid.m
    flat = np.arange(m, dtype=np.int64).reshape(shape)
    rows, cols, vals = [], [], []
    diag = np.zeros(m)
    for axis in range(grid.dim):
        inv_h2 = 1.0 / grid.h[axis] ** 2
        diag -= 2.0 * inv_h2
        lo = _axis_slice(flat, axis, slice(None, -1))
        hi = _axis_slice(flat, axis, slice(1, None))
        rows.extend([lo.ravel(), hi.ravel()])
        cols.extend([hi.ravel(), lo.ravel()])
        vals.extend([np.full(lo.size, inv_h2), np.full(lo.size, inv_h2)])
    rows.append(np.arange(m, dtype=np.int64))
    cols.append(np.arange(m, dtype=np.int64))
    vals.append(diag)
    return from_coo(m, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


def _axis_slice(arr: np.ndarray, axis: int, sl: slice) -> np.ndarray:
    sel: list = [slice(None)] * arr.ndim
    sel[axis] = sl
    return arr[tuple(sel)]


def potential_diagonal(grid: Grid, v) -> SparseOperator:
    """Diagonal operator with entries V(x_i); V must be finite on the domain."""
    values = np.asarray(v(*grid.interior_coords()), dtype=float)
    values = np.broadcast_to(values, (grid.m,))
    if not np.all(np.isfinite(values)):
        raise ValueError("potential is not finite at every interior node")
    idx = np.arange(grid.m, dtype=np.int64)
    return from_coo(grid.m, idx, idx, values.astype(np.complex128))


def rotation_operator(grid: Grid, omega: float) -> SparseOperator:
    """Omega times the angular-momentum operator -i(x d/dy - y d/dx).

    Central differences with Dirichlet closure; Hermitian with respect to
    the grid inner product on uniform grids. 2D only.
    """
    if grid.dim != 2:
        raise ValueError("the rotation operator requires a 2D grid")
    shape = grid.interior_shape
    m = grid.m
    flat = np.arange(m, dtype=np.int64).reshape(shape)
    x, y = (c.reshape(shape) for c in grid.interior_coords())
    hx, hy = grid.h
    rows, cols, vals = [], [], []
    # -i * x * d/dy: couples (i, j) to (i, j +/- 1)
    lo, hi = flat[:, :-1], flat[:, 1:]
    coef = (-1j) * omega / (2.0 * hy)
    rows.extend([lo.ravel(), hi.ravel()])
    cols.extend([hi.ravel(), lo.ravel()])
    vals.extend([coef * x[:, :-1].ravel(), -coef * x[:, 1:].ravel()])
    # +i * y * d/dx: couples (i, j) to (i +/- 1, j)
    lo, hi = flat[:-1, :], flat[1:, :]
    coef = (1j) * omega / (2.0 * hx)
    rows.extend([lo.ravel(), hi.ravel()])
    cols.extend([hi.ravel(), lo.ravel()])
    vals.extend([coef * y[:-1, :].ravel(), -coef * y[1:, :].ravel()])
    return from_coo(m, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))
