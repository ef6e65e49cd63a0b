import os
import subprocess
import sys

import numpy as np
import pytest

from gpshadow import kernels
from gpshadow.kernels import _ref

try:
    from gpshadow.kernels import _core
except ImportError:
    _core = None

BACKENDS = [("python", _ref)] + ([("compiled", _core)] if _core else [])


def random_csr(m, rng, density=0.3, empty_rows=()):
    rows, cols, vals = [], [], []
    for i in range(m):
        if i in empty_rows:
            continue
        rows.append(i)
        cols.append(i)
        vals.append(2.0 * m + rng.standard_normal() + 1j * rng.standard_normal())
        for j in range(m):
            if j != i and rng.uniform() < density:
                rows.append(i)
                cols.append(j)
                vals.append(rng.standard_normal() + 1j * rng.standard_normal())
    order = np.lexsort((cols, rows))
    rows, cols = np.asarray(rows)[order], np.asarray(cols)[order]
    vals = np.asarray(vals, dtype=complex)[order]
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return np.cumsum(indptr), cols.astype(np.int64), vals


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_matvec_against_dense(name, backend, rng):
    for trial in range(3):
        indptr, indices, data, = random_csr(9, np.random.default_rng(trial))
        dense = np.zeros((9, 9), dtype=complex)
        rows = np.repeat(np.arange(9), np.diff(indptr))
        dense[rows, indices] = data
        x = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        assert np.allclose(backend.csr_matvec(indptr, indices, data, x), dense @ x, atol=1e-13)


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_matvec_handles_empty_rows(name, backend, rng):
    indptr, indices, data = random_csr(7, rng, empty_rows={0, 3, 6})
    x = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    out = backend.csr_matvec(indptr, indices, data, x)
    assert out[0] == 0.0 and out[3] == 0.0 and out[6] == 0.0


@pytest.mark.skipif(_core is None, reason="compiled extension not built")
def test_backends_agree(rng):
    indptr, indices, data = random_csr(20, rng)
    x = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    ref_out = _ref.csr_matvec(indptr, indices, data, x)
    core_out = _core.csr_matvec(indptr, indices, data, x)
    assert np.allclose(ref_out, core_out, atol=1e-13)

    b = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    diag_pos = [indptr[i] + int(np.flatnonzero(indices[indptr[i]:indptr[i + 1]] == i)[0])
                for i in range(20)]
    inv_diag = 1.0 / data[diag_pos]
    x0 = np.zeros(20, dtype=complex)
    for backend in (_ref, _core):
        x_out, iters, res, conv = backend.bicgstab(indptr, indices, data, b, x0, inv_diag,
                                                   1e-12, 200)
        assert conv
        assert res <= 1e-12


@pytest.mark.parametrize("name,backend", BACKENDS)
def test_bicgstab_zero_rhs(name, backend):
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([0, 1], dtype=np.int64)
    data = np.array([2.0 + 0j, 3.0 + 0j])
    x, iters, res, conv = backend.bicgstab(indptr, indices, data, np.zeros(2, dtype=complex),
                                           np.zeros(2, dtype=complex), 1.0 / data, 1e-12, 10)
    assert conv and iters == 0 and res == 0.0
    assert np.array_equal(x, np.zeros(2))


def test_backend_selection_env_var():
    code = "from gpshadow import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, GPSHADOW_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"


def test_active_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")
