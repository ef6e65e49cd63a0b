"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled Cython extension is preferred when importable; set
GPSHADOW_PURE_PYTHON=1 to force the numpy fallback. ``BACKEND`` reports
which implementation is active.
"""

import os

if os.environ.get("GPSHADOW_PURE_PYTHON"):
    from gpshadow.kernels import _ref as _backend
else:
    try:
        from gpshadow.kernels import _core as _backend  # type: ignore[no-redef]
    except ImportError:
        from gpshadow.kernels import _ref as _backend

BACKEND: str = _backend.NAME
csr_matvec = _backend.csr_matvec
bicgstab = _backend.bicgstab

__all__ = ["BACKEND", "csr_matvec", "bicgstab"]
