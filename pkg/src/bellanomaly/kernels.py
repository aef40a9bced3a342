"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``BELLANOMALY_PURE=1`` forces the numpy fallback. ``BACKEND``
names the active one.
"""

import os

from . import _pykernels

if os.environ.get("BELLANOMALY_PURE") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

jacobi_eigh = _impl.jacobi_eigh
givens_ascent = _impl.givens_ascent


def backend(name):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
