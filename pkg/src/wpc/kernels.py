"""Hot loops over enumerated group elements, compiled or pure-numpy.

Both backends expose the same two functions:

``series_sums(a, b, shell, z) -> (theta, absum, shellsum)``
    For every point ``z[k]`` and element ``(a[i], b[i])`` let
    ``q = conj(b) z + conj(a)``. Returns ``sum q**-4`` (complex),
    ``sum |q|**-4`` and the latter restricted to ``shell[i] != 0``.
    ``q**-2`` is the element's derivative, so these are the theta series and
    its absolute-value majorant.

``image_min(a, b, z) -> (minval, argmin)``
    ``min_i |g_i(z)|**2`` and its index (``-1`` / ``2.0`` when no element is given).

The compiled extension is used when importable unless ``WPC_PURE_PYTHON`` is set.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("WPC_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"
_impl = _compiled if _compiled is not None else _fallback


def _prep(a, b, z):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    z = np.ascontiguousarray(np.atleast_1d(z), dtype=np.complex128)
    return a, b, z


def series_sums(a, b, shell, z, backend=None):
    a, b, z = _prep(a, b, z)
    shell = np.ascontiguousarray(shell, dtype=np.uint8)
    impl = _select(backend)
    theta, absum, shellsum = impl.series_sums(a, b, shell, z)
    return np.asarray(theta), np.asarray(absum), np.asarray(shellsum)


def image_min(a, b, z, backend=None):
    a, b, z = _prep(a, b, z)
    minval, argmin = _select(backend).image_min(a, b, z)
    return np.asarray(minval), np.asarray(argmin)


def _select(backend):
    if backend is None:
        return _impl
    if backend == "numpy":
        return _fallback
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")
