"""Pure-numpy implementations of the element-sum kernels."""

import numpy as np

# Elements x points per block; bounds temporary memory to ~100 MB.
_BLOCK = 1 << 22


def _point_chunks(n_elem, n_pts):
    step = max(1, _BLOCK // max(n_elem, 1))
    for start in range(0, n_pts, step):
        yield slice(start, min(start + step, n_pts))


def series_sums(a, b, shell, z):
    theta = np.zeros(len(z), dtype=complex)
    absum = np.zeros(len(z))
    shellsum = np.zeros(len(z))
    if len(a) == 0:
        return theta, absum, shellsum
    shell = shell.astype(bool)
    ca, cb = np.conj(a), np.conj(b)
    for sl in _point_chunks(len(a), len(z)):
        q = cb[None, :] * z[sl, None] + ca[None, :]
        inv_abs2 = 1.0 / (q.real**2 + q.imag**2)
        u = np.conj(q) * inv_abs2
        u2 = u * u
        theta[sl] = np.sum(u2 * u2, axis=1)
        m4 = inv_abs2 * inv_abs2
        absum[sl] = m4.sum(axis=1)
        shellsum[sl] = m4[:, shell].sum(axis=1)
    return theta, absum, shellsum


def image_min(a, b, z):
    minval = np.full(len(z), 2.0)
    argmin = np.full(len(z), -1, dtype=np.int64)
    if len(a) == 0:
        return minval, argmin
    ca, cb = np.conj(a), np.conj(b)
    for sl in _point_chunks(len(a), len(z)):
        w = (a[None, :] * z[sl, None] + b[None, :]) / (cb[None, :] * z[sl, None] + ca[None, :])
        val = w.real**2 + w.imag**2
        idx = np.argmin(val, axis=1)
        minval[sl] = val[np.arange(len(idx)), idx]
        argmin[sl] = idx
    return minval, argmin
