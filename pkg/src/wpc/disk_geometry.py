"""Poincare disk primitives.

Automorphisms are stored as normalized SU(1,1) matrices::

    [[a, b], [conj(b), conj(a)]],   |a|^2 - |b|^2 = 1

acting by ``z -> (a z + b) / (conj(b) z + conj(a))``. Every function here
accepts a Python complex or a numpy array of points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPointError

#: Points with ``|z| > 1 - BOUNDARY_EPS`` are rejected.
BOUNDARY_EPS = 1e-15

#: Hyperbolic radius of the Euclidean ball ``|z| < 1/sqrt(2)``, i.e. ln(3 + 2 sqrt 2).
LOG_3_2SQRT2 = math.log(3.0 + 2.0 * math.sqrt(2.0))

_EPS = np.finfo(float).eps


def check_points(z):
    """Return ``z`` unchanged after verifying it lies in the open unit disk."""
    arr = np.asarray(z)
    if not np.all(np.isfinite(arr)):
        raise InvalidPointError("point is NaN or infinite")
    if np.any(np.abs(arr) > 1.0 - BOUNDARY_EPS):
        raise InvalidPointError(f"point outside the open unit disk: max |z| = {np.max(np.abs(arr))!r}")
    return z


@dataclass(frozen=True)
class DiskAutomorphism:
    """Orientation-preserving isometry of the Poincare disk."""

    a: complex
    b: complex

    @classmethod
    def identity(cls) -> "DiskAutomorphism":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def rotation(cls, phi: float) -> "DiskAutomorphism":
        """Rotation ``z -> exp(i phi) z``."""
        return cls(complex(np.exp(0.5j * phi)), 0j)

    @classmethod
    def axial_translation(cls, length: float) -> "DiskAutomorphism":
        """Translation by hyperbolic ``length`` along the real diameter (0 maps to tanh(length/2))."""
        return cls(complex(math.cosh(0.5 * length)), complex(math.sinh(0.5 * length)))

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-9) -> "DiskAutomorphism":
        """Build from a 2x2 complex matrix of SU(1,1) shape (rescaled to unit determinant)."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        scale = max(abs(a), 1.0)
        if abs(c - np.conj(b)) > tol * scale or abs(d - np.conj(a)) > tol * scale:
            raise ValueError("matrix is not of the form [[a, b], [conj(b), conj(a)]]")
        det = abs(a) ** 2 - abs(b) ** 2
        if det <= 0 or abs(det - 1.0) > tol * scale**2:
            raise ValueError(f"determinant |a|^2-|b|^2 = {det!r} is not 1")
        s = math.sqrt(det)
        return cls(complex(a) / s, complex(b) / s)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [np.conj(self.b), np.conj(self.a)]], dtype=complex)

    @property
    def det(self) -> float:
        return abs(self.a) ** 2 - abs(self.b) ** 2

    @property
    def trace(self) -> float:
        return 2.0 * self.a.real

    def __call__(self, z):
        return apply(self, z)

    def __matmul__(self, other: "DiskAutomorphism") -> "DiskAutomorphism":
        return compose(self, other)

    def inverse(self) -> "DiskAutomorphism":
        return inverse(self)

    def derivative(self, z):
        return derivative(self, z)


def _renormalize(a, b):
    """Rescale (a, b) to unit determinant when drift exceeds rounding noise.

    Near-boundary elements have |a| ~ 1e5; there the determinant itself is only
    known to ~|a|^2 eps, and rescaling by it would inject error.
    """
    det = np.abs(a) ** 2 - np.abs(b) ** 2
    noise = 64.0 * _EPS * (np.abs(a) ** 2 + np.abs(b) ** 2)
    fix = np.abs(det - 1.0) > noise
    if np.ndim(det) == 0:
        if fix:
            s = math.sqrt(det)
            return a / s, b / s
        return a, b
    s = np.where(fix, np.sqrt(np.where(det > 0, det, 1.0)), 1.0)
    return a / s, b / s


def apply(T: DiskAutomorphism, z):
    check_points(z)
    return (T.a * z + T.b) / (np.conj(T.b) * z + np.conj(T.a))


def derivative(T: DiskAutomorphism, z):
    """Complex derivative ``1 / (conj(b) z + conj(a))^2``."""
    check_points(z)
    q = np.conj(T.b) * z + np.conj(T.a)
    return 1.0 / (q * q)


def compose(T1: DiskAutomorphism, T2: DiskAutomorphism) -> DiskAutomorphism:
    """``T1 o T2`` (apply T2 first)."""
    a = T1.a * T2.a + T1.b * np.conj(T2.b)
    b = T1.a * T2.b + T1.b * np.conj(T2.a)
    a, b = _renormalize(a, b)
    return DiskAutomorphism(complex(a), complex(b))


def inverse(T: DiskAutomorphism) -> DiskAutomorphism:
    return DiskAutomorphism(complex(np.conj(T.a)), -T.b)


def compose_arrays(a1, b1, a2, b2):
    """Vectorized composition of automorphism arrays, ``(a1,b1) o (a2,b2)``."""
    a = a1 * a2 + b1 * np.conj(b2)
    b = a1 * b2 + b1 * np.conj(a2)
    return _renormalize(a, b)


def translator(p) -> DiskAutomorphism:
    """The automorphism ``z -> (z + p) / (1 + conj(p) z)`` sending 0 to ``p``."""
    check_points(p)
    p = complex(p)
    s = math.sqrt(1.0 - abs(p) ** 2)
    return DiskAutomorphism(1.0 / s + 0j, p / s)


def density(z):
    """Hyperbolic metric density ``4 / (1 - |z|^2)^2``."""
    check_points(z)
    return 4.0 / (1.0 - np.abs(z) ** 2) ** 2


def hyperbolic_distance(z, w):
    check_points(z)
    check_points(w)
    num = np.abs(np.asarray(z) - w)
    den = np.abs(1.0 - np.conj(z) * w)
    return 2.0 * np.arctanh(np.minimum(num / den, 1.0 - _EPS))


def distance_from_origin(z):
    """``ln((1 + |z|) / (1 - |z|))``."""
    check_points(z)
    return 2.0 * np.arctanh(np.abs(z))


def ball_euclidean_radius(r):
    """Euclidean radius of the hyperbolic ball B(0; r): ``(e^r - 1)/(e^r + 1)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    out = np.tanh(0.5 * r)
    return float(out) if out.ndim == 0 else out


def ball_hyperbolic_radius(t):
    """Inverse of :func:`ball_euclidean_radius`."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise ValueError("Euclidean radius must lie in [0, 1)")
    out = 2.0 * np.arctanh(t)
    return float(out) if out.ndim == 0 else out
