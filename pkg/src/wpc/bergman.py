"""Bergman kernel, Poincare theta series and projections of lifted indicators.

The weight -4 Bergman kernel is ``K(z, xi) = 12 / (pi (1 - z conj(xi))^4)``. For
base points ``p_i`` with translators ``sigma_i`` the truncated series

    Theta(z) = sum_i sum_{g in E} ((sigma_i^-1 o g)'(z))^2

is the closed form of the projection of the lifted indicator of the balls
``g sigma_i B(0; r)`` up to the prefactor ``12 tanh(r/2)^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .disk_geometry import DiskAutomorphism, ball_euclidean_radius, check_points, compose_arrays, translator
from .errors import NumericError
from .fuchsian import GroupEnumeration
from .quadrature import CHUNK, McEstimate, _Accumulator, _uniform_disk


def kernel(z, xi):
    check_points(z)
    check_points(xi)
    return 12.0 / (math.pi * (1.0 - z * np.conj(xi)) ** 4)


def kernel_series(z, xi, terms: int = 60):
    """Partial sum of ``(2/pi) sum_n (n+1)(n+2)(n+3) (z conj(xi))^n``."""
    w = np.asarray(z * np.conj(xi))
    out = np.zeros_like(w, dtype=complex)
    p = np.ones_like(out)
    for n in range(terms):
        out += (n + 1) * (n + 2) * (n + 3) * p
        p = p * w
    return 2.0 / math.pi * out


def _as_bases(bases) -> np.ndarray:
    b = np.atleast_1d(np.asarray(bases, dtype=complex))
    check_points(b)
    return b


class ThetaSeries:
    """Composed coefficients of ``sigma_i^-1 o g`` for all bases i and g in E.

    With ``q = conj(b) z + conj(a)`` each term is ``(sigma_i^-1 o g)'(z)^2 = q^-4``.
    """

    def __init__(self, E: GroupEnumeration, bases):
        self.enumeration = E
        self.bases = _as_bases(bases)
        a_parts, b_parts = [], []
        for p in self.bases:
            s_inv = translator(p).inverse()
            a, b = compose_arrays(s_inv.a, s_inv.b, E.a, E.b)
            a_parts.append(np.broadcast_to(a, E.a.shape))
            b_parts.append(np.broadcast_to(b, E.b.shape))
        self.a = np.ascontiguousarray(np.concatenate(a_parts)) if a_parts else np.zeros(0, complex)
        self.b = np.ascontiguousarray(np.concatenate(b_parts)) if b_parts else np.zeros(0, complex)
        self.shell = np.ascontiguousarray(np.tile(E.shell_mask, len(self.bases)).astype(np.uint8))

    def __len__(self):
        return len(self.a)

    def sums(self, z):
        """(Theta(z), sum |q|^-4, deepest-shell sum |q|^-4) for an array of points."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        check_points(z)
        return kernels.series_sums(self.a, self.b, self.shell, z)

    def __call__(self, z):
        return self.sums(z)[0]

    def images(self, z):
        """``(sigma_i^-1 o g)(z)`` for every term (single point)."""
        z = complex(z)
        return (self.a * z + self.b) / (np.conj(self.b) * z + np.conj(self.a))


def theta_series(E: GroupEnumeration, bases, z):
    """Truncated Poincare series and its tail heuristic (deepest-shell ``sum |term|``).

    Returns ``(value, tail)``; scalars for scalar ``z``.
    """
    theta, _, tail = ThetaSeries(E, bases).sums(z)
    if np.ndim(z) == 0:
        return complex(theta[0]), float(tail[0])
    return theta, tail


def closed_form_projection(E: GroupEnumeration, bases, r: float, z):
    """``12 tanh(r/2)^2 Theta(z)`` and the tail scaled by the same prefactor."""
    if r <= 0:
        raise ValueError("radius must be positive")
    pref = 12.0 * ball_euclidean_radius(r) ** 2
    val, tail = theta_series(E, bases, z)
    return val * pref, tail * pref


# --------------------------------------------------------------------------
# measurable forms


@dataclass(frozen=True)
class SupportBall:
    """Hyperbolic ball ``chart(B(0; radius))``; ``chart(0)`` is the center."""

    chart: DiskAutomorphism
    radius: float

    @property
    def center(self) -> complex:
        return self.chart.b / np.conj(self.chart.a)


@dataclass(frozen=True)
class MeasurableForm:
    """Bounded weight -4 data with support in finitely many disjoint balls.

    ``evaluator(xi, piece)`` evaluates the form at points ``xi`` known to lie in
    support ball ``piece``; :meth:`evaluate` locates the ball itself.
    """

    evaluator: Callable[[np.ndarray, int], np.ndarray]
    support: tuple[SupportBall, ...] = field(default=())

    @classmethod
    def zero(cls) -> "MeasurableForm":
        return cls(lambda xi, k: np.zeros(np.shape(xi), dtype=complex), ())

    def evaluate(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        check_points(xi)
        out = np.zeros(xi.shape, dtype=complex)
        for k, ball in enumerate(self.support):
            c = ball.center
            d = np.abs(xi - c) / np.abs(1.0 - np.conj(c) * xi)
            inside = d < ball_euclidean_radius(ball.radius)
            if np.any(inside):
                out[inside] = self.evaluator(xi[inside], k)
        return out


def lifted_indicator_form(E: GroupEnumeration, bases, r: float) -> MeasurableForm:
    """Lift of the indicator of ``union_i B(p_i; r)`` as unimodular weight -4 data.

    On ``g o sigma_i (B(0; r))`` the value is the product of ratios
    ``g'(g^-1 xi)/conj(g'(g^-1 xi)) * sigma_i'(u)/conj(sigma_i'(u))`` with
    ``u = (g o sigma_i)^-1 xi``. One base at 0 gives the single-ball lift; the
    pieces are disjoint when the bases are 2r-separated and r <= inj.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    bases = _as_bases(bases)
    sigmas = [translator(p) for p in bases]
    pieces, owners = [], []
    for i, s in enumerate(sigmas):
        for j in range(len(E)):
            g = E[j]
            pieces.append(SupportBall(g @ s, r))
            owners.append((j, i))

    def evaluator(xi, k):
        j, i = owners[k]
        g, s = E[j], sigmas[i]
        w = g.inverse()(xi)
        gp = g.derivative(w)
        u = pieces[k].chart.inverse()(xi)
        sp = s.derivative(u)
        return (gp / np.conj(gp)) * (sp / np.conj(sp))

    return MeasurableForm(evaluator, tuple(pieces))


def project_numeric(
    f: MeasurableForm, z, samples: int = 1_000_000, rng_seed: int = 0
) -> McEstimate | list[McEstimate]:
    """MC estimate of ``int conj(f(xi)) K(z, xi) dxdy`` over the support of f.

    A support ball is picked with probability proportional to its approximate
    Euclidean area ``pi t^2 |chart'(0)|^2``; within it ``xi = chart(eta)`` with
    ``eta`` uniform in ``B_eu(0; t)`` and the Jacobian ``|chart'(eta)|^2``
    reweights the sample. A list is returned for array-valued ``z``.
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    check_points(zs)
    scalar = np.ndim(z) == 0
    if not f.support:
        warnings.warn("measurable form has empty support; projection is zero", stacklevel=2)
        est = [McEstimate(0j, 0.0, 0, rng_seed) for _ in zs]
        return est[0] if scalar else est
    ca = np.array([s.chart.a for s in f.support])
    cb = np.array([s.chart.b for s in f.support])
    t = np.array([ball_euclidean_radius(s.radius) for s in f.support])
    area0 = math.pi * t**2 / np.abs(ca) ** 4
    w = area0 / area0.sum()
    cdf = np.cumsum(w)
    cdf[-1] = 1.0
    rng = np.random.default_rng(rng_seed)
    accs = [_Accumulator() for _ in zs]
    remaining = samples
    while remaining > 0:
        n = min(CHUNK, remaining)
        remaining -= n
        k = np.searchsorted(cdf, rng.random(n), side="right")
        eta = _uniform_disk(rng, n, 1.0) * t[k]
        q = np.conj(cb[k]) * eta + np.conj(ca[k])
        xi = (ca[k] * eta + cb[k]) / q
        jac = 1.0 / np.abs(q) ** 4
        vals = np.empty(n, dtype=complex)
        order = np.argsort(k, kind="stable")
        ks, starts = np.unique(k[order], return_index=True)
        bounds = np.append(starts, n)
        for m, piece in enumerate(ks):
            sel = order[bounds[m] : bounds[m + 1]]
            vals[sel] = f.evaluator(xi[sel], int(piece))
        weight = np.conj(vals) * jac * (math.pi * t[k] ** 2) / w[k]
        if not np.all(np.isfinite(weight)):
            raise NumericError("non-finite projection samples")
        for acc, zz in zip(accs, zs):
            acc.add(weight * 12.0 / (math.pi * (1.0 - zz * np.conj(xi)) ** 4))
    est = [acc.estimate(1.0, rng_seed, True) for acc in accs]
    return est[0] if scalar else est

