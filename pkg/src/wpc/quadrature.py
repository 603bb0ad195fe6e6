"""Monte-Carlo integration over the Dirichlet domain and over hyperbolic balls.

All estimators draw from a single ``numpy.random.Generator`` seeded by the
caller and consume it in fixed-size chunks, so results are bit-for-bit
reproducible for a given (seed, samples, chunk) triple.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .disk_geometry import DiskAutomorphism, ball_euclidean_radius, check_points, translator
from .errors import NumericError, ResourceError
from .fuchsian import GroupEnumeration, domain_radius, in_domain

DEFAULT_SAMPLES = 1_000_000
CHUNK = 1 << 16
MIN_EFFICIENCY = 1e-3


@dataclass(frozen=True)
class McEstimate:
    value: complex | float
    std_error: float
    samples: int
    seed: int

    def within(self, truth, k: float = 3.0, extra: float = 0.0) -> bool:
        """``|value - truth| <= k * std_error + extra``."""
        return abs(self.value - truth) <= k * self.std_error + extra

    @property
    def real(self) -> "McEstimate":
        return McEstimate(float(np.real(self.value)), self.std_error, self.samples, self.seed)

    def scaled(self, c: float) -> "McEstimate":
        return McEstimate(self.value * c, self.std_error * abs(c), self.samples, self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.value, complex):
            d["value"] = [self.value.real, self.value.imag]
        return d


class _Accumulator:
    """Running sum and sum of squared modulus for chunked MC means."""

    def __init__(self):
        self.n = 0
        self.s = 0j
        self.s2 = 0.0

    def add(self, x):
        self.n += len(x)
        self.s += complex(np.sum(x))
        self.s2 += float(np.sum(np.abs(x) ** 2))

    def estimate(self, scale: float, seed: int, is_complex: bool) -> McEstimate:
        if self.n == 0:
            return McEstimate(0.0, 0.0, 0, seed)
        mean = self.s / self.n
        var = max(self.s2 / self.n - abs(mean) ** 2, 0.0)
        se = math.sqrt(var / max(self.n - 1, 1)) * scale
        val = mean * scale
        return McEstimate(complex(val) if is_complex else float(val.real), se, self.n, seed)


def _check_finite(values, points):
    bad = ~np.isfinite(values)
    if np.any(bad):
        z = complex(np.asarray(points)[np.flatnonzero(bad)[0]])
        raise NumericError(f"integrand is not finite at z = {z!r}")


def _uniform_disk(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


# --------------------------------------------------------------------------
# fundamental domain


class DomainSampler:
    """Hyperbolic-area rejection sampler for the Dirichlet domain ``F``.

    Proposals are uniform on the Euclidean disk of radius ``tanh(R/2)`` where
    ``R`` bounds ``F`` (relative to truncation); a proposal is kept with
    probability ``rho(z)/rho_max`` when it passes the Dirichlet test. For the
    trivial group ``F`` is the whole disk and proposals are never rejected;
    integrals then carry the density as a weight instead.
    """

    def __init__(self, E: GroupEnumeration, min_efficiency: float = MIN_EFFICIENCY):
        self.E = E
        self.trivial = E.is_trivial
        self.min_efficiency = min_efficiency
        if self.trivial:
            self.radius = 1.0 - 1e-15
            self.rho_max = math.inf
        else:
            self.radius = float(ball_euclidean_radius(domain_radius(E)))
            self.rho_max = 4.0 / (1.0 - self.radius**2) ** 2

    @property
    def proposal_area(self) -> float:
        return math.pi * self.radius**2

    def propose(self, rng, n):
        """Return proposals and the accepted mask."""
        z = _uniform_disk(rng, n, self.radius)
        if self.trivial:
            return z, np.ones(n, dtype=bool)
        rho = 4.0 / (1.0 - np.abs(z) ** 2) ** 2
        u = rng.random(n)
        keep = u * self.rho_max < rho
        keep[keep] = in_domain(z[keep], self.E)
        return z, keep

    def sample(self, count: int, seed: int, max_proposals: int | None = None):
        """Draw ``count`` area-uniform lifts in F. Returns (points, proposals used)."""
        if self.trivial:
            raise ValueError("the trivial group has infinite area; cannot sample F uniformly")
        rng = np.random.default_rng(seed)
        if max_proposals is None:
            max_proposals = int(count / self.min_efficiency) + CHUNK
        out = []
        got = 0
        used = 0
        while got < count:
            if used >= max_proposals:
                raise ResourceError(
                    f"rejection efficiency below {self.min_efficiency:g}: "
                    f"{got} accepted from {used} proposals"
                )
            z, keep = self.propose(rng, CHUNK)
            used += CHUNK
            out.append(z[keep])
            got += int(keep.sum())
        pts = np.concatenate(out)[:count]
        return pts, used


def integrate_domain(fn, E: GroupEnumeration, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> McEstimate:
    """MC estimate of ``int_F fn(z) rho(z) |dz|^2`` from ``samples`` proposals.

    Each proposal contributes ``C * accept * fn(z)`` with ``C = pi R^2 rho_max``;
    for the trivial group it contributes ``pi fn(z) rho(z)`` (whole disk).
    """
    sampler = DomainSampler(E)
    rng = np.random.default_rng(seed)
    acc = _Accumulator()
    is_complex = False
    remaining = samples
    while remaining > 0:
        n = min(CHUNK, remaining)
        remaining -= n
        z, keep = sampler.propose(rng, n)
        x = np.zeros(n, dtype=complex)
        if np.any(keep):
            v = np.asarray(fn(z[keep]))
            v = np.broadcast_to(v, (int(keep.sum()),))
            _check_finite(v, z[keep])
            is_complex = is_complex or np.iscomplexobj(v)
            if sampler.trivial:
                v = v * (4.0 / (1.0 - np.abs(z) ** 2) ** 2)
            x[keep] = v
        acc.add(x)
    scale = math.pi if sampler.trivial else sampler.proposal_area * sampler.rho_max
    return acc.estimate(scale, seed, is_complex)


def domain_area(E: GroupEnumeration, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> McEstimate:
    """Hyperbolic area of F; equals 4 pi (g - 1) for a genus-g surface group."""
    if E.is_trivial:
        return McEstimate(math.inf, 0.0, 0, seed)
    return integrate_domain(lambda z: np.ones(len(z)), E, samples, seed)


# --------------------------------------------------------------------------
# balls


def integrate_ball(
    fn,
    center: complex,
    r: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    measure: str = "hyperbolic",
) -> McEstimate:
    """MC estimate of ``int_{B(center; r)} fn dA`` (hyperbolic or Euclidean area element).

    Samples ``eta`` uniformly in ``B_eu(0; tanh(r/2))`` and maps them by the
    translator to ``center``; the hyperbolic element is invariant, the Euclidean
    one picks up ``|sigma'(eta)|^2``.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if measure not in ("hyperbolic", "euclidean"):
        raise ValueError(f"unknown measure {measure!r}")
    check_points(center)
    t = float(ball_euclidean_radius(r))
    sigma = translator(center)
    rng = np.random.default_rng(seed)
    acc = _Accumulator()
    is_complex = False
    remaining = samples
    while remaining > 0:
        n = min(CHUNK, remaining)
        remaining -= n
        eta = _uniform_disk(rng, n, t)
        xi = sigma(eta)
        v = np.broadcast_to(np.asarray(fn(xi)), (n,))
        _check_finite(v, xi)
        is_complex = is_complex or np.iscomplexobj(v)
        if measure == "hyperbolic":
            w = 4.0 / (1.0 - np.abs(eta) ** 2) ** 2
        else:
            w = np.abs(sigma.derivative(eta)) ** 2
        acc.add(v * w)
    return acc.estimate(math.pi * t * t, seed, is_complex)


def euclidean_area_of_image(h: DiskAutomorphism, r: float, samples: int = 100_000, seed: int = 0) -> McEstimate:
    """Euclidean area of ``h(B(0; r))`` as ``int_{B(0;r)} |h'(z)|^2 |dz|^2``."""
    if r <= 0:
        raise ValueError("radius must be positive")
    t = float(ball_euclidean_radius(r))
    rng = np.random.default_rng(seed)
    acc = _Accumulator()
    remaining = samples
    while remaining > 0:
        n = min(CHUNK, remaining)
        remaining -= n
        eta = _uniform_disk(rng, n, t)
        acc.add(np.abs(h.derivative(eta)) ** 2)
    return acc.estimate(math.pi * t * t, seed, False)


# --------------------------------------------------------------------------
# Weil-Petersson norm


def wp_norm_squared(field, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> McEstimate:
    """``int_F |mu|^2 rho |dz|^2`` (whole disk for the trivial group)."""
    return integrate_domain(lambda z: np.abs(field.mu(z)) ** 2, field.enumeration, samples, seed)


def wp_norm_unfolded(field) -> tuple[float, float]:
    """Closed-form norm ``(pi/3) Re sum_i mu(p_i)`` and its tail heuristic.

    Unfolding the Poincare series over F and applying the mean-value property
    of the holomorphic integrand against the radial weight ``(1-|w|^2)^2/4``
    reduces the norm to point values at the base points.
    """
    vals, tails = field.mu_with_tail(np.asarray(field.bases))
    return float(math.pi / 3.0 * np.sum(vals).real), float(math.pi / 3.0 * np.sum(tails))
