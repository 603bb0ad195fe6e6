"""Separated sets and epsilon-nets on the quotient surface.

Nets are extracted greedily from area-uniform samples of the Dirichlet domain:
a sample is kept iff it is at surface distance >= eps from every point kept so
far. Maximality of the scan makes every sample lie within eps of a kept point,
so the covering property holds on the sample set (not necessarily on the
continuum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fuchsian import GroupEnumeration, SurfacePoint, injectivity_radius, surface_distances
from .quadrature import DomainSampler


def ball_volume(r):
    """Hyperbolic area ``2 pi (cosh r - 1)`` of a ball of radius r."""
    return 2.0 * math.pi * (np.cosh(r) - 1.0)


def count_bracket(genus: int, epsilon0: float) -> tuple[float, float]:
    """Area bounds on the size of an eps0-net of a genus-g surface with ``inj >= eps0``.

    ``(4 pi (g-1) / Vol B(eps0), 4 pi (g-1) / Vol B(eps0 / 2))``.
    """
    if genus < 2:
        raise ValueError("genus must be at least 2")
    if not epsilon0 > 0:
        raise ValueError("epsilon0 must be positive")
    area = 4.0 * math.pi * (genus - 1)
    return area / float(ball_volume(epsilon0)), area / float(ball_volume(0.5 * epsilon0))


def sample_surface(E: GroupEnumeration, count: int, rng_seed: int = 0, min_efficiency: float = 1e-3) -> list[SurfacePoint]:
    """``count`` area-uniform points of the surface, as Dirichlet-domain lifts."""
    return [SurfacePoint(complex(z)) for z in sample_surface_array(E, count, rng_seed, min_efficiency)]


def sample_surface_array(E: GroupEnumeration, count: int, rng_seed: int = 0, min_efficiency: float = 1e-3) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be at least 1")
    pts, _ = DomainSampler(E, min_efficiency).sample(count, rng_seed)
    return pts


@dataclass
class NetResult:
    points: list
    epsilon: float
    min_pairwise_distance: float
    covering_radius_on_samples: float
    count: int
    samples: int

    @property
    def separated(self) -> bool:
        return self.min_pairwise_distance >= self.epsilon

    @property
    def covering(self) -> bool:
        return self.covering_radius_on_samples <= self.epsilon

    @property
    def lifts(self) -> np.ndarray:
        return np.array([p.lift for p in self.points], dtype=complex)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "count": self.count,
            "samples": self.samples,
            "min_pairwise_distance": self.min_pairwise_distance,
            "covering_radius_on_samples": self.covering_radius_on_samples,
            "separated": self.separated,
            "covering": self.covering,
            "lifts": [[p.lift.real, p.lift.imag] for p in self.points],
        }


def _lifts(samples) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        return samples.astype(complex)
    return np.array([s.lift if isinstance(s, SurfacePoint) else complex(s) for s in samples], dtype=complex)


def greedy_net(samples, epsilon: float, E: GroupEnumeration) -> NetResult:
    """Greedy maximal eps-separated subset of ``samples`` in scan order."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    pts = _lifts(samples)
    if len(pts) == 0:
        raise ValueError("samples must be nonempty")
    kept = [pts[0]]
    for z in pts[1:]:
        d = surface_distances(z, np.array(kept), E, cutoff=epsilon)
        if d.min() >= epsilon:
            kept.append(z)
    kept = np.array(kept)
    sep = math.inf
    for i in range(len(kept) - 1):
        sep = min(sep, float(surface_distances(kept[i], kept[i + 1 :], E).min()))
    cover = 0.0
    for z in pts:
        # exact whenever below epsilon, which maximality guarantees
        cover = max(cover, float(surface_distances(z, kept, E, cutoff=epsilon).min()))
    return NetResult([SurfacePoint(complex(z)) for z in kept], float(epsilon), sep, cover, len(kept), len(pts))


def injectivity_on_samples(samples, E: GroupEnumeration) -> dict:
    """Largest and smallest injectivity radius over ``samples`` and where the largest occurs."""
    pts = _lifts(samples)
    inj = np.array([injectivity_radius(z, E) for z in pts])
    k = int(np.argmax(inj))
    return {"max": float(inj[k]), "argmax": complex(pts[k]), "min": float(inj.min()), "samples": int(len(pts))}


def diameter_estimate(samples, E: GroupEnumeration) -> float:
    """Largest surface distance from the first sample to the others (a lower bound on the diameter)."""
    pts = _lifts(samples)
    return float(surface_distances(pts[0], pts, E).max())
