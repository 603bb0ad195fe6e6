"""Cocompact surface groups acting on the disk.

A :class:`GroupPresentation` holds the free generators and the surface
relator. :func:`enumerate_group` builds all elements up to a word length by
breadth-first search, removing duplicates numerically (up to sign). The
Dirichlet domain ``F`` centered at 0, surface distances and injectivity
radii are all evaluated *relative to the truncated enumeration*.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .disk_geometry import DiskAutomorphism, check_points, compose_arrays, distance_from_origin
from .errors import ConstructionError, ResourceError, TruncationError

DEFAULT_MAX_ELEMENTS = 10_000_000
DEFAULT_DEDUP_TOL = 1e-9
DEFAULT_RELATOR_TOL = 1e-9


@dataclass(frozen=True)
class GroupPresentation:
    """Generators ``g_1..g_m`` (m = 2 genus) and a relator in signed 1-based indices.

    ``genus == 0`` with no generators is accepted as the trivial group; it is
    a pseudo-surface (the whole disk) used for closed-form checks.
    """

    genus: int
    generators: tuple[DiskAutomorphism, ...]
    relator: tuple[int, ...]
    tolerance: float = DEFAULT_RELATOR_TOL
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relator", tuple(int(x) for x in self.relator))
        if self.is_trivial:
            if self.relator:
                raise ConstructionError("trivial group cannot carry a relator")
            return
        if self.genus < 2:
            raise ConstructionError(f"genus must be >= 2, got {self.genus}")
        if len(self.generators) != 2 * self.genus:
            raise ConstructionError(
                f"expected {2 * self.genus} generators for genus {self.genus}, got {len(self.generators)}"
            )
        for k, g in enumerate(self.generators):
            if abs(g.det - 1.0) > 1e-9:
                raise ConstructionError(f"generator {k + 1} does not have unit determinant")
            if abs(g.trace) <= 2.0:
                raise ConstructionError(f"generator {k + 1} is not hyperbolic (|trace| = {abs(g.trace):.6g})")
        m = len(self.generators)
        if not self.relator or any(x == 0 or abs(x) > m for x in self.relator):
            raise ConstructionError("relator must be a nonempty list of signed indices in 1..2g")
        res = self.relator_residual()
        if not res < self.tolerance:
            raise ConstructionError(f"relator residual {res:.3e} exceeds tolerance {self.tolerance:.1e}")

    @classmethod
    def trivial(cls) -> "GroupPresentation":
        return cls(0, (), (), name="trivial")

    @property
    def is_trivial(self) -> bool:
        return self.genus == 0 and not self.generators

    @property
    def alphabet(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(a, b, inverse_letter) for letters ``g_1..g_m, g_1^-1..g_m^-1``."""
        m = len(self.generators)
        gens = list(self.generators) + [g.inverse() for g in self.generators]
        a = np.array([g.a for g in gens], dtype=complex)
        b = np.array([g.b for g in gens], dtype=complex)
        inv = (np.arange(2 * m) + m) % (2 * m) if m else np.zeros(0, dtype=int)
        return a, b, inv

    def letter(self, signed: int) -> DiskAutomorphism:
        g = self.generators[abs(signed) - 1]
        return g if signed > 0 else g.inverse()

    def word(self, word) -> DiskAutomorphism:
        out = DiskAutomorphism.identity()
        for x in word:
            out = out @ self.letter(x)
        return out

    def relator_residual(self) -> float:
        """``min(||R - I||, ||R + I||)`` (max-abs entry) for the relator product R."""
        m = self.word(self.relator).matrix
        eye = np.eye(2)
        return float(min(np.abs(m - eye).max(), np.abs(m + eye).max()))

    def conjugate(self, h: DiskAutomorphism) -> "GroupPresentation":
        """Presentation of ``h^-1 G h``."""
        hi = h.inverse()
        gens = tuple(hi @ g @ h for g in self.generators)
        return GroupPresentation(self.genus, gens, self.relator, self.tolerance, self.name)


def build_octagon_group() -> GroupPresentation:
    """Genus-2 group of the regular octagon with interior angles pi/4 (Bolza surface).

    ``g_k = R_{k pi/4} o tau o R_{k pi/4}^-1`` for k = 0..3, where tau translates
    along the real axis by ``2 arccosh(1 + sqrt 2)``; ``g_{k+4} = g_k^-1``.
    """
    length = 2.0 * math.acosh(1.0 + math.sqrt(2.0))
    tau = DiskAutomorphism.axial_translation(length)
    gens = []
    for k in range(4):
        rot = DiskAutomorphism.rotation(k * math.pi / 4)
        gens.append(rot @ tau @ rot.inverse())
    return GroupPresentation(2, tuple(gens), (1, -2, 3, -4, -1, 2, -3, 4), name="bolza-octagon")


# --------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True, eq=False)
class GroupEnumeration:
    """Distinct elements of word length <= ``max_word_length``, identity first.

    Elements are stored as parallel arrays ``a``, ``b`` sorted by word length.
    """

    presentation: GroupPresentation
    max_word_length: int
    dedup_tolerance: float
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    word_length: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.a)

    def __getitem__(self, i) -> DiskAutomorphism:
        return DiskAutomorphism(complex(self.a[i]), complex(self.b[i]))

    @property
    def elements(self) -> list[DiskAutomorphism]:
        return [self[i] for i in range(len(self))]

    @cached_property
    def shell_counts(self) -> list[int]:
        return np.bincount(self.word_length, minlength=self.max_word_length + 1).tolist()

    @property
    def shell_mask(self) -> np.ndarray:
        """True for elements in the deepest shell (word length == max_word_length).

        Empty for the trivial group, whose enumeration is already complete.
        """
        if self.presentation.is_trivial:
            return np.zeros(len(self), dtype=bool)
        return self.word_length == self.max_word_length

    @cached_property
    def displacement(self) -> np.ndarray:
        """``dist(0, g(0)) = 2 arcsinh |b|``."""
        return 2.0 * np.arcsinh(np.abs(self.b))

    @cached_property
    def _by_displacement(self):
        order = np.argsort(self.displacement, kind="stable")
        return order, self.displacement[order]

    def within(self, radius: float, include_identity: bool = False) -> np.ndarray:
        """Indices of elements with displacement <= radius, ordered by displacement."""
        order, disp = self._by_displacement
        idx = order[: np.searchsorted(disp, radius, side="right")]
        if not include_identity:
            idx = idx[idx != 0]
        return idx

    @property
    def is_trivial(self) -> bool:
        return len(self) == 1

    def truncate(self, L: int) -> "GroupEnumeration":
        """The enumeration at a smaller word length (a prefix of this one)."""
        if L > self.max_word_length:
            raise ValueError("cannot extend an enumeration by truncating it")
        n = int(np.searchsorted(self.word_length, L, side="right"))
        return GroupEnumeration(
            self.presentation, L, self.dedup_tolerance, self.a[:n], self.b[:n], self.word_length[:n]
        )


def _features(a, b):
    """Sign-normalized unit vector of (a, b) in R^4 plus log of its norm."""
    x = np.stack([a.real, a.imag, b.real, b.imag], axis=1)
    norm = np.linalg.norm(x, axis=1)
    x /= norm[:, None]
    pivot = np.argmax(np.abs(x) > 0.1, axis=1)
    sign = np.sign(x[np.arange(len(x)), pivot])
    x *= sign[:, None]
    return np.concatenate([x, np.log(norm)[:, None]], axis=1)


def _within_level_duplicates(tree, feats, tol):
    """Mark every point that has a lower-index neighbor within ``tol``."""
    dist, _ = tree.query(feats, k=2, distance_upper_bound=tol)
    dup = np.zeros(len(feats), dtype=bool)
    # clusters are rare; resolve them exactly
    for i in np.flatnonzero(np.isfinite(dist[:, 1])):
        dup[i] = min(tree.query_ball_point(feats[i], tol)) < i
    return dup


def enumerate_group(
    presentation: GroupPresentation,
    L: int,
    tol: float = DEFAULT_DEDUP_TOL,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> GroupEnumeration:
    """Breadth-first enumeration of freely reduced words up to length ``L``.

    Two elements are identified when their matrices agree up to sign within
    ``tol`` relative to the matrix norm.
    """
    if L < 0:
        raise ValueError("word length must be nonnegative")
    A, B, inv = presentation.alphabet
    nletters = len(A)
    levels_a = [np.array([1.0 + 0j])]
    levels_b = [np.array([0j])]
    lengths = [np.zeros(1, dtype=np.int64)]
    last = np.array([-1])
    total = 1
    recent = [(cKDTree(_features(levels_a[0], levels_b[0])))]
    for k in range(1, L + 1):
        if nletters == 0 or len(last) == 0:
            break
        ca = levels_a[-1]
        cb = levels_b[-1]
        letter = np.tile(np.arange(nletters), len(ca))
        parent_last = np.repeat(last, nletters)
        keep = (parent_last < 0) | (letter != inv[np.maximum(parent_last, 0)])
        pa = np.repeat(ca, nletters)[keep]
        pb = np.repeat(cb, nletters)[keep]
        letter = letter[keep]
        na, nb = compose_arrays(pa, pb, A[letter], B[letter])
        feats = _features(na, nb)
        tree = cKDTree(feats, balanced_tree=False, compact_nodes=False)
        dup = _within_level_duplicates(tree, feats, tol)
        for old in recent:
            dist, _ = old.query(feats, distance_upper_bound=tol)
            dup |= np.isfinite(dist)
        na, nb, letter = na[~dup], nb[~dup], letter[~dup]
        if total + len(na) > max_elements:
            raise ResourceError(
                f"enumeration at word length {k} would hold {total + len(na)} elements "
                f"(cap {max_elements})"
            )
        total += len(na)
        levels_a.append(na)
        levels_b.append(nb)
        lengths.append(np.full(len(na), k, dtype=np.int64))
        last = letter
        recent = [recent[-1], cKDTree(feats[~dup], balanced_tree=False, compact_nodes=False)]
    return GroupEnumeration(
        presentation,
        L,
        tol,
        np.concatenate(levels_a),
        np.concatenate(levels_b),
        np.concatenate(lengths),
    )


# --------------------------------------------------------------------------
# Dirichlet domain and surface metric


@dataclass(frozen=True)
class SurfacePoint:
    """A point of the quotient surface, represented by its lift in ``F``."""

    lift: complex

    def __post_init__(self):
        check_points(self.lift)
        object.__setattr__(self, "lift", complex(self.lift))


def _gamma_images(E: GroupEnumeration, idx, z):
    a, b = E.a[idx], E.b[idx]
    return (a * z + b) / (np.conj(b) * z + np.conj(a))


def in_domain(z, E: GroupEnumeration, slack: float = 1e-10) -> np.ndarray:
    """Dirichlet test: ``dist(0, z) <= dist(0, g z) + slack`` for every enumerated g."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    check_points(z)
    if E.is_trivial or len(z) == 0:
        return np.ones(len(z), dtype=bool)
    d = distance_from_origin(z)
    idx = E.within(2.0 * d.max() + slack)
    if len(idx) == 0:
        return np.ones(len(z), dtype=bool)
    minval, _ = kernels.image_min(E.a[idx], E.b[idx], z)
    dmin = 2.0 * np.arctanh(np.sqrt(np.minimum(minval, 1.0 - 1e-16)))
    return d <= dmin + slack


def reduce_points(z, E: GroupEnumeration, max_iter: int = 500) -> np.ndarray:
    """Vectorized :func:`reduce_to_domain` returning lifts as a complex array."""
    z = np.array(np.atleast_1d(z), dtype=complex)
    check_points(z)
    if E.is_trivial:
        return z
    active = np.arange(len(z))
    for _ in range(max_iter):
        if len(active) == 0:
            return z
        za = z[active]
        d = distance_from_origin(za)
        idx = E.within(2.0 * d.max())
        if len(idx) == 0:
            return z
        minval, arg = kernels.image_min(E.a[idx], E.b[idx], za)
        cur = np.abs(za) ** 2
        better = minval < cur * (1.0 - 1e-13) - 1e-300
        if not np.any(better):
            return z
        sel = active[better]
        g = idx[arg[better]]
        z[sel] = _gamma_images(E, g, z[sel])
        active = sel
    raise TruncationError(f"reduction to the Dirichlet domain did not converge in {max_iter} steps")


def reduce_to_domain(z, E: GroupEnumeration, max_iter: int = 500) -> SurfacePoint:
    """Move ``z`` into F by repeatedly applying the element that most decreases ``dist(0, z)``."""
    return SurfacePoint(complex(reduce_points(z, E, max_iter)[0]))


def _lift(p):
    return p.lift if isinstance(p, SurfacePoint) else complex(p)


def surface_distances(p, qs, E: GroupEnumeration, cutoff: float | None = None) -> np.ndarray:
    """``min_g dist(p, g q)`` for each q; exact relative to the enumeration.

    Elements with ``disp(g) > bound + |p| + |q|`` (hyperbolic norms) cannot bring
    ``dist(p, g q)`` below ``bound`` by the triangle inequality and are skipped.
    The bound is the identity term, or ``cutoff`` when smaller; with a cutoff the
    result is exact wherever it is below the cutoff and otherwise only known to
    be at least the cutoff.
    """
    p = _lift(p)
    if isinstance(qs, np.ndarray):
        qs = np.atleast_1d(qs.astype(complex))
    else:
        qs = np.array([_lift(q) for q in np.atleast_1d(np.asarray(qs, dtype=object))], dtype=complex)
    check_points(qs)
    dp = float(distance_from_origin(p))
    dq = distance_from_origin(qs)
    best = _dist(p, qs)
    if E.is_trivial or len(qs) == 0:
        return best
    bound = best if cutoff is None else np.minimum(best, cutoff)
    idx = E.within(float(np.max(bound + dp + dq)))
    if len(idx) == 0:
        return best
    a, b = E.a[idx][None, :], E.b[idx][None, :]
    step = max(1, (1 << 22) // len(idx))
    for s in range(0, len(qs), step):
        q = qs[s : s + step, None]
        gq = (a * q + b) / (np.conj(b) * q + np.conj(a))
        best[s : s + step] = np.minimum(best[s : s + step], _dist(p, gq).min(axis=1))
    return best


def _dist(z, w):
    num = np.abs(w - z)
    den = np.abs(1.0 - np.conj(z) * w)
    return 2.0 * np.arctanh(np.minimum(num / den, 1.0 - 1e-16))


def surface_distance(p, q, E: GroupEnumeration) -> float:
    return float(surface_distances(p, [q], E)[0])


def injectivity_radius(p, E: GroupEnumeration) -> float:
    """Half the least displacement ``dist(p, g p)`` over enumerated ``g != e``."""
    if E.is_trivial:
        return math.inf
    z = _lift(p)
    dp = float(distance_from_origin(z))
    order, _ = E._by_displacement
    first = order[1:65]
    best = float(_dist(z, _gamma_images(E, first, z)).min())
    idx = E.within(best + 2.0 * dp)
    if len(idx):
        best = min(best, float(_dist(z, _gamma_images(E, idx, z)).min()))
    return 0.5 * best


def injectivity_radii(points, E: GroupEnumeration) -> np.ndarray:
    return np.array([injectivity_radius(p, E) for p in points])


def systole_estimate(E: GroupEnumeration) -> float:
    """``min 2 arccosh(|tr g| / 2)`` over enumerated hyperbolic ``g != e``."""
    half_trace = np.abs(E.a[1:].real)
    hyp = half_trace > 1.0
    if not np.any(hyp):
        return math.inf
    return float(2.0 * np.arccosh(half_trace[hyp].min()))


def systole_roundoff(E: GroupEnumeration, rel: float = 1e-6) -> float:
    """Rounding floor of :func:`systole_estimate`.

    Conjugates of the shortest element share its trace, but deep ones are only
    accurate to ``~|a|^2 eps``; the bound uses the largest ``|a|`` among the
    elements whose half-trace is within ``rel`` of the minimum.
    """
    half_trace = np.abs(E.a[1:].real)
    hyp = half_trace > 1.0
    if not np.any(hyp):
        return 0.0
    x = half_trace[hyp]
    m = x.min()
    near = x <= m * (1.0 + rel)
    a2 = float(np.max(np.abs(E.a[1:][hyp][near]) ** 2))
    return 4.0 * np.finfo(float).eps * a2 / math.sqrt(m * m - 1.0)


def domain_radius(E: GroupEnumeration, directions: int = 720, margin: float = 0.02) -> float:
    """Hyperbolic radius of a disk about 0 containing F (relative to truncation).

    The boundary radius is bisected along ``directions`` rays; its maximum is
    padded by ``margin`` to cover vertices falling between rays.
    """
    if E.is_trivial:
        return math.inf
    theta = np.linspace(0.0, 2 * np.pi, directions, endpoint=False)
    u = np.exp(1j * theta)
    lo = np.zeros(directions)
    hi = np.full(directions, 16.0)
    if np.any(in_domain(np.tanh(hi / 2) * u, E, slack=0.0)):
        raise TruncationError("enumeration too shallow: Dirichlet domain appears unbounded")
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        inside = in_domain(np.tanh(mid / 2) * u, E, slack=0.0)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return float(hi.max() * (1.0 + margin))


# --------------------------------------------------------------------------
# configuration files


@dataclass(frozen=True)
class SurfaceConfig:
    presentation: GroupPresentation
    max_word_length: int = 6
    dedup_tolerance: float = DEFAULT_DEDUP_TOL
    max_elements: int = DEFAULT_MAX_ELEMENTS

    def enumerate(self, L: int | None = None) -> GroupEnumeration:
        return enumerate_group(
            self.presentation,
            self.max_word_length if L is None else L,
            self.dedup_tolerance,
            self.max_elements,
        )


def _parse_complex(pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ConstructionError(f"complex entry must be [re, im], got {pair!r}")
    re, im = pair
    if isinstance(re, bool) or isinstance(im, bool) or not all(isinstance(v, (int, float)) for v in (re, im)):
        raise ConstructionError(f"complex entry must hold two numbers, got {pair!r}")
    return complex(re, im)


def presentation_from_dict(data: dict) -> SurfaceConfig:
    try:
        genus = int(data["genus"])
        raw = data["generators"]
        relator = data.get("relator", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConstructionError(f"malformed surface config: {exc}") from exc
    gens = []
    for k, rows in enumerate(raw):
        try:
            m = np.array([[_parse_complex(x) for x in row] for row in rows])
            gens.append(DiskAutomorphism.from_matrix(m))
        except (ValueError, TypeError) as exc:
            raise ConstructionError(f"generator {k + 1}: {exc}") from exc
    pres = GroupPresentation(
        genus,
        tuple(gens),
        tuple(relator),
        float(data.get("relator_tolerance", DEFAULT_RELATOR_TOL)),
        str(data.get("name", "")),
    )
    return SurfaceConfig(
        pres,
        int(data.get("max_word_length", 6)),
        float(data.get("dedup_tolerance", DEFAULT_DEDUP_TOL)),
        int(data.get("max_elements", DEFAULT_MAX_ELEMENTS)),
    )


def load_config(path) -> SurfaceConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConstructionError(f"{path}: invalid JSON ({exc})") from exc
    return presentation_from_dict(data)


def config_to_dict(cfg: SurfaceConfig) -> dict:
    def enc(z):
        return [float(z.real), float(z.imag)]

    p = cfg.presentation
    return {
        "name": p.name,
        "genus": p.genus,
        "generators": [[[enc(x) for x in row] for row in g.matrix] for g in p.generators],
        "relator": list(p.relator),
        "max_word_length": cfg.max_word_length,
        "dedup_tolerance": cfg.dedup_tolerance,
        "relator_tolerance": p.tolerance,
        "max_elements": cfg.max_elements,
    }


def octagon_config_path() -> Path:
    return Path(__file__).with_name("data") / "octagon.json"
