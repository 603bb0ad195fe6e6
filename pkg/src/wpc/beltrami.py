"""Harmonic Beltrami differentials built from Poincare series at base points.

For bases ``p_1 = 0, p_2, ..., p_n`` the field is ``mu = Theta / rho`` where
``Theta`` is the truncated series of :class:`wpc.bergman.ThetaSeries`. Its
Ahlfors majorant is

    f(z) = 1/4 sum_i sum_g (1 - |(sigma_i^-1 o g)(z)|^2)^2  >=  |mu(z)|,

and the explicit constants ``delta``, ``C1``, ``C3``, ``C4`` bound ``sup |mu|``
from above and ``|mu(p_i)|`` from below when the bases are ``eps0``-separated
with injectivity radius at least ``eps0/2`` and ``eps0 > 2 ln(3 + 2 sqrt 2)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import mpmath
import numpy as np
from scipy.optimize import minimize

from .bergman import ThetaSeries
from .disk_geometry import LOG_3_2SQRT2, DiskAutomorphism, ball_euclidean_radius, check_points, translator
from .errors import HypothesisError
from .fuchsian import (
    GroupEnumeration,
    SurfacePoint,
    injectivity_radius,
    surface_distances,
)
from .quadrature import DomainSampler, McEstimate, euclidean_area_of_image, integrate_ball

#: Threshold ``2 ln(3 + 2 sqrt 2)`` on eps0.
EPS0_THRESHOLD = 2.0 * LOG_3_2SQRT2

#: Euclidean radius of ``B(0; ln(3 + 2 sqrt 2))``.
INNER_RADIUS = 1.0 / math.sqrt(2.0)

MAJORANT_SLACK = 1e-12
AHLFORS_TOL = 1e-12
LAPLACIAN_STEP = 1e-4
LAPLACIAN_TOL = 1e-6


def _lift(p) -> complex:
    return p.lift if isinstance(p, SurfacePoint) else complex(p)


@dataclass(frozen=True, eq=False)
class BeltramiField:
    """``mu(z) = sum_i sum_{g in E} (sigma_i^-1 o g)'(z)^2 / rho(z)``."""

    enumeration: GroupEnumeration
    bases: tuple[complex, ...]
    epsilon0: float
    separation_verified: bool = False
    separation: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        bases = tuple(complex(b) for b in self.bases)
        if not bases:
            raise ValueError("a Beltrami field needs at least one base point")
        if bases[0] != 0:
            raise ValueError("the first base point must be exactly 0")
        check_points(np.array(bases))
        object.__setattr__(self, "bases", bases)

    @classmethod
    def build(cls, E: GroupEnumeration, bases, epsilon0: float) -> "BeltramiField":
        """Construct and verify the separation hypotheses on the enumeration."""
        bases = [_lift(b) for b in bases]
        report = separation_report(E, bases, epsilon0)
        ok = report["min_pair_distance"] >= epsilon0 and report["min_injectivity"] >= epsilon0 / 2
        return cls(E, tuple(bases), epsilon0, bool(ok), report)

    @cached_property
    def series(self) -> ThetaSeries:
        return ThetaSeries(self.enumeration, self.bases)

    def evaluate(self, z):
        """(mu, f, tail) at an array of points; ``tail`` is the deepest-shell ``sum |term| / rho``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        theta, absum, shell = self.series.sums(z)
        w = (1.0 - np.abs(z) ** 2) ** 2 / 4.0
        return theta * w, absum * w, shell * w

    def mu(self, z):
        out = self.evaluate(z)[0]
        return complex(out[0]) if np.ndim(z) == 0 else out

    def mu_with_tail(self, z):
        m, _, t = self.evaluate(z)
        return m, t

    def f(self, z):
        out = self.evaluate(z)[1]
        return float(out[0]) if np.ndim(z) == 0 else out

    @property
    def genus(self) -> int:
        return self.enumeration.presentation.genus

    @property
    def word_length(self) -> int:
        return self.enumeration.max_word_length


def mu(field: BeltramiField, z):
    return field.mu(z)


def f_majorant(field: BeltramiField, z):
    return field.f(z)


def separation_report(E: GroupEnumeration, bases, epsilon0: float) -> dict:
    """Least pairwise surface distance and least injectivity radius of the bases."""
    bases = [_lift(b) for b in bases]
    inj = [injectivity_radius(b, E) for b in bases]
    dmin = math.inf
    for i in range(len(bases)):
        if i + 1 < len(bases):
            dmin = min(dmin, float(surface_distances(bases[i], bases[i + 1 :], E).min()))
    return {
        "epsilon0": epsilon0,
        "min_pair_distance": dmin,
        "min_injectivity": float(min(inj)),
        "injectivity": [float(x) for x in inj],
    }


# --------------------------------------------------------------------------
# constants


def delta(epsilon0: float) -> float:
    """Euclidean gap ``tanh(eps0/4) - 1/sqrt 2`` between B(0; eps0/2) and B_eu(0; 1/sqrt 2)."""
    if not epsilon0 > EPS0_THRESHOLD:
        raise HypothesisError(f"eps0 = {epsilon0!r} must exceed 2 ln(3 + 2 sqrt 2) = {EPS0_THRESHOLD:.6f}")
    return float(ball_euclidean_radius(epsilon0 / 2.0)) - INNER_RADIUS


def constants(epsilon0: float) -> tuple[float, float]:
    """``(C3, C4) = (1 / (16 delta^2), (tanh(eps0/4)^2 - 1/2) / 2)``."""
    d = delta(epsilon0)
    t = float(ball_euclidean_radius(epsilon0 / 2.0))
    return 1.0 / (16.0 * d * d), 0.5 * (t * t - 0.5)


def C1(r: float) -> float:
    """Mean-value constant ``(4 pi / 3 (1 - (4 e^r / (1 + e^r)^2)^3))^-1``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    s = 4.0 * math.exp(-r) / (1.0 + math.exp(-r)) ** 2
    return 1.0 / (4.0 * math.pi / 3.0 * -math.expm1(3.0 * math.log(s)))


# --------------------------------------------------------------------------
# pointwise checks


def ahlfors_residual(field: BeltramiField, points, pairs: int = 10_000, seed: int = 0, digits: int = 40) -> dict:
    """Largest relative gap between ``|term'(z)|^2 / rho(z)`` and ``(1 - |term(z)|^2)^2 / 4``.

    Random (term, point) pairs are drawn, half of them from the deepest shell.
    Deep terms have ``|a| ~ 1e3`` or more, where a double-precision pair only has
    unit determinant to ``~|a|^2 eps``; each pair is therefore normalized exactly
    and both sides are evaluated with ``digits`` significant digits.
    """
    s = field.series
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    check_points(points)
    rng = np.random.default_rng(seed)
    deep = np.flatnonzero(s.shell)
    n_deep = pairs // 2 if len(deep) else 0
    terms = np.concatenate([rng.integers(0, len(s), pairs - n_deep), deep[rng.integers(0, max(len(deep), 1), n_deep)]])
    zs = points[rng.integers(0, len(points), pairs)]
    worst = 0.0
    with mpmath.workdps(digits):
        for k, z in zip(terms, zs):
            a = mpmath.mpc(s.a[k].real, s.a[k].imag)
            b = mpmath.mpc(s.b[k].real, s.b[k].imag)
            scale = mpmath.sqrt(abs(a) ** 2 - abs(b) ** 2)
            a, b = a / scale, b / scale
            zz = mpmath.mpc(z.real, z.imag)
            q = mpmath.conj(b) * zz + mpmath.conj(a)
            lhs = (1 - abs(zz) ** 2) ** 2 / 4 / abs(q) ** 4
            w = (a * zz + b) / q
            rhs = (1 - abs(w) ** 2) ** 2 / 4
            worst = max(worst, float(abs(lhs - rhs) / rhs))
    return {"pairs": int(pairs), "max_relative": worst, "passed": bool(worst <= AHLFORS_TOL)}


def sup_f_over_balls(field: BeltramiField, samples_per_ball: int = 4096, seed: int = 0, polish: int = 4) -> dict:
    """Estimate ``sup f`` over ``union_i B(p_i; ln(3 + 2 sqrt 2))``.

    Samples are uniform in the Euclidean disk of radius ``1/sqrt 2`` about 0 and
    mapped by the translators; the best few are refined by Nelder-Mead. Returns
    the sup of f, the sup of ``|mu|`` over the same points and the locations.
    """
    rng = np.random.default_rng(seed)
    pts = []
    for p in field.bases:
        sigma = translator(p)
        r = INNER_RADIUS * np.sqrt(rng.random(samples_per_ball))
        eta = np.concatenate([[0j], r * np.exp(2j * np.pi * rng.random(samples_per_ball))])
        pts.append(sigma(eta))
    pts = np.concatenate(pts)
    m, fv, tail = field.evaluate(pts)
    best_f = int(np.argmax(fv))
    out = {
        "sup_f": float(fv[best_f]),
        "argmax_f": complex(pts[best_f]),
        "sup_mu": float(np.abs(m).max()),
        "argmax_mu": complex(pts[int(np.argmax(np.abs(m)))]),
        "tail": float(tail.max()),
        "points": int(len(pts)),
    }
    for k in np.argsort(-fv)[:polish]:
        zk, val = _polish(field, complex(pts[k]))
        if val > out["sup_f"]:
            out["sup_f"], out["argmax_f"] = val, zk
    for k in np.argsort(-np.abs(m))[:polish]:
        zk, val = _polish(field, complex(pts[k]), which="mu")
        if val > out["sup_mu"]:
            out["sup_mu"], out["argmax_mu"] = val, zk
    return out


def _inside_balls(field, z):
    for p in field.bases:
        if abs(z - p) / abs(1 - np.conj(p) * z) <= INNER_RADIUS:
            return True
    return False


def _polish(field, z0, which="f"):
    def neg(x):
        z = complex(x[0], x[1])
        if abs(z) >= 1 - 1e-9 or not _inside_balls(field, z):
            return 0.0
        m, fv, _ = field.evaluate(z)
        return -float(fv[0] if which == "f" else abs(m[0]))

    res = minimize(neg, [z0.real, z0.imag], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return complex(res.x[0], res.x[1]), -float(res.fun)


def sample_domain_points(E: GroupEnumeration, count: int, seed: int) -> np.ndarray:
    """Area-uniform points of F (Euclidean-uniform on a large disk for the trivial group)."""
    if E.is_trivial:
        rng = np.random.default_rng(seed)
        r = 0.999 * np.sqrt(rng.random(count))
        return r * np.exp(2j * np.pi * rng.random(count))
    return DomainSampler(E).sample(count, seed)[0]


def majorant_check(field: BeltramiField, points) -> dict:
    m, fv, _ = field.evaluate(points)
    gap = np.abs(m) - fv
    return {"points": int(len(m)), "max_excess": float(gap.max()), "passed": bool(np.all(gap <= MAJORANT_SLACK))}


@dataclass(frozen=True)
class MeanValueReport:
    point: complex
    r: float
    left: float
    right: McEstimate
    constant: float

    @property
    def ratio(self) -> float:
        return self.left / self.right.value if self.right.value > 0 else (0.0 if self.left == 0 else math.inf)

    @property
    def passed(self) -> bool:
        return self.left <= self.right.value + 3.0 * self.right.std_error

    def to_dict(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "r": self.r,
            "left": self.left,
            "right": self.right.to_dict(),
            "C1": self.constant,
            "ratio": self.ratio,
            "passed": self.passed,
        }


def mean_value_check(field, p, r: float, mc_samples: int = 20_000, seed: int = 0) -> MeanValueReport:
    """Compare ``|mu(p)|^2`` with ``C1(r) int_{B(p; r)} |mu|^2 dA`` (right side by MC)."""
    z = _lift(p)
    inj = injectivity_radius(z, field.enumeration)
    if r > inj + 1e-12:
        raise HypothesisError(f"r = {r!r} exceeds the injectivity estimate {inj!r} at {z!r}")
    c = C1(r)
    left = abs(complex(np.atleast_1d(field.mu(np.array([z])))[0])) ** 2
    right = integrate_ball(lambda x: np.abs(field.mu(x)) ** 2, z, r, mc_samples, seed)
    return MeanValueReport(z, r, left, right.scaled(c), c)


def laplacian_check(field: BeltramiField, points, h: float = LAPLACIAN_STEP, base: int = 0) -> dict:
    """Five-point Laplacian of ``sum_g (1 - |(sigma^-1 o g)(z)|^2)^2 / 4`` for one base.

    Only points where every retained term has ``|w| >= 1/sqrt 2 + 0.05`` are
    tested; there each term is subharmonic.
    """
    series = ThetaSeries(field.enumeration, [field.bases[base]])
    points = np.atleast_1d(np.asarray(points, dtype=complex))

    def F(z):
        _, absum, _ = series.sums(z)
        return absum * (1.0 - np.abs(z) ** 2) ** 2 / 4.0

    keep = []
    for z in points:
        w = series.images(z)
        if np.all(np.abs(w) >= INNER_RADIUS + 0.05):
            keep.append(z)
    keep = np.array(keep, dtype=complex)
    if len(keep) == 0:
        return {"points": 0, "min_laplacian": None, "passed": True}
    stencil = np.concatenate([keep, keep + h, keep - h, keep + 1j * h, keep - 1j * h])
    v = F(stencil).reshape(5, -1)
    lap = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h)
    return {"points": int(len(keep)), "min_laplacian": float(lap.min()), "passed": bool(lap.min() >= -LAPLACIAN_TOL)}


def translate_disjointness(field: BeltramiField) -> dict:
    """Check the balls ``g B(p_i; eps0/2)`` (g in E, all i) are pairwise disjoint.

    Two translates ``g1 p_i`` and ``g2 p_j`` are ``dist(p_i, g1^-1 g2 p_j)`` apart,
    so it suffices to check every base against every enumerated translate of
    every base (identity excluded for i = j); the triangle inequality prunes
    elements that are too far to matter.
    """
    E = field.enumeration
    eps0 = field.epsilon0
    worst = math.inf
    bases = np.array(field.bases)
    d0 = 2.0 * np.arctanh(np.abs(bases))
    for i, p in enumerate(bases):
        for j, q in enumerate(bases):
            idx = E.within(eps0 + d0[i] + d0[j] + 1e-9, include_identity=(i != j))
            if len(idx) == 0:
                continue
            gq = (E.a[idx] * q + E.b[idx]) / (np.conj(E.b[idx]) * q + np.conj(E.a[idx]))
            d = 2.0 * np.arctanh(np.abs(gq - p) / np.abs(1.0 - np.conj(p) * gq))
            worst = min(worst, float(d.min()))
    return {"min_center_distance": worst, "epsilon0": eps0, "passed": bool(worst >= eps0)}


def area_symmetry_check(count: int = 20, r: float = 1.0, samples: int = 100_000, seed: int = 0) -> dict:
    """Euclidean areas of ``h(B(0; r))`` and ``h^-1(B(0; r))`` for random h agree within 3 sigma."""
    rng = np.random.default_rng(seed)
    rows = []
    ok = True
    for k in range(count):
        p = 0.9 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        h = translator(p) @ DiskAutomorphism.rotation(2 * np.pi * rng.random())
        s1, s2 = rng.integers(0, 2**31, size=2)
        A1 = euclidean_area_of_image(h, r, samples, int(s1))
        A2 = euclidean_area_of_image(h.inverse(), r, samples, int(s2))
        z = abs(A1.value - A2.value) / math.hypot(A1.std_error, A2.std_error)
        ok = ok and z <= 3.0
        rows.append({"a": [h.a.real, h.a.imag], "b": [h.b.real, h.b.imag], "area": A1.value,
                     "area_inverse": A2.value, "sigma": math.hypot(A1.std_error, A2.std_error), "z": z})
    return {"count": count, "r": r, "samples": samples, "rows": rows, "passed": bool(ok)}


def mc_field(field: BeltramiField, L: int | None) -> BeltramiField:
    """The same field on a shallower enumeration, for Monte-Carlo integrals."""
    if L is None or L >= field.word_length:
        return field
    return BeltramiField(field.enumeration.truncate(L), field.bases, field.epsilon0,
                         field.separation_verified, field.separation)


# --------------------------------------------------------------------------
# certificate


@dataclass
class CertifyConfig:
    seed: int = 0
    ball_samples: int = 4096
    domain_samples: int = 10_000
    majorant_samples: int = 10_000
    ahlfors_pairs: int = 10_000
    mean_value_samples: int = 20_000
    area_samples: int = 100_000
    area_count: int = 20
    laplacian_samples: int = 20_000
    mc_word_length: int | None = None


@dataclass
class CheckResult:
    name: str
    status: str  # PASS, FAIL or SKIPPED
    values: dict

    @property
    def failed(self) -> bool:
        return self.status == "FAIL"


@dataclass
class BoundCertificate:
    epsilon0: float
    delta: float | None
    C3: float | None
    C4: float | None
    C1_r: float
    sup_mu_estimate: float
    sup_f_estimate: float
    min_base_value: float
    base_values: list
    samples: int
    truncation_tail: float
    hypothesis_satisfied: bool
    word_length: int
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def certify(field: BeltramiField, config: CertifyConfig | None = None) -> BoundCertificate:
    """Evaluate every constant and bound; assert the unconditional checks.

    The bounds ``min |mu(p_i)| >= C4 - tail`` and ``sup |mu| <= C3 + tail`` are
    asserted only when the separation hypotheses hold and eps0 exceeds the
    threshold; otherwise they are recorded as SKIPPED together with the values.
    """
    cfg = config or CertifyConfig()
    E = field.enumeration
    eps0 = field.epsilon0
    above = eps0 > EPS0_THRESHOLD
    if above:
        d = delta(eps0)
        c3, c4 = constants(eps0)
    else:
        d = c3 = c4 = None
    hyp = bool(above and field.separation_verified)
    c1 = C1(LOG_3_2SQRT2)
    seeds = [int(x) for x in np.random.SeedSequence(cfg.seed).generate_state(8)]

    bases = np.array(field.bases)
    mb, fb, tb = field.evaluate(bases)
    base_abs = np.abs(mb)
    balls = sup_f_over_balls(field, cfg.ball_samples, seeds[0])
    dom = sample_domain_points(E, cfg.domain_samples, seeds[1])
    md, fd, td = field.evaluate(dom)
    sup_mu = max(balls["sup_mu"], float(np.abs(md).max()), float(base_abs.max()))
    sup_f = max(balls["sup_f"], float(fd.max()), float(fb.max()))
    tail = float(max(tb.max(), td.max(), balls["tail"]))
    checks = []

    mj_pts = sample_domain_points(E, cfg.majorant_samples, seeds[2])
    mj = majorant_check(field, mj_pts)
    checks.append(CheckResult("majorant |mu| <= f", _status(mj["passed"]), mj))

    ah = ahlfors_residual(field, mj_pts, cfg.ahlfors_pairs, seeds[5])
    checks.append(CheckResult("ahlfors per-term identity", _status(ah["passed"]), ah))

    mp = {"sup_f_balls": balls["sup_f"], "sup_f_domain": float(fd.max()), "tail": tail}
    checks.append(CheckResult("maximum principle", _status(balls["sup_f"] >= float(fd.max()) - tail), mp))

    checks.append(
        CheckResult("sup >= min base value", _status(sup_mu >= float(base_abs.min())),
                    {"sup_mu": sup_mu, "min_base": float(base_abs.min())})
    )

    mc = mc_field(field, cfg.mc_word_length)
    mv = []
    for k, p in enumerate(field.bases):
        r = min(1.0, injectivity_radius(p, mc.enumeration))
        mv.append(mean_value_check(mc, p, r, cfg.mean_value_samples, seeds[7] + k))
    checks.append(CheckResult("mean-value inequality", _status(all(m.passed for m in mv)),
                              {"word_length": mc.word_length, "reports": [m.to_dict() for m in mv]}))

    lap_pts = sample_domain_points(E, cfg.laplacian_samples, seeds[3])
    lap_pts = lap_pts[np.abs(lap_pts) >= INNER_RADIUS + 0.05]
    lp = laplacian_check(field, lap_pts)
    checks.append(CheckResult("laplacian sign", _status(lp["passed"]), lp))

    ar = area_symmetry_check(cfg.area_count, 1.0, cfg.area_samples, seeds[4])
    checks.append(CheckResult("area symmetry", _status(ar["passed"]), ar))

    if field.separation_verified and not E.is_trivial:
        td_ = translate_disjointness(field)
        checks.append(CheckResult("translate disjointness", _status(td_["passed"]), td_))
    else:
        checks.append(CheckResult("translate disjointness", "SKIPPED", {"separation": field.separation}))

    lower = {"min_base": float(base_abs.min()), "C4": c4, "tail": tail}
    upper = {"sup_mu": sup_mu, "sup_f": sup_f, "C3": c3, "tail": tail}
    if hyp:
        checks.append(CheckResult("lower bound min|mu(p_i)| >= C4", _status(lower["min_base"] >= c4 - tail), lower))
        checks.append(CheckResult("upper bound sup|mu| <= C3", _status(sup_mu <= c3 + tail), upper))
    else:
        checks.append(CheckResult("lower bound min|mu(p_i)| >= C4", "SKIPPED", lower))
        checks.append(CheckResult("upper bound sup|mu| <= C3", "SKIPPED", upper))

    return BoundCertificate(
        epsilon0=eps0,
        delta=d,
        C3=c3,
        C4=c4,
        C1_r=c1,
        sup_mu_estimate=sup_mu,
        sup_f_estimate=sup_f,
        min_base_value=float(base_abs.min()),
        base_values=[[complex(v).real, complex(v).imag] for v in mb],
        samples=int(balls["points"] + len(dom)),
        truncation_tail=tail,
        hypothesis_satisfied=hyp,
        word_length=E.max_word_length,
        seed=cfg.seed,
        checks=checks,
    )
