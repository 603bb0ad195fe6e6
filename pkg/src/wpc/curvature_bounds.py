"""Computable bounds on the holomorphic sectional curvature of a harmonic field.

Only two sides are numerical: the lower bound ``-2 sup|mu|^2 / ||mu||^2`` and
the universal upper bound ``-1 / (2 pi (g - 1))``. Exact curvature would need
the inverse of ``(Delta - 2)`` on the surface and is not computed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import NumericError
from .quadrature import McEstimate


def tromba_wolpert_upper(genus: int) -> float:
    if genus < 2:
        raise ValueError("genus must be at least 2")
    return -1.0 / (2.0 * math.pi * (genus - 1))


def hk_lower_bound(field_, cert, norm: McEstimate) -> float:
    """``-2 sup|mu|^2 / ||mu||^2_WP``."""
    return hk_lower_with_sigma(cert.sup_mu_estimate, norm)[0]


def hk_lower_with_sigma(sup_mu: float, norm: McEstimate) -> tuple[float, float]:
    """The bound and its standard error propagated from the norm estimate."""
    v = float(norm.value.real if isinstance(norm.value, complex) else norm.value)
    if not v > 0 or not math.isfinite(v):
        raise NumericError(f"Weil-Petersson norm estimate must be positive, got {v!r}")
    hk = -2.0 * sup_mu**2 / v
    return hk, abs(hk) * norm.std_error / v


@dataclass
class CurvatureBracket:
    hk_lower: float
    hk_sigma: float
    tw_upper: float | None
    genus: int
    status: str  # PASS, FAIL or SKIPPED
    c5_ratio: float | None
    inputs: dict = field(default_factory=dict)

    @property
    def width(self) -> float | None:
        return None if self.tw_upper is None else self.tw_upper - self.hk_lower

    @property
    def passed(self) -> bool:
        return self.status != "FAIL"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["width"] = self.width
        return d


def bracket_report(field_, cert, norm: McEstimate, genus: int, k_sigma: float = 3.0) -> CurvatureBracket:
    """Assemble ``[hk_lower, -1/(2 pi (g-1))]`` and check it is nonempty within k sigma.

    Genus below 2 (the trivial-group pseudo-surface) is report-only.
    """
    hk, sig = hk_lower_with_sigma(cert.sup_mu_estimate, norm)
    inputs = {
        "sup_mu": cert.sup_mu_estimate,
        "wp_norm_squared": norm.to_dict(),
        "truncation_tail": cert.truncation_tail,
        "bases": len(field_.bases),
        "k_sigma": k_sigma,
    }
    if genus < 2:
        return CurvatureBracket(hk, sig, None, genus, "SKIPPED", None, inputs)
    tw = tromba_wolpert_upper(genus)
    status = "PASS" if hk <= tw + k_sigma * sig else "FAIL"
    return CurvatureBracket(hk, sig, tw, genus, status, abs(hk) * genus, inputs)
