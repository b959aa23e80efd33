"""Generalized Y-pieces: trace functions, twist-family coefficients and perpendicular arcs.

A cuff is a cone point, a cusp or a geodesic, encoded by its generalized
length. The trace ``m`` (cos or cosh of half the generalized length) lets a
single formula cover all three kinds.
"""

import logging
import math
from typing import Tuple

from pydantic import BaseModel, field_validator
from scipy.optimize import brentq

from ..common.config import settings
from ..common.errors import DomainError
from ..common.models import BoundaryKind, GeneralizedLength, LambdaLike
from .hyptrig import ArcConfiguration, quad_diagonal, stable_arccosh

logger = logging.getLogger(__name__)


def trace(lam: LambdaLike) -> float:
    """Boundary trace: cos(|λ|/2) for cones and cusps, cosh(λ/2) for geodesics."""
    value = GeneralizedLength.of(lam).value
    if value <= 0:
        return math.cos(-value / 2.0)
    return math.cosh(value / 2.0)


def sine_trace(lam: LambdaLike) -> float:
    """Companion of ``trace``: sin(|λ|/2) or sinh(λ/2), zero at a cusp."""
    value = GeneralizedLength.of(lam).value
    if value <= 0:
        return math.sin(-value / 2.0)
    return math.sinh(value / 2.0)


def from_trace(u: float) -> GeneralizedLength:
    """Map a trace back to its generalized length.

    Traces within ``TRACE_SNAP`` of 1 are read as a cusp.

    Raises:
        DomainError: If u is not a trace of any admissible boundary (u <= 0).
    """
    if not math.isfinite(u) or u <= 0:
        raise DomainError(f"{u!r} is not the trace of a cone, cusp or geodesic", {"trace": u})
    if abs(u - 1.0) <= settings.TRACE_SNAP:
        return GeneralizedLength(value=0.0)
    if u < 1.0:
        return GeneralizedLength(value=-2.0 * math.acos(u))
    return GeneralizedLength(value=2.0 * stable_arccosh(u))


class PantsSpec(BaseModel):
    """A generalized Y-piece given by its three cuffs."""
    cuffs: Tuple[GeneralizedLength, GeneralizedLength, GeneralizedLength]

    model_config = {"frozen": True}

    @classmethod
    def of(cls, l1: LambdaLike, l2: LambdaLike, l3: LambdaLike) -> "PantsSpec":
        return cls(cuffs=(GeneralizedLength.of(l1), GeneralizedLength.of(l2), GeneralizedLength.of(l3)))

    @property
    def traces(self) -> Tuple[float, float, float]:
        return tuple(trace(c) for c in self.cuffs)

    def kinds(self) -> Tuple[BoundaryKind, BoundaryKind, BoundaryKind]:
        return tuple(c.kind for c in self.cuffs)


class PantsCoefficients(BaseModel):
    """Coefficients of one half of an X-piece, attached to its target cuff.

    ``U`` and ``V`` satisfy U^2 = V^2 - m^2 + 1. For a cone target they are
    s·cosh and s·sinh of the distance from the cone point to the waist; for a
    geodesic target, s·sinh and s·cosh of the perpendicular between target and
    waist.
    """
    m: float
    s: float
    U: float
    V: float

    model_config = {"frozen": True}

    @field_validator("U", "V")
    @classmethod
    def _check_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError(f"coefficient must be positive, got {v!r}")
        return v


def coefficients(target: LambdaLike, companion: LambdaLike, waist: float) -> PantsCoefficients:
    """Twist-family coefficients of a pants with cuffs (target, companion, waist).

    Args:
        target: Cuff the family curve turns around.
        companion: The remaining cuff.
        waist: Length of the geodesic cuff the family crosses.

    Returns:
        PantsCoefficients for the target cuff.
    """
    if not math.isfinite(waist) or waist <= 0:
        raise DomainError(f"Waist length must be positive, got {waist!r}", {"waist": waist})
    m = trace(target)
    s = sine_trace(target)
    mu = trace(companion)
    sh = math.sinh(waist / 2.0)
    v = (m * math.cosh(waist / 2.0) + mu) / sh
    v_minus_m = (m * math.exp(-waist / 2.0) + mu) / sh
    u = math.sqrt(v_minus_m * (v + m) + 1.0)
    return PantsCoefficients(m=m, s=s, U=u, V=v)


def perp_between(lambda1: LambdaLike, lambda2: LambdaLike, lambda3: LambdaLike) -> float:
    """Length of the common perpendicular between geodesic cuffs 1 and 2."""
    g1, g2 = GeneralizedLength.of(lambda1), GeneralizedLength.of(lambda2)
    if g1.kind != BoundaryKind.GEODESIC or g2.kind != BoundaryKind.GEODESIC:
        raise DomainError("perp_between needs two geodesic cuffs", {"lambda1": g1.value, "lambda2": g2.value})
    x = (trace(g1) * trace(g2) + trace(lambda3)) / (sine_trace(g1) * sine_trace(g2))
    return stable_arccosh(x)


def self_perp_one(lambda1: LambdaLike, lambda2: LambdaLike, lambda3: LambdaLike) -> float:
    """Length of the simple arc from geodesic cuff 1 back to itself separating cuffs 2 and 3."""
    g1 = GeneralizedLength.of(lambda1)
    if g1.kind != BoundaryKind.GEODESIC:
        raise DomainError("self_perp_one needs a geodesic first cuff", {"lambda1": g1.value})
    m1, m2, m3 = trace(g1), trace(lambda2), trace(lambda3)
    excess = 2.0 * (m2 * m2 + 2.0 * m1 * m2 * m3 + m3 * m3) / sine_trace(g1) ** 2  # cosh h - 1
    return 2.0 * math.asinh(math.sqrt(excess / 2.0))


def self_perp_two(lambda1: LambdaLike, lambda2: LambdaLike, lambda3: LambdaLike) -> float:
    """Length of the arc from geodesic cuff 1 to itself that winds around cuffs 2 and 3.

    Solves the implicit equation for l = 1/sinh(h/2) inside the bracket
    [sinh(λ1/4)/K, sinh(λ1/4)/k], k and K being the smaller and larger of the
    traces of cuffs 2 and 3.
    """
    g1 = GeneralizedLength.of(lambda1)
    if g1.kind != BoundaryKind.GEODESIC:
        raise DomainError("self_perp_two needs a geodesic first cuff", {"lambda1": g1.value})
    m2, m3 = trace(lambda2), trace(lambda3)
    target = math.sinh(g1.value / 2.0)
    quarter = math.sinh(g1.value / 4.0)
    k, big_k = min(m2, m3), max(m2, m3)

    def residual(l: float) -> float:
        return l * m2 * math.sqrt(1.0 + (l * m3) ** 2) + l * m3 * math.sqrt(1.0 + (l * m2) ** 2) - target

    lo, hi = quarter / big_k, quarter / k
    if big_k - k <= 4.0 * math.ulp(big_k):
        l_value = quarter / k
    elif residual(lo) >= 0.0:
        l_value = lo
    elif residual(hi) <= 0.0:
        l_value = hi
    else:
        l_value = brentq(residual, lo, hi, xtol=1e-300, rtol=4.0 * 2.0 ** -52, maxiter=200)
    logger.debug(f"self_perp_two: l={l_value!r} in [{lo!r}, {hi!r}]")
    return 2.0 * math.asinh(1.0 / l_value)


def arc_with_displacement(h: float, rho_m: float, rho_n: float) -> float:
    """Length of the arc obtained by sliding the feet of a perpendicular of length h."""
    return quad_diagonal(ArcConfiguration(base=h, disp_a=rho_m, disp_b=rho_n))


def cone_distance(target: LambdaLike, companion: LambdaLike, waist: float) -> float:
    """Distance from a cone/cusp target to the waist (inf for a cusp), or perpendicular for a geodesic.

    Convenience readout of ``coefficients`` used in reports.
    """
    coeff = coefficients(target, companion, waist)
    if coeff.s == 0.0:
        return math.inf
    if GeneralizedLength.of(target).kind == BoundaryKind.CONE:
        return math.asinh(coeff.V / coeff.s)
    return math.acosh(max(1.0, coeff.V / coeff.s))

