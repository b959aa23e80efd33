"""Elementary identities for right-angled hyperbolic polygons.

Every function is a pure scalar kernel. Arguments of arccos/arccosh that
fall outside the closed domain by no more than ``CLAMP_TOLERANCE`` are
clamped onto it; anything further out is a DegenerateConfiguration.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..common.config import settings
from ..common.errors import DegenerateConfiguration, DomainError

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
_ASYMPTOTIC_ARCCOSH = 2.0 ** 28
_LOG_DOMAIN_SWITCH = 20.0


def _finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"{name}: non-finite input {v!r}", {"value": repr(v)})


def _positive(name: str, **values: float) -> None:
    for label, v in values.items():
        _finite(name, v)
        if v <= 0:
            raise DomainError(f"{name}: {label} must be positive, got {v!r}", {label: v})


def _angle(name: str, upper: float = math.pi, **values: float) -> None:
    for label, v in values.items():
        _finite(name, v)
        if not 0 < v < upper:
            raise DomainError(f"{name}: {label} must lie in (0, {upper:.6g}), got {v!r}", {label: v})


def guarded_arccos(x: float, what: str) -> float:
    """arccos with the clamp rule applied at both ends of [-1, 1]."""
    tol = settings.CLAMP_TOLERANCE
    if not -1.0 - tol <= x <= 1.0 + tol:
        raise DegenerateConfiguration(f"{what}: cosine {x!r} outside [-1, 1]", {"argument": x})
    return math.acos(min(1.0, max(-1.0, x)))


def guarded_arccosh(x: float, what: str) -> float:
    """arccosh with the clamp rule applied at 1."""
    if x < 1.0 - settings.CLAMP_TOLERANCE:
        raise DegenerateConfiguration(f"{what}: hyperbolic cosine {x!r} below 1", {"argument": x})
    return stable_arccosh(x)


def stable_arccosh(x: float) -> float:
    """Inverse hyperbolic cosine accurate over the whole of [1, inf).

    Args:
        x: Argument, at least ``1 - CLAMP_TOLERANCE``.

    Returns:
        arccosh(x), with values just below 1 read as 0.

    Raises:
        DomainError: If x is non-finite or too far below 1.
    """
    _finite("stable_arccosh", x)
    if x < 1.0:
        if x < 1.0 - settings.CLAMP_TOLERANCE:
            raise DomainError(f"stable_arccosh: argument {x!r} < 1", {"argument": x})
        return 0.0
    if x > _ASYMPTOTIC_ARCCOSH:
        return math.log(x) + LN2
    return math.acosh(x)


def log_cosh(x: float) -> float:
    """log(cosh x) without overflow."""
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - LN2


def log_add(a: float, b: float) -> float:
    """log(e^a + e^b)."""
    return float(np.logaddexp(a, b))


def arccosh_from_log(y: float) -> float:
    """arccosh(z) given y = log z, for z that may not fit in a double."""
    if y < 0.0:
        return stable_arccosh(math.exp(y))
    if y > _LOG_DOMAIN_SWITCH:
        return y + math.log1p(math.sqrt(-math.expm1(-2.0 * y)))
    return stable_arccosh(math.exp(y))


@dataclass(frozen=True)
class ArcConfiguration:
    """Common perpendicular of length ``base`` with signed offsets at each foot."""
    base: float
    disp_a: float = 0.0
    disp_b: float = 0.0

    def __post_init__(self):
        _positive("ArcConfiguration", base=self.base)
        _finite("ArcConfiguration", self.disp_a, self.disp_b)


class SelfPentagonReading(str, Enum):
    """How the leading coefficient of the self-intersecting pentagon identity is read."""
    SIN_ALPHA = "sin_alpha"      # alpha is an angle, coefficient sin(alpha)
    SINH_ALPHA = "sinh_alpha"    # alpha is a side length, coefficient sinh(alpha)


def trirectangle_angle(a: float, b: float) -> float:
    """Acute angle of the tri-rectangle whose sides at the opposite vertex are a and b."""
    _positive("trirectangle_angle", a=a, b=b)
    product = math.sinh(a) * math.sinh(b)
    if product >= 1.0 + settings.CLAMP_TOLERANCE:
        raise DegenerateConfiguration(
            f"No tri-rectangle with sinh(a)sinh(b) = {product!r} >= 1", {"a": a, "b": b}
        )
    return guarded_arccos(product, "trirectangle_angle")


def pentagon_opposite(alpha: float, beta: float, theta: float) -> float:
    """Side opposite the non-right angle theta of a pentagon with four right angles.

    Args:
        alpha: Side adjacent to theta.
        beta: Other side adjacent to theta.
        theta: The non-right angle, in (0, pi).

    Returns:
        Length of the side opposite theta.

    Raises:
        DegenerateConfiguration: If no such pentagon exists.
    """
    _positive("pentagon_opposite", alpha=alpha, beta=beta)
    _angle("pentagon_opposite", theta=theta)
    rhs = -math.cosh(alpha) * math.cosh(beta) * math.cos(theta) + math.sinh(alpha) * math.sinh(beta)
    return guarded_arccosh(rhs, "pentagon_opposite")


def pentagon_angle(a: float, b: float, c: float) -> float:
    """Non-right angle of a pentagon from the side c opposite it and the sides a, b adjacent to c."""
    _positive("pentagon_angle", a=a, b=b, c=c)
    rhs = math.sinh(a) * math.sinh(b) * math.cosh(c) - math.cosh(a) * math.cosh(b)
    if abs(rhs) >= 1.0 + settings.CLAMP_TOLERANCE:
        raise DegenerateConfiguration(f"pentagon_angle: cosine {rhs!r} outside (-1, 1)", {"a": a, "b": b, "c": c})
    return guarded_arccos(rhs, "pentagon_angle")


def hexagon_side(a: float, b: float, gamma: float) -> float:
    """Side of a right-angled hexagon opposite gamma, with a and b the other alternate sides."""
    _positive("hexagon_side", a=a, b=b, gamma=gamma)
    rhs = math.sinh(a) * math.sinh(b) * math.cosh(gamma) - math.cosh(a) * math.cosh(b)
    return guarded_arccosh(rhs, "hexagon_side")


def quad_diagonal(cfg: ArcConfiguration) -> float:
    """Distance between the displaced endpoints of a common perpendicular."""
    c, r1, r2 = cfg.base, cfg.disp_a, cfg.disp_b
    # cosh(r1 - r2) + cosh r1 cosh r2 (cosh c - 1), free of cancellation when c is small
    x = math.cosh(r1 - r2) + math.cosh(r1) * math.cosh(r2) * 2.0 * math.sinh(c / 2.0) ** 2
    return guarded_arccosh(x, "quad_diagonal")


def quad_angle(beta: float, c: float, rho2: float) -> float:
    """Angle at the first displaced endpoint of a two-right-angle quadrilateral (same-side offsets)."""
    _angle("quad_angle", beta=beta)
    _positive("quad_angle", c=c)
    _finite("quad_angle", rho2)
    rhs = -math.cos(beta) * math.cosh(c) + math.sin(beta) * math.sinh(c) * math.sinh(abs(rho2))
    if abs(rhs) >= 1.0 + settings.CLAMP_TOLERANCE:
        raise DegenerateConfiguration(f"quad_angle: cosine {rhs!r} outside (-1, 1)", {"beta": beta, "c": c})
    return guarded_arccos(rhs, "quad_angle")


def quad_base(alpha: float, beta: float, d: float) -> float:
    """Common-perpendicular length from the two top angles and the top side."""
    _angle("quad_base", alpha=alpha, beta=beta)
    _positive("quad_base", d=d)
    rhs = -math.cos(alpha) * math.cos(beta) + math.sin(alpha) * math.sin(beta) * math.cosh(d)
    return guarded_arccosh(rhs, "quad_base")


def pentagon4_side(alpha: float, a: float, bprime: float) -> float:
    """Side b of a convex pentagon with four right angles and one angle alpha."""
    _angle("pentagon4_side", alpha=alpha)
    _positive("pentagon4_side", a=a, bprime=bprime)
    rhs = math.sin(alpha) * math.sinh(a) * math.sinh(bprime) - math.cos(alpha) * math.cosh(a)
    return guarded_arccosh(rhs, "pentagon4_side")


def selfpentagon_side(
    alpha: float,
    a: float,
    b: float,
    cprime: float,
    reading: SelfPentagonReading = SelfPentagonReading.SIN_ALPHA,
) -> float:
    """Side c of a self-intersecting pentagon with four right angles.

    The printed identity leaves open whether alpha enters through sin or
    sinh; ``reading`` selects it and defaults to the sine reading.
    """
    if reading == SelfPentagonReading.SIN_ALPHA:
        _angle("selfpentagon_side", alpha=alpha)
        lead = math.sin(alpha)
    else:
        _positive("selfpentagon_side", alpha=alpha)
        lead = math.sinh(alpha)
    _positive("selfpentagon_side", a=a, cprime=cprime)
    _finite("selfpentagon_side", b)
    if b < 0:
        raise DomainError(f"selfpentagon_side: b must be non-negative, got {b!r}", {"b": b})
    return math.asinh(lead * math.cosh(b) * math.cosh(cprime) + math.cosh(a) * math.sinh(b))
