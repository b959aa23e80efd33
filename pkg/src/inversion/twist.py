"""Twist recovery from three consecutive members of a twist family.

Both the X-piece and the torus families have the shape
cosh(l_n/2) = A cosh((t + n) s) + B with step s = ℓ (X-piece) or ℓ/2
(torus). Successive differences give

    (c2 - c1) / (c1 - c0) = sinh(u + s) / sinh(u),   u = t s + s/2,

so coth u = (R - cosh s) / sinh s and t follows in closed form. The
closed form is evaluated as u = log((R - e^-s) / (R - e^s)) / 2, which
has no cancellation when R is large.
"""

import logging
import math
from typing import Mapping, Tuple

from scipy.optimize import brentq

from ..common.config import settings
from ..common.errors import DegenerateInput, InconsistentSpectrum, MissingCurves
from ..common.models import GeneralizedLength
from ..geometry.pants import from_trace

logger = logging.getLogger(__name__)

_EPS = 2.0 ** -52
# tanh(18) is the largest tanh value below 1 that the fallback can resolve
_FALLBACK_EDGE = 18.0
# e^step overflows beyond this
_LOG_FORM_LIMIT = 700.0


def _half_cosh(lengths: Tuple[float, float, float]) -> Tuple[float, float, float]:
    for value in lengths:
        if not math.isfinite(value) or value <= 0:
            raise InconsistentSpectrum(f"Family lengths must be positive and finite, got {lengths!r}")
    return tuple(math.cosh(value / 2.0) for value in lengths)


def _solve_shift(l0: float, l1: float, l2: float, step: float) -> float:
    """Solve for u = t·step + step/2 and return t."""
    if not math.isfinite(step) or step <= 0:
        raise InconsistentSpectrum(f"Waist length must be positive, got {step!r}")
    c0, c1, c2 = _half_cosh((l0, l1, l2))
    d1 = c1 - c0
    d2 = c2 - c1
    if abs(d1) <= 4.0 * _EPS * max(c0, c1, c2):
        raise DegenerateInput(
            "First two family lengths coincide; the twist sits at a half-integer", {"l0": l0, "l1": l1}
        )
    ratio = d2 / d1
    y = (ratio - math.cosh(step)) / math.sinh(step)
    band = settings.BISECTION_BAND
    if abs(y) < 1.0 - band:
        raise InconsistentSpectrum(
            f"Length ratio {ratio!r} is not attained by any twist", {"ratio": ratio, "coth": y}
        )
    if abs(y) > 1.0 + band:
        if step < _LOG_FORM_LIMIT:
            u = 0.5 * math.log((ratio - math.exp(-step)) / (ratio - math.exp(step)))
        else:
            u = math.atanh(1.0 / y)
    else:
        target = min(1.0 / abs(y), math.tanh(_FALLBACK_EDGE))
        u = math.copysign(brentq(lambda v: math.tanh(v) - target, 0.0, _FALLBACK_EDGE + 0.5, xtol=1e-15), y)
        logger.warning(f"twist solve fell back to bisection: coth={y!r} u={u!r}")

    # residual of the ratio identity
    lhs = math.sinh(u + step)
    rhs = ratio * math.sinh(u)
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs), _EPS)
    if residual > settings.SOLVER_TOLERANCE:
        raise InconsistentSpectrum(
            f"Twist solve residual {residual:.3e} exceeds tolerance", {"residual": residual}
        )
    return u / step - 0.5


def solve_twist(l0: float, l1: float, l2: float, waist: float) -> float:
    """Twist of an X-piece from the lengths of family members 0, 1, 2.

    The fixed (0, 1, 2) window loses accuracy once |t + n| ℓ is large (about
    3e-4 in t at t = 2.6, ℓ = 4.4). Callers holding more members should use
    ``recover_twist``, which solves on the window nearest the family minimum.

    Raises:
        DegenerateInput: If l0 == l1 (twist -1/2).
        InconsistentSpectrum: If no real twist produces the length ratio.
    """
    return _solve_shift(l0, l1, l2, waist)


def solve_torus_twist(l0: float, l1: float, l2: float, waist: float) -> float:
    """Twist of a one-holed torus from the lengths of family members 0, 1, 2."""
    return _solve_shift(l0, l1, l2, waist / 2.0)


def best_window(lengths: Mapping[int, float]) -> int:
    """First index of the consecutive triple with the smallest total length.

    Raises:
        MissingCurves: If no three consecutive indices are present.
    """
    starts = [n for n in lengths if n + 1 in lengths and n + 2 in lengths]
    if not starts:
        raise MissingCurves([f"{n}" for n in (0, 1, 2)], "A twist family needs three consecutive indices")
    return min(starts, key=lambda n: (lengths[n] + lengths[n + 1] + lengths[n + 2], n))


def recover_twist(lengths: Mapping[int, float], waist: float, torus: bool = False) -> float:
    """Twist from any family sample holding three consecutive indices.

    The triple nearest the family minimum is used; it keeps u small, where
    the ratio identity is best conditioned. Members n0 and n0 + 1 of equal
    length place the twist exactly at -n0 - 1/2.
    """
    n0 = best_window(lengths)
    solver = solve_torus_twist if torus else solve_twist
    try:
        shifted = solver(lengths[n0], lengths[n0 + 1], lengths[n0 + 2], waist)
    except DegenerateInput:
        logger.info(f"members {n0} and {n0 + 1} coincide; twist is {-n0 - 0.5}")
        return -n0 - 0.5
    return shifted - n0


def recover_torus_angle(lgamma: float, lbeta0: float, t: float) -> GeneralizedLength:
    """Boundary datum of a one-holed torus from its waist, β0 and the twist.

    The twist is stripped to get cosh(h0/2) = cosh(lβ0/2)/cosh(tℓ/2); the
    boundary trace is then 2 sinh²(ℓ/2)(cosh²(h0/2) - 1) - 1.

    Raises:
        InconsistentSpectrum: If the trace is not positive.
    """
    if lgamma <= 0 or lbeta0 <= 0 or not math.isfinite(t):
        raise InconsistentSpectrum("Torus lengths must be positive", {"lgamma": lgamma, "lbeta0": lbeta0})
    x = math.cosh(lbeta0 / 2.0) / math.cosh(t * lgamma / 2.0)
    u = 2.0 * math.sinh(lgamma / 2.0) ** 2 * (x - 1.0) * (x + 1.0) - 1.0
    if u <= 0.0:
        raise InconsistentSpectrum(
            f"Torus boundary trace {u!r} does not describe a cone angle below pi", {"trace": u}
        )
    return from_trace(u)
