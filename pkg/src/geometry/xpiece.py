"""Dehn-twist families on generalized X-pieces and one-holed tori.

An X-piece is two pants glued along a geodesic waist. In each pants the
family curve turns around the *target* cuff; the other cuff is the
*companion*. With (U, V, m) the coefficients of each side,

    cosh(l_n / 2) = U_a U_b cosh((t + n) ℓ) + V_a V_b - m_a m_b,

and on a one-holed torus cosh(l_n / 2) = cosh((t + n) ℓ / 2) cosh(h0 / 2).
Twist is dimensionless; index n shifts it by n full turns.
"""

import logging
import math
from typing import Iterable, List, Optional, Tuple

from pydantic import BaseModel, Field

from ..common.errors import DomainError
from ..common.models import GeneralizedLength, LambdaLike
from .hyptrig import arccosh_from_log, guarded_arccosh, log_add, log_cosh, stable_arccosh
from .pants import PantsCoefficients, coefficients, trace

logger = logging.getLogger(__name__)

# Beyond this |x| the family is evaluated in the log domain.
_DIRECT_LIMIT = 300.0

# Dual-chart selection for boundary probes
PROBE_CHARTS = 4
PROBE_SPAN = 6
PROBE_SEPARATION = 0.2


class XPieceSpec(BaseModel):
    """Two pants (target, companion, waist) glued along the waist with a twist."""
    target_a: GeneralizedLength
    companion_a: GeneralizedLength
    target_b: GeneralizedLength
    companion_b: GeneralizedLength
    waist: float = Field(gt=0.0, allow_inf_nan=False)
    twist: float = Field(default=0.0, allow_inf_nan=False)

    model_config = {"frozen": True}

    @classmethod
    def of(
        cls,
        target_a: LambdaLike,
        companion_a: LambdaLike,
        target_b: LambdaLike,
        companion_b: LambdaLike,
        waist: float,
        twist: float = 0.0,
    ) -> "XPieceSpec":
        try:
            return cls(
                target_a=GeneralizedLength.of(target_a),
                companion_a=GeneralizedLength.of(companion_a),
                target_b=GeneralizedLength.of(target_b),
                companion_b=GeneralizedLength.of(companion_b),
                waist=waist,
                twist=twist,
            )
        except ValueError as e:
            raise DomainError(f"Invalid X-piece: {e}") from e

    def with_twist(self, twist: float) -> "XPieceSpec":
        return self.model_copy(update={"twist": float(twist)})

    def side_coefficients(self) -> Tuple[PantsCoefficients, PantsCoefficients]:
        return (
            coefficients(self.target_a, self.companion_a, self.waist),
            coefficients(self.target_b, self.companion_b, self.waist),
        )

    def amplitudes(self) -> Tuple[float, float]:
        """(A, B) with cosh(l_n/2) = A cosh((t+n)ℓ) + B; both are positive."""
        a, b = self.side_coefficients()
        return a.U * b.U, a.V * b.V - a.m * b.m


class TorusSpec(BaseModel):
    """One-holed torus: waist γ, generalized boundary λ and twist along γ."""
    waist: float = Field(gt=0.0, allow_inf_nan=False)
    boundary: GeneralizedLength
    twist: float = Field(default=0.0, allow_inf_nan=False)

    model_config = {"frozen": True}

    @classmethod
    def of(cls, waist: float, boundary: LambdaLike, twist: float = 0.0) -> "TorusSpec":
        try:
            return cls(waist=waist, boundary=GeneralizedLength.of(boundary), twist=twist)
        except ValueError as e:
            raise DomainError(f"Invalid one-holed torus: {e}") from e

    def with_twist(self, twist: float) -> "TorusSpec":
        return self.model_copy(update={"twist": float(twist)})


def _length_from_amplitudes(amp: float, base: float, x: float) -> float:
    if abs(x) < _DIRECT_LIMIT:
        return 2.0 * stable_arccosh(amp * math.cosh(x) + base)
    log_c = log_add(math.log(amp) + log_cosh(x), math.log(base))
    return 2.0 * arccosh_from_log(log_c)


def family_length(spec: XPieceSpec, n: int) -> float:
    """Length of the n-th twist of the family curve across the waist."""
    amp, base = spec.amplitudes()
    return _length_from_amplitudes(amp, base, (spec.twist + n) * spec.waist)


def family_lengths(spec: XPieceSpec, indices: Iterable[int]) -> List[float]:
    amp, base = spec.amplitudes()
    return [_length_from_amplitudes(amp, base, (spec.twist + n) * spec.waist) for n in indices]


def asymptotic_constant(spec: XPieceSpec) -> float:
    """Limit of exp(l_n/2 - nℓ) as n grows: U_a U_b e^{tℓ}.

    The twist factor e^{tℓ} is included; at twist 0 this is the product of
    the two U coefficients.
    """
    amp, _ = spec.amplitudes()
    return amp * math.exp(spec.twist * spec.waist)


def torus_height(spec: TorusSpec) -> float:
    """Distance h0 between the two copies of the waist in the cut-open pants.

    cosh h0 = (m + cosh²(ℓ/2)) / sinh²(ℓ/2), evaluated as
    h0 = 2 asinh(sqrt((m + 1)/2) / sinh(ℓ/2)).
    """
    m = trace(spec.boundary)
    return 2.0 * math.asinh(math.sqrt((m + 1.0) / 2.0) / math.sinh(spec.waist / 2.0))


def torus_family_length(spec: TorusSpec, n: int) -> float:
    """Length of the n-th twist of the curve crossing the waist once."""
    half_h = torus_height(spec) / 2.0
    x = (spec.twist + n) * spec.waist / 2.0
    if abs(x) < _DIRECT_LIMIT:
        return 2.0 * stable_arccosh(math.cosh(x) * math.cosh(half_h))
    return 2.0 * arccosh_from_log(log_cosh(x) + log_cosh(half_h))


def torus_family_lengths(spec: TorusSpec, indices: Iterable[int]) -> List[float]:
    return [torus_family_length(spec, n) for n in indices]


def torus_asymptotic_constant(spec: TorusSpec) -> float:
    """Limit of exp(l_n/2 - nℓ/2): e^{tℓ/2} cosh(h0/2)."""
    return math.exp(spec.twist * spec.waist / 2.0) * math.cosh(torus_height(spec) / 2.0)


def shortest_index(spec: XPieceSpec) -> int:
    """Index of the shortest family member (|t + n| <= 1/2)."""
    return -math.floor(spec.twist + 0.5)


def _twist_magnitude(cosh_half_length: float, amp: float, base: float, waist: float) -> float:
    return guarded_arccosh((cosh_half_length - base) / amp, "twist_magnitude") / waist


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def dual_spec(spec: XPieceSpec) -> XPieceSpec:
    """The same X-piece seen with the shortest family member δ* as waist.

    The dual pants are (target_a, target_b, δ*) and (companion_a,
    companion_b, δ*). The original waist is member 0 of the dual family.
    """
    m_star = shortest_index(spec)
    shifted = spec.twist + m_star
    w = family_length(spec, m_star)
    dual = XPieceSpec(
        target_a=spec.target_a,
        companion_a=spec.target_b,
        target_b=spec.companion_a,
        companion_b=spec.companion_b,
        waist=w,
    )
    amp, base = dual.amplitudes()
    magnitude = _twist_magnitude(math.cosh(spec.waist / 2.0), amp, base, w)
    logger.debug(f"dual chart: waist={w!r} twist=±{magnitude!r} (shortest index {m_star})")
    return dual.with_twist(_sign(shifted) * magnitude)


def chart_spec(spec: XPieceSpec, k: int, dual: Optional[XPieceSpec] = None) -> XPieceSpec:
    """The X-piece re-cut along the k-th member of the dual family.

    Its waist is that member; its family contains δ* at index 0. For k = 0
    this is ``spec`` with the twist reduced to [-1/2, 1/2).
    """
    dual = dual or dual_spec(spec)
    waist_k = family_length(dual, k)
    chart = spec.model_copy(update={"waist": waist_k, "twist": 0.0})
    amp, base = chart.amplitudes()
    magnitude = _twist_magnitude(math.cosh(dual.waist / 2.0), amp, base, waist_k)
    return chart.with_twist(_sign(dual.twist + k) * magnitude)


def probe_charts(
    dual: XPieceSpec,
    count: int = PROBE_CHARTS,
    span: int = PROBE_SPAN,
    separation: float = PROBE_SEPARATION,
) -> List[int]:
    """Dual indices whose waists give well separated nodes for the boundary system.

    Candidates in [-span, span] are taken in order of |t̃ + k| (shortest
    waists first), skipping any whose |t̃ + k| is within ``separation`` of
    one already chosen.

    Raises:
        DomainError: If fewer than ``count`` indices qualify.
    """
    ranked = sorted(range(-span, span + 1), key=lambda k: (abs(dual.twist + k), k))
    chosen: List[int] = []
    for k in ranked:
        if all(abs(abs(dual.twist + k) - abs(dual.twist + c)) >= separation for c in chosen):
            chosen.append(k)
        if len(chosen) == count:
            return sorted(chosen)
    raise DomainError(f"Only {len(chosen)} separated probe charts in [-{span}, {span}]", {"chosen": chosen})
