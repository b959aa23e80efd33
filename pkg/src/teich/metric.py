"""Length-ratio distances between surfaces and twist-limit diagnostics.

Distances are taken over a finite curve set (pants curves and the members of
every embedded twist family with |index| <= N), so ``thurston_distance_lb``
is a lower bound for the asymmetric metric; it can only grow with N.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..common.errors import TopologyMismatch
from ..common.models import CurveId, CurveKind
from ..geometry.xpiece import XPieceSpec, asymptotic_constant, torus_asymptotic_constant
from .compare import forget_map
from .families import family_spec
from .spectrum import family_curve_set, forward_spectrum
from .surface import SurfaceFN

logger = logging.getLogger(__name__)


def _check_comparable(x1: SurfaceFN, x2: SurfaceFN) -> None:
    if not x1.same_shape(x2):
        raise TopologyMismatch("Surfaces do not share a pants graph", {"genus": [x1.genus, x2.genus]})
    if x1.lambdas != x2.lambdas:
        raise TopologyMismatch(
            "Surfaces do not share boundary data", {"boundaries": [x1.lambdas, x2.lambdas]}
        )


def _log_max_ratio(x1: SurfaceFN, x2: SurfaceFN, curves: List[CurveId], parallelism: Optional[int]) -> float:
    l1 = forward_spectrum(x1, curves, parallelism)
    l2 = forward_spectrum(x2, curves, parallelism)
    ratios = np.array([l2[cid] / l1[cid] for cid in curves])
    return float(np.log(ratios.max()))


def thurston_distance_lb(
    x1: SurfaceFN,
    x2: SurfaceFN,
    max_index: int = 20,
    parallelism: Optional[int] = None,
) -> float:
    """log max l_{X2}(α)/l_{X1}(α) over the finite curve set.

    Raises:
        TopologyMismatch: If the pants graphs or the boundary data differ.
    """
    _check_comparable(x1, x2)
    curves = family_curve_set(x1, max_index)
    d = _log_max_ratio(x1, x2, curves, parallelism)
    logger.info(f"distance lower bound over {len(curves)} curves: {d!r}")
    return d


def almost_isometry_gap(
    x1: SurfaceFN,
    x2: SurfaceFN,
    max_index: int = 20,
    parallelism: Optional[int] = None,
) -> float:
    """|d(X1, X2) - d(F X1, F X2)| over the same curve set, F the cusp map.

    Bounded by 2 log C for the comparison constant C of the shared boundary data.
    """
    _check_comparable(x1, x2)
    curves = family_curve_set(x1, max_index)
    d = _log_max_ratio(x1, x2, curves, parallelism)
    d_cusped = _log_max_ratio(forget_map(x1), forget_map(x2), curves, parallelism)
    return abs(d - d_cusped)


class ConvergenceSample(BaseModel):
    twist: float
    profile_error: float
    waist_entry: float
    constant: float
    expected_constant: float

    @property
    def constant_error(self) -> float:
        return abs(self.constant - self.expected_constant) / self.expected_constant


class ConvergenceReport(BaseModel):
    """Normalized length vectors of X twisted along one waist, sampled in t."""
    curve: int
    curves: List[str]
    profile: List[float]
    samples: List[ConvergenceSample]


def boundary_convergence(
    surface: SurfaceFN,
    j: int,
    twists: Sequence[float],
    max_index: int = 20,
    parallelism: Optional[int] = None,
) -> ConvergenceReport:
    """Follow X_t = X twisted to t along internal curve j.

    For each t the length vector over the curve set is divided by its largest
    entry and compared with the intersection profile of the waist: 1 on the
    family of curve j, 0 on everything else. The family member 0 also gives
    exp(l/2 - tℓ) (exp(l/2 - tℓ/2) on a torus), which tends to the
    asymptotic constant of the family at twist 0.
    """
    curves = family_curve_set(surface, max_index)
    profile = np.array([1.0 if c.curve == j and c.kind == CurveKind.TWIST else 0.0 for c in curves])
    waist_id = CurveId(curve=j, kind=CurveKind.PANTS)
    base = family_spec(surface, j).with_twist(0.0)
    if isinstance(base, XPieceSpec):
        expected, rate = asymptotic_constant(base), base.waist
    else:
        expected, rate = torus_asymptotic_constant(base), base.waist / 2.0

    samples: List[ConvergenceSample] = []
    for t in twists:
        spectrum = forward_spectrum(surface.with_twist(j, t), curves, parallelism)
        lengths = np.array([spectrum[c] for c in curves])
        normalized = lengths / lengths.max()
        l0 = spectrum[CurveId(curve=j, kind=CurveKind.TWIST, index=0)]
        samples.append(
            ConvergenceSample(
                twist=float(t),
                profile_error=float(np.max(np.abs(normalized - profile))),
                waist_entry=float(normalized[curves.index(waist_id)]),
                constant=math.exp(l0 / 2.0 - t * rate),
                expected_constant=expected,
            )
        )
        logger.debug(f"t={t!r}: profile error {samples[-1].profile_error:.3e}")
    return ConvergenceReport(
        curve=j, curves=[str(c) for c in curves], profile=profile.tolist(), samples=samples
    )
