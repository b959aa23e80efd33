"""Comparison of a cone surface with its cusped counterpart."""

import logging
import math
from itertools import combinations
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel

from ..common.models import BoundaryKind, CurveId, CurveKind, GeneralizedLength, LambdaLike
from ..geometry.pants import trace
from ..geometry.xpiece import family_length, torus_family_length
from .families import FamilyKind, all_families, family_spec
from .surface import SurfaceFN

logger = logging.getLogger(__name__)

_SLACK = 1e-12


def forget_map(surface: SurfaceFN) -> SurfaceFN:
    """Replace every boundary datum by a cusp, keeping lengths and twists."""
    return surface.model_copy(update={"boundaries": [GeneralizedLength(value=0.0)] * len(surface.boundaries)})


class ComparisonConstants(BaseModel):
    """Multiplicative constant C >= 1 and additive constant D = arccosh(C) >= 0."""
    C: float
    D: float
    cases: Dict[str, float] = {}


def comparison_constants(lambdas: Sequence[LambdaLike]) -> ComparisonConstants:
    """Constants bounding lengths on a surface with boundary data Λ against its cusped twin.

    Per boundary: cone 2/(1+m) and 1/m², geodesic (1+m)/2 and m². Per pair
    of boundaries: (max/min)² of their traces together with the cusp trace 1.
    C is the largest of these, D = arccosh(C).
    """
    values = [GeneralizedLength.of(lam) for lam in lambdas]
    traces = [trace(v) for v in values]
    cases: Dict[str, float] = {"A": 1.0, "B": 1.0, "C": 1.0, "D": 1.0, "EF": 1.0}
    for value, m in zip(values, traces):
        if value.kind == BoundaryKind.CONE:
            cases["A"] = max(cases["A"], 2.0 / (1.0 + m))
            cases["C"] = max(cases["C"], 1.0 / (m * m))
        elif value.kind == BoundaryKind.GEODESIC:
            cases["B"] = max(cases["B"], (1.0 + m) / 2.0)
            cases["D"] = max(cases["D"], m * m)
    for mi, mj in combinations(traces, 2):
        cases["EF"] = max(cases["EF"], (max(mi, mj, 1.0) / min(mi, mj, 1.0)) ** 2)
    c = max(cases.values())
    return ComparisonConstants(C=c, D=math.acosh(c), cases=cases)


class BoundViolation(BaseModel):
    curve: str
    length: float
    cusped_length: float
    additive_bound: float
    ratio: float


class LengthBoundsReport(BaseModel):
    """Outcome of checking both comparison inequalities over family curves."""
    C: float
    D: float
    checked: int
    worst_gap: float           # max |l_X - l_FX|
    worst_additive_slack: float  # min of D·i - |l_X - l_FX|
    worst_ratio: float          # max of l_X/l_FX and its inverse
    violations: List[BoundViolation] = []

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_length_bounds(
    surface: SurfaceFN,
    curves: Optional[Sequence[int]] = None,
    max_index: int = 20,
) -> LengthBoundsReport:
    """Check |l_X - l_FX| <= D·i(α, γ) and 1/C <= l_X/l_FX <= C on family curves.

    Args:
        surface: The cone surface X.
        curves: Internal curves whose families are checked (default: all).
        max_index: Family members -max_index..max_index are checked.

    Returns:
        A report; ``passed`` is False if any curve breaks either bound.
    """
    constants = comparison_constants(surface.boundaries)
    cusped = forget_map(surface)
    families = all_families(surface.topology)
    selected = set(range(surface.n_curves)) if curves is None else set(curves)

    checked = 0
    worst_gap, worst_slack, worst_ratio = 0.0, math.inf, 1.0
    violations: List[BoundViolation] = []
    for family in families:
        if family.curve not in selected:
            continue
        spec = family_spec(surface, family.curve, family)
        spec_cusped = family_spec(cusped, family.curve, family)
        intersection = family.intersection
        for n in range(-max_index, max_index + 1):
            if family.kind == FamilyKind.XPIECE:
                l_x, l_f = family_length(spec, n), family_length(spec_cusped, n)
            else:
                l_x, l_f = torus_family_length(spec, n), torus_family_length(spec_cusped, n)
            gap = abs(l_x - l_f)
            bound = constants.D * intersection
            ratio = l_x / l_f
            spread = max(ratio, 1.0 / ratio)
            checked += 1
            worst_gap = max(worst_gap, gap)
            worst_slack = min(worst_slack, bound - gap)
            worst_ratio = max(worst_ratio, spread)
            if gap > bound + _SLACK * max(1.0, l_x) or spread > constants.C * (1.0 + _SLACK):
                cid = CurveId(curve=family.curve, kind=CurveKind.TWIST, index=n)
                violations.append(
                    BoundViolation(curve=str(cid), length=l_x, cusped_length=l_f, additive_bound=bound, ratio=ratio)
                )
    if violations:
        logger.warning(f"{len(violations)} curves break the comparison bounds")
    return LengthBoundsReport(
        C=constants.C,
        D=constants.D,
        checked=checked,
        worst_gap=worst_gap,
        worst_additive_slack=worst_slack if checked else 0.0,
        worst_ratio=worst_ratio,
        violations=violations,
    )
