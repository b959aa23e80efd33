"""Twist families embedded in a surface, read off the pants graph.

An internal curve whose two sides lie in different pants spans an X-piece;
a curve bounding the same pants on both sides spans a one-holed torus.
"""

import logging
from enum import Enum
from typing import List, Optional, Union

from pydantic import BaseModel

from ..common.errors import DomainError
from ..geometry.xpiece import TorusSpec, XPieceSpec
from .surface import CuffSlot, SurfaceFN, SurfaceTopology

logger = logging.getLogger(__name__)

FamilySpec = Union[XPieceSpec, TorusSpec]


class FamilyKind(str, Enum):
    XPIECE = "xpiece"
    TORUS = "torus"


class EmbeddedFamily(BaseModel):
    """Cuff slots that carry the twist family of internal curve ``curve``."""
    curve: int
    kind: FamilyKind
    target_a: Optional[CuffSlot] = None
    companion_a: Optional[CuffSlot] = None
    target_b: Optional[CuffSlot] = None
    companion_b: Optional[CuffSlot] = None
    torus_boundary: Optional[CuffSlot] = None
    pants_a: int = 0
    pants_b: int = 0

    model_config = {"frozen": True}

    @property
    def intersection(self) -> int:
        """Geometric intersection of each family curve with the waist."""
        return 2 if self.kind == FamilyKind.XPIECE else 1

    def companions(self) -> List[CuffSlot]:
        return [self.companion_a, self.companion_b] if self.kind == FamilyKind.XPIECE else []


def _split_side(topology: SurfaceTopology, pants_index: int, slot_index: int):
    others = [s for k, s in enumerate(topology.pants[pants_index].cuffs) if k != slot_index]
    internal = [s for s in others if not s.is_boundary]
    target = internal[0] if internal else others[0]
    companion = others[1] if target is others[0] else others[0]
    return target, companion


def embedded_family(topology: SurfaceTopology, j: int) -> EmbeddedFamily:
    """The canonical family crossing internal curve j.

    In each pants the target is the first internal-curve cuff among the two
    cuffs other than j (a boundary only when both are boundaries); the
    remaining cuff is the companion.
    """
    if not 0 <= j < topology.n_curves:
        raise DomainError(f"No internal curve {j}", {"curve": j})
    (p_a, k_a), (p_b, k_b) = topology.curve_slots(j)
    if p_a == p_b:
        third = next(s for k, s in enumerate(topology.pants[p_a].cuffs) if k not in (k_a, k_b))
        return EmbeddedFamily(curve=j, kind=FamilyKind.TORUS, torus_boundary=third, pants_a=p_a, pants_b=p_a)
    target_a, companion_a = _split_side(topology, p_a, k_a)
    target_b, companion_b = _split_side(topology, p_b, k_b)
    return EmbeddedFamily(
        curve=j,
        kind=FamilyKind.XPIECE,
        target_a=target_a,
        companion_a=companion_a,
        target_b=target_b,
        companion_b=companion_b,
        pants_a=p_a,
        pants_b=p_b,
    )


def family_spec(surface: SurfaceFN, j: int, family: Optional[EmbeddedFamily] = None) -> FamilySpec:
    """Local X-piece or torus model of curve j's family with the surface's data."""
    family = family or embedded_family(surface.topology, j)
    waist, twist = surface.lengths[j], surface.twists[j]
    if family.kind == FamilyKind.TORUS:
        return TorusSpec(waist=waist, boundary=surface.cuff_value(family.torus_boundary), twist=twist)
    return XPieceSpec(
        target_a=surface.cuff_value(family.target_a),
        companion_a=surface.cuff_value(family.companion_a),
        target_b=surface.cuff_value(family.target_b),
        companion_b=surface.cuff_value(family.companion_b),
        waist=waist,
        twist=twist,
    )


def all_families(topology: SurfaceTopology) -> List[EmbeddedFamily]:
    return [embedded_family(topology, j) for j in range(topology.n_curves)]
