"""Fenchel-Nielsen coordinates of a whole surface over a pants graph."""

import logging
import math
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, model_validator

from ..common.errors import DomainError, ExceptionalSurface
from ..common.models import GeneralizedLength, LambdaLike

logger = logging.getLogger(__name__)

EXCEPTIONAL_TYPES = frozenset({(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 0)})


def check_surface_type(genus: int, n_boundaries: int) -> None:
    """Raise ExceptionalSurface for the seven exceptional (g, n)."""
    if genus < 0 or n_boundaries < 0:
        raise DomainError(f"Invalid surface type ({genus}, {n_boundaries})")
    if (genus, n_boundaries) in EXCEPTIONAL_TYPES:
        raise ExceptionalSurface(
            f"Surface type (g={genus}, n={n_boundaries}) is exceptional",
            {"genus": genus, "boundaries": n_boundaries},
        )


class CuffSlot(BaseModel):
    """One cuff of a pants, bound to a boundary index or an internal-curve index."""
    boundary: Optional[int] = Field(default=None, ge=0)
    curve: Optional[int] = Field(default=None, ge=0)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _exactly_one(self) -> "CuffSlot":
        if (self.boundary is None) == (self.curve is None):
            raise ValueError("a cuff slot binds exactly one of 'boundary' or 'curve'")
        return self

    @property
    def is_boundary(self) -> bool:
        return self.boundary is not None

    def to_dict(self) -> Dict[str, int]:
        return {"boundary": self.boundary} if self.is_boundary else {"curve": self.curve}

    def __str__(self) -> str:
        return f"b{self.boundary}" if self.is_boundary else f"c{self.curve}"


def curve(j: int) -> CuffSlot:
    return CuffSlot(curve=j)


def boundary(i: int) -> CuffSlot:
    return CuffSlot(boundary=i)


class PantsRecord(BaseModel):
    cuffs: Tuple[CuffSlot, CuffSlot, CuffSlot]

    model_config = {"frozen": True}

    def boundary_slots(self) -> List[int]:
        return [k for k, slot in enumerate(self.cuffs) if slot.is_boundary]


class SurfaceTopology(BaseModel):
    """Pants graph of a genus-g surface with n generalized boundaries."""
    genus: int = Field(ge=0)
    n_boundaries: int = Field(ge=0)
    pants: List[PantsRecord]

    model_config = {"frozen": True}

    @property
    def n_curves(self) -> int:
        return 3 * self.genus - 3 + self.n_boundaries

    @model_validator(mode="after")
    def _check_graph(self) -> "SurfaceTopology":
        check_surface_type(self.genus, self.n_boundaries)
        expected = 2 * self.genus - 2 + self.n_boundaries
        if len(self.pants) != expected:
            raise ValueError(f"expected {expected} pants, got {len(self.pants)}")
        curves = Counter(s.curve for p in self.pants for s in p.cuffs if not s.is_boundary)
        boundaries = Counter(s.boundary for p in self.pants for s in p.cuffs if s.is_boundary)
        for j in range(self.n_curves):
            if curves.get(j, 0) != 2:
                raise ValueError(f"internal curve {j} must bind exactly two cuff slots, found {curves.get(j, 0)}")
        for i in range(self.n_boundaries):
            if boundaries.get(i, 0) != 1:
                raise ValueError(f"boundary {i} must bind exactly one cuff slot, found {boundaries.get(i, 0)}")
        stray_curves = set(curves) - set(range(self.n_curves))
        stray_boundaries = set(boundaries) - set(range(self.n_boundaries))
        if stray_curves or stray_boundaries:
            raise ValueError(f"indices out of range: curves {sorted(stray_curves)}, boundaries {sorted(stray_boundaries)}")
        return self

    def curve_slots(self, j: int) -> List[Tuple[int, int]]:
        """(pants index, slot index) for the two sides of internal curve j."""
        return [
            (p, k) for p, pants in enumerate(self.pants)
            for k, slot in enumerate(pants.cuffs) if slot.curve == j
        ]

    def boundary_slot(self, i: int) -> Tuple[int, int]:
        for p, pants in enumerate(self.pants):
            for k, slot in enumerate(pants.cuffs):
                if slot.boundary == i:
                    return p, k
        raise DomainError(f"boundary {i} is not in the pants graph")


def standard_topology(genus: int, n_boundaries: int) -> SurfaceTopology:
    """A reference pants graph for S_{g,n}.

    Genus 0 is a chain, genus 1 a necklace of pants around the handle, and
    higher genus hangs each handle (a_i, a_i, e_i) off a chain through the
    separating curves e_i and the boundaries.
    """
    check_surface_type(genus, n_boundaries)
    g, n = genus, n_boundaries
    pants: List[Tuple[CuffSlot, CuffSlot, CuffSlot]] = []
    if g == 0:
        items = [boundary(i) for i in range(n)]
        pants.extend(_chain(items, first_curve=0))
    elif g == 1:
        if n == 1:
            pants.append((curve(0), curve(0), boundary(0)))
        else:
            for i in range(n):
                pants.append((curve(i), boundary(i), curve((i + 1) % n)))
    else:
        for i in range(g):
            pants.append((curve(i), curve(i), curve(g + i)))
        if n == 0 and g == 2:
            # the two handles share their separating curve
            pants[1] = (curve(1), curve(1), curve(2))
        else:
            items = [curve(g)] + [boundary(i) for i in range(n)] + [curve(g + i) for i in range(1, g)]
            pants.extend(_chain(items, first_curve=2 * g))
    topology = SurfaceTopology(
        genus=g, n_boundaries=n, pants=[PantsRecord(cuffs=tuple(p)) for p in pants]
    )
    logger.debug(f"standard topology ({g}, {n}): {[[str(s) for s in p.cuffs] for p in topology.pants]}")
    return topology


def _chain(items: Sequence[CuffSlot], first_curve: int) -> List[Tuple[CuffSlot, CuffSlot, CuffSlot]]:
    """Pants (x0, x1, s0), (s0, x2, s1), ..., (s_{k-4}, x_{k-2}, x_{k-1})."""
    k = len(items)
    if k == 3:
        return [tuple(items)]
    links = [curve(first_curve + i) for i in range(k - 3)]
    chain = [(items[0], items[1], links[0])]
    for i in range(1, k - 3):
        chain.append((links[i - 1], items[i + 1], links[i]))
    chain.append((links[-1], items[k - 2], items[k - 1]))
    return chain


class SurfaceFN(BaseModel):
    """A surface with boundary data Λ, pants-curve lengths L and twists T.

    Twists are dimensionless: a twist of 1 is one full Dehn twist.
    """
    genus: int = Field(ge=0)
    boundaries: List[GeneralizedLength]
    pants: List[PantsRecord]
    lengths: List[float]
    twists: List[float]

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_coordinates(self) -> "SurfaceFN":
        topology = self.topology  # validates the graph
        if len(self.lengths) != topology.n_curves:
            raise ValueError(f"expected {topology.n_curves} internal lengths, got {len(self.lengths)}")
        if len(self.twists) != topology.n_curves:
            raise ValueError(f"expected {topology.n_curves} twists, got {len(self.twists)}")
        for j, length in enumerate(self.lengths):
            if not (math.isfinite(length) and length > 0):
                raise ValueError(f"internal length {j} must be positive and finite, got {length!r}")
        for j, t in enumerate(self.twists):
            if not math.isfinite(t):
                raise ValueError(f"twist {j} must be finite, got {t!r}")
        return self

    @classmethod
    def build(
        cls,
        topology: SurfaceTopology,
        boundaries: Sequence[LambdaLike],
        lengths: Sequence[float],
        twists: Sequence[float],
    ) -> "SurfaceFN":
        """Assemble coordinates over a topology, wrapping validation failures in DomainError."""
        check_surface_type(topology.genus, len(boundaries))
        try:
            return cls(
                genus=topology.genus,
                boundaries=[GeneralizedLength.of(b) for b in boundaries],
                pants=list(topology.pants),
                lengths=[float(x) for x in lengths],
                twists=[float(t) for t in twists],
            )
        except ValueError as e:
            raise DomainError(f"Invalid surface coordinates: {e}") from e

    @property
    def topology(self) -> SurfaceTopology:
        return SurfaceTopology(genus=self.genus, n_boundaries=len(self.boundaries), pants=self.pants)

    @property
    def n_curves(self) -> int:
        return len(self.lengths)

    @property
    def lambdas(self) -> List[float]:
        return [b.value for b in self.boundaries]

    def cuff_value(self, slot: CuffSlot) -> GeneralizedLength:
        """Generalized length seen at a cuff: λ for a boundary, the length for a curve."""
        if slot.is_boundary:
            return self.boundaries[slot.boundary]
        return GeneralizedLength(value=self.lengths[slot.curve])

    def with_boundaries(self, boundaries: Sequence[LambdaLike]) -> "SurfaceFN":
        return SurfaceFN.build(self.topology, boundaries, self.lengths, self.twists)

    def with_twist(self, j: int, twist: float) -> "SurfaceFN":
        twists = list(self.twists)
        twists[j] = float(twist)
        return self.model_copy(update={"twists": twists})

    def with_length(self, j: int, length: float) -> "SurfaceFN":
        lengths = list(self.lengths)
        lengths[j] = float(length)
        return SurfaceFN.build(self.topology, self.boundaries, lengths, self.twists)

    def same_shape(self, other: "SurfaceFN") -> bool:
        """Same genus, pants graph and boundary count."""
        return self.genus == other.genus and self.pants == other.pants and len(self.boundaries) == len(other.boundaries)
