import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator

from .errors import DomainError, MissingCurves


class BoundaryKind(str, Enum):
    CONE = "cone"
    CUSP = "cusp"
    GEODESIC = "geodesic"


class GeneralizedLength(BaseModel):
    """One boundary datum: minus the cone angle, zero for a cusp, or a geodesic length."""
    value: float

    model_config = {"frozen": True}

    @field_validator("value")
    @classmethod
    def _check_range(cls, v: float) -> float:
        if not math.isfinite(v) or v <= -math.pi:
            raise ValueError(f"generalized length must lie in (-pi, inf), got {v!r}")
        return v

    @classmethod
    def of(cls, value: Union["GeneralizedLength", float]) -> "GeneralizedLength":
        """Coerce a float (or an existing instance) into a GeneralizedLength.

        Raises:
            DomainError: If the value is outside (-pi, inf).
        """
        if isinstance(value, GeneralizedLength):
            return value
        try:
            return cls(value=float(value))
        except ValueError as e:
            raise DomainError(f"Invalid generalized length {value!r}", {"value": value}) from e

    @property
    def kind(self) -> BoundaryKind:
        if self.value < 0:
            return BoundaryKind.CONE
        if self.value == 0:
            return BoundaryKind.CUSP
        return BoundaryKind.GEODESIC

    @property
    def cone_angle(self) -> Optional[float]:
        return -self.value if self.value < 0 else None

    def __float__(self) -> float:
        return self.value


LambdaLike = Union[GeneralizedLength, float]


class CurveKind(str, Enum):
    PANTS = "pants"    # the pants curve itself
    TWIST = "twist"    # Dehn-twist family crossing the pants curve
    DUAL = "dual"      # pants curves obtained by twisting along the shortest family member
    CHART = "chart"    # family crossing one of the dual pants curves


@dataclass(frozen=True, order=True)
class CurveId:
    """Identifier of one curve of the manifest.

    Sorting follows (curve, kind, chart, index), which is the canonical
    order used in every report.
    """
    curve: int
    kind: CurveKind
    chart: int = 0
    index: int = 0

    @property
    def family(self) -> str:
        if self.kind == CurveKind.CHART:
            return f"{self.kind.value}/{self.curve}/{self.chart}"
        return f"{self.kind.value}/{self.curve}"

    def __str__(self) -> str:
        return f"{self.family}:{self.index}"

    @classmethod
    def parse(cls, family: str, index: int) -> "CurveId":
        """Build a CurveId from its family string, e.g. ``twist/2`` or ``chart/1/-3``."""
        parts = family.split("/")
        try:
            kind = CurveKind(parts[0])
            curve = int(parts[1])
            if kind == CurveKind.CHART:
                if len(parts) != 3:
                    raise ValueError(family)
                return cls(curve=curve, kind=kind, chart=int(parts[2]), index=int(index))
            if len(parts) != 2:
                raise ValueError(family)
        except (ValueError, IndexError) as e:
            raise DomainError(f"Invalid curve family id: {family!r}", {"family": family}) from e
        return cls(curve=curve, kind=kind, index=int(index))


class LengthSpectrum:
    """Finite map from curve identifiers to positive lengths."""

    def __init__(self, entries: Optional[Mapping[CurveId, float]] = None):
        self._entries: Dict[CurveId, float] = {}
        for curve_id, length in (entries or {}).items():
            self[curve_id] = length

    def __setitem__(self, curve_id: CurveId, length: float) -> None:
        length = float(length)
        if not math.isfinite(length) or length <= 0:
            raise DomainError(f"Length of {curve_id} must be positive and finite, got {length!r}",
                              {"curve": str(curve_id)})
        self._entries[curve_id] = length

    def __getitem__(self, curve_id: CurveId) -> float:
        try:
            return self._entries[curve_id]
        except KeyError:
            raise MissingCurves([str(curve_id)]) from None

    def __contains__(self, curve_id: object) -> bool:
        return curve_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[CurveId]:
        return iter(sorted(self._entries))

    def items(self) -> List[Tuple[CurveId, float]]:
        return [(cid, self._entries[cid]) for cid in sorted(self._entries)]

    def indices(self, curve: int, kind: CurveKind, chart: int = 0) -> List[int]:
        """Sorted twist indices present for one family."""
        return sorted(
            cid.index for cid in self._entries
            if cid.curve == curve and cid.kind == kind and (kind != CurveKind.CHART or cid.chart == chart)
        )

    def charts(self, curve: int) -> List[int]:
        """Dual indices present for the probe around ``curve``."""
        return self.indices(curve, CurveKind.DUAL)

    def require(self, curve_ids: Iterable[CurveId]) -> None:
        missing = [str(cid) for cid in sorted(set(curve_ids)) if cid not in self._entries]
        if missing:
            raise MissingCurves(missing)

    def to_records(self) -> List[Dict[str, Union[str, int, float]]]:
        return [{"family": cid.family, "n": cid.index, "length": length} for cid, length in self.items()]

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "LengthSpectrum":
        spectrum = cls()
        for record in records:
            spectrum[CurveId.parse(record["family"], record["n"])] = record["length"]
        return spectrum


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


class RunConfig(BaseModel):
    """Options shared by every CLI command."""
    tolerance: float = Field(default=1e-10, gt=0.0, le=1e-4)
    max_twist_index: int = Field(default=20, ge=1, le=200)
    output_format: OutputFormat = OutputFormat.TABLE
    parallelism: int = Field(default=1, ge=1)
    hex_floats: bool = False
