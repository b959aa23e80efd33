"""JSON surface documents shared by every command.

A document carries any of: a pants graph (``genus`` + ``pants``), full
coordinates (``boundaries``, ``lengths``, ``twists``), named families and a
length spectrum. Reals may be written as JSON numbers or as hexadecimal
float strings (``float.hex``); both read back bit-exactly.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..teich.surface import CuffSlot, PantsRecord, SurfaceFN, SurfaceTopology
from .errors import DomainError, ParseError, SchemaError
from .models import CurveId, LengthSpectrum

logger = logging.getLogger(__name__)


def read_real(value: Any) -> float:
    """A float from a JSON number or a hex/decimal string."""
    if isinstance(value, bool):
        raise ValueError("expected a real number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "0x" in text.lower():
                return float.fromhex(text)
            return float(text)
        except ValueError:
            raise ValueError(f"not a real number: {value!r}") from None
    raise ValueError(f"expected a real number, got {type(value).__name__}")


def write_real(value: float, hex_floats: bool = False) -> Union[float, str]:
    """Shortest round-tripping decimal (a JSON number) or ``float.hex``."""
    return float(value).hex() if hex_floats else float(value)


class SpectrumRecord(BaseModel):
    family: str
    n: int = 0
    length: float = Field(gt=0.0, allow_inf_nan=False)

    @field_validator("length", mode="before")
    @classmethod
    def _read_length(cls, v: Any) -> float:
        return read_real(v)


class FamilyRecord(BaseModel):
    """A named twist family: the internal curve it crosses and its model."""
    name: Optional[str] = None
    curve: int = Field(default=0, ge=0)
    kind: str = Field(default="xpiece", pattern="^(xpiece|torus)$")


class SurfaceDocument(BaseModel):
    genus: Optional[int] = Field(default=None, ge=0)
    pants: Optional[List[List[Dict[str, int]]]] = None
    boundaries: Optional[List[float]] = None
    lengths: Optional[List[float]] = None
    twists: Optional[List[float]] = None
    families: List[FamilyRecord] = []
    spectrum: List[SpectrumRecord] = []

    model_config = {"extra": "forbid"}

    @field_validator("boundaries", "lengths", "twists", mode="before")
    @classmethod
    def _read_reals(cls, v: Any) -> Any:
        if v is None or not isinstance(v, list):
            return v
        return [read_real(x) for x in v]

    @field_validator("boundaries")
    @classmethod
    def _check_boundaries(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        for i, lam in enumerate(v or []):
            if not (math.isfinite(lam) and lam > -math.pi):
                raise ValueError(f"boundary {i} must be a finite real in (-pi, inf), got {lam!r}")
        return v

    @model_validator(mode="after")
    def _check_surface(self) -> "SurfaceDocument":
        coordinates = {"boundaries": self.boundaries, "lengths": self.lengths, "twists": self.twists}
        given = [k for k, v in coordinates.items() if v is not None]
        if given:
            for name, value in coordinates.items():
                if value is None:
                    raise ValueError(f"'{name}' is required alongside {given}")
        if (self.genus is None) != (self.pants is None):
            raise ValueError("'genus' and 'pants' must be given together")
        if given and self.pants is None:
            raise ValueError("coordinates need a pants graph ('genus' and 'pants')")
        if self.pants is not None:
            topology = self.topology()
            if given:
                SurfaceFN.build(topology, self.boundaries, self.lengths, self.twists)
        for record in self.spectrum:
            CurveId.parse(record.family, record.n)
        return self

    @property
    def has_surface(self) -> bool:
        return self.lengths is not None

    @property
    def n_boundaries(self) -> int:
        if self.boundaries is not None:
            return len(self.boundaries)
        slots = [s["boundary"] for p in self.pants or [] for s in p if "boundary" in s]
        return max(slots) + 1 if slots else 0

    def topology(self) -> SurfaceTopology:
        """The pants graph; boundary count from ``boundaries`` or the graph itself."""
        if self.pants is None:
            raise DomainError("Document has no pants graph")
        return SurfaceTopology(
            genus=self.genus,
            n_boundaries=self.n_boundaries,
            pants=[PantsRecord(cuffs=tuple(CuffSlot(**slot) for slot in p)) for p in self.pants],
        )

    def surface(self) -> SurfaceFN:
        if not self.has_surface:
            raise DomainError("Document has no surface coordinates")
        return SurfaceFN.build(self.topology(), self.boundaries, self.lengths, self.twists)

    def length_spectrum(self) -> LengthSpectrum:
        return LengthSpectrum.from_records(r.model_dump() for r in self.spectrum)

    def family_kind(self, curve: int) -> Optional[str]:
        for family in self.families:
            if family.curve == curve:
                return family.kind
        return None

    @classmethod
    def from_surface(cls, surface: SurfaceFN, spectrum: Optional[LengthSpectrum] = None) -> "SurfaceDocument":
        return cls(
            genus=surface.genus,
            pants=[[slot.to_dict() for slot in p.cuffs] for p in surface.pants],
            boundaries=surface.lambdas,
            lengths=list(surface.lengths),
            twists=list(surface.twists),
            spectrum=[SpectrumRecord(**r) for r in spectrum.to_records()] if spectrum else [],
        )

    def to_json(self, hex_floats: bool = False) -> Dict[str, Any]:
        """JSON-ready mapping; absent sections are omitted."""
        out: Dict[str, Any] = {}
        if self.pants is not None:
            out["genus"] = self.genus
            out["pants"] = self.pants
        for name in ("boundaries", "lengths", "twists"):
            values = getattr(self, name)
            if values is not None:
                out[name] = [write_real(x, hex_floats) for x in values]
        if self.families:
            out["families"] = [f.model_dump(exclude_none=True) for f in self.families]
        if self.spectrum:
            out["spectrum"] = [
                {"family": r.family, "n": r.n, "length": write_real(r.length, hex_floats)} for r in self.spectrum
            ]
        return out

    def dumps(self, hex_floats: bool = False) -> str:
        return json.dumps(self.to_json(hex_floats), indent=2)


def _pointer(loc) -> str:
    return "/" + "/".join(str(part) for part in loc) if loc else "/"


def load_document(text: str, source: str = "<input>") -> SurfaceDocument:
    """Validate a document held in memory.

    Raises:
        ParseError: If the text is not JSON.
        SchemaError: Listing every violation with its field pointer.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
            {"line": e.lineno, "column": e.colno},
        ) from e
    if not isinstance(data, dict):
        raise SchemaError([{"field": "/", "message": "document must be a JSON object"}])
    try:
        return SurfaceDocument.model_validate(data)
    except ValidationError as e:
        violations = [{"field": _pointer(err["loc"]), "message": err["msg"]} for err in e.errors()]
        logger.debug(f"{source}: {len(violations)} schema violations")
        raise SchemaError(violations) from None


def parse_spec(path: Union[str, Path]) -> SurfaceDocument:
    """Read and validate a UTF-8 surface document.

    Raises:
        ParseError: If the file cannot be read as UTF-8 JSON.
        SchemaError: If the JSON violates the document schema.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"Cannot read {path}: {e}", {"path": str(path)}) from e
    return load_document(text, str(path))
