"""Exception hierarchy shared by the geometry, inversion and CLI layers."""

from typing import Any, Dict, List, Optional


class ConeLengthError(Exception):
    """Base class for every error raised by the library."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_record(self) -> Dict[str, Any]:
        """Machine-readable error record (emitted on stderr by the CLI)."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class DomainError(ConeLengthError, ValueError):
    """Input outside the domain of an operation."""


class DegenerateConfiguration(DomainError):
    """The requested hyperbolic polygon does not exist."""


class ExceptionalSurface(DomainError):
    """The surface type (g, n) is one of the exceptional ones."""


class TopologyMismatch(DomainError):
    """Two surfaces do not share topology and boundary data."""


class UnsupportedTopology(DomainError):
    """The pants graph has a configuration the inversion cannot read."""


class MissingCurves(DomainError):
    """The length spectrum lacks curves needed by the inversion."""

    def __init__(self, missing: List[str], message: Optional[str] = None):
        super().__init__(
            message or f"Missing {len(missing)} required curve(s): {', '.join(missing)}",
            {"missing": list(missing)},
        )
        self.missing = list(missing)


class ParseError(DomainError):
    """A surface document is not valid JSON."""


class SchemaError(DomainError):
    """A surface document is JSON but violates the schema."""

    def __init__(self, violations: List[Dict[str, Any]]):
        pointers = "; ".join(f"{v['field']}: {v['message']}" for v in violations)
        super().__init__(f"Schema violations: {pointers}", {"violations": violations})
        self.violations = violations


class SolverError(ConeLengthError, RuntimeError):
    """A numerical solve could not produce a trustworthy answer."""


class DegenerateInput(SolverError):
    """Lengths leave the solve underdetermined (e.g. l0 = l1)."""


class InconsistentSpectrum(SolverError):
    """No admissible geometry reproduces the given lengths."""


class SingularSystem(SolverError):
    """The linear system for the boundary unknowns is (nearly) singular."""


class AmbiguousRecovery(SolverError):
    """More than one admissible answer reproduces the lengths."""

    def __init__(self, message: str, candidates: List[Any]):
        super().__init__(message, {"candidates": candidates})
        self.candidates = candidates
