"""
Shared models, enums and error types for the surgery calculator
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class SurgeryInputError(ValueError):
    """Rejected input: bad coefficient, singular form, invalid facts, malformed file"""


class RecordValidationError(SurgeryInputError):
    """Ingestion failure carrying row-numbered diagnostics"""

    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        self.diagnostics = diagnostics or []
        if self.diagnostics:
            message = f"{message}: " + "; ".join(self.diagnostics)
        super().__init__(message)


class RuleConflictError(RuntimeError):
    """Two verdict rules fired with contradictory statuses"""


class Orientation(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    DEGENERATE = "degenerate"


class Direction(Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"


class Openness(Enum):
    OPEN = "open"
    HALF_OPEN_AT_FROM = "half-open-at-from"  # excludes `from`, includes `to`
    HALF_OPEN_AT_TO = "half-open-at-to"  # includes `from`, excludes `to`
    CLOSED = "closed"


class ArcEnd(Enum):
    NEAREST_TO_FROM = "nearest-to-from"
    NEAREST_TO_TO = "nearest-to-to"


class FillabilityStatus(Enum):
    FILLABLE = "Fillable"
    NOT_FILLABLE = "NotFillable"
    UNKNOWN = "Unknown"


class FillingStrength(Enum):
    """Strength ladder: Stein => exact => strong => weak"""
    WEAK = "weak"
    STRONG = "strong"
    EXACT = "exact"
    STEIN = "Stein"

    @property
    def rank(self) -> int:
        return ["weak", "strong", "exact", "Stein"].index(self.value)


class ConditionStatus(Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Citation:
    """A theorem tag plus the quoted statement it rests on"""
    tag: str
    quote: str


@dataclass
class Verdict:
    """Outcome of the fillability decision procedure"""
    status: FillabilityStatus = FillabilityStatus.UNKNOWN
    strength: Optional[FillingStrength] = None
    citations: List[Citation] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert verdict to a plain dictionary"""
        return {
            'status': self.status.value,
            'strength': self.strength.value if self.strength else None,
            'citations': [{'tag': c.tag, 'quote': c.quote} for c in self.citations],
            'details': dict(self.details),
        }
