"""
Knot-fact records for the fillability database
"""
import logging
import math
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

# CSV column for each fact, in schema order
FACT_COLUMNS = {
    'max_tb': 'max_tb',
    'tau': 'tau',
    'slice': 'slice',
    'quasipositive': 'quasipositive',
    'bounds_lagrangian_disk': 'disk',
    'decomposable': 'decomposable',
    'regular': 'regular',
    'no_tight_positive_surgery': 'no_tight_positive',
    'epsilon': 'epsilon',
}
INTEGER_FACTS = ('max_tb', 'tau', 'epsilon')
BOOLEAN_FACTS = (
    'slice', 'quasipositive', 'bounds_lagrangian_disk', 'decomposable', 'regular',
    'no_tight_positive_surgery',
)
CSV_HEADER = [
    'name', 'max_tb', 'tau', 'slice', 'quasipositive', 'disk', 'decomposable', 'regular',
    'torus_p', 'torus_q', 'no_tight_positive', 'epsilon', 'provenance',
]


@dataclass(frozen=True)
class KnotFacts:
    """Ingested facts about a knot type; None means unknown"""
    tau: Optional[int] = None
    slice: Optional[bool] = None
    quasipositive: Optional[bool] = None
    max_tb: Optional[int] = None
    bounds_lagrangian_disk: Optional[bool] = None
    decomposable: Optional[bool] = None
    regular: Optional[bool] = None
    torus: Optional[Tuple[int, int]] = None
    no_tight_positive_surgery: Optional[bool] = None
    epsilon: Optional[int] = None

    @property
    def has_disk(self) -> bool:
        """Some tb=-1, rot=0 representative bounds a Lagrangian disk (directly or by implication)"""
        return bool(self.bounds_lagrangian_disk or self.regular or self.decomposable)

    @property
    def stein_disk(self) -> bool:
        return bool(self.regular or self.decomposable)

    def known_fields(self) -> List[str]:
        return [f.name for f in fields(self) if getattr(self, f.name) is not None]

    def validate(self) -> List[str]:
        """Validate facts and return list of errors"""
        errors = []

        if self.decomposable is True and self.regular is False:
            errors.append("decomposable disk must be regular")
        if self.decomposable is True and self.bounds_lagrangian_disk is False:
            errors.append("decomposable disk implies a Lagrangian disk")
        if self.regular is True and self.bounds_lagrangian_disk is False:
            errors.append("regular disk implies a Lagrangian disk")

        if self.has_disk:
            if self.slice is False:
                errors.append("a Lagrangian disk makes the knot slice")
            if self.quasipositive is False:
                errors.append("a Lagrangian disk makes the knot quasipositive")
            if self.tau not in (None, 0):
                errors.append(f"a Lagrangian disk forces tau = 0, got {self.tau}")
            if self.epsilon not in (None, 0):
                errors.append(f"a Lagrangian disk forces epsilon = 0, got {self.epsilon}")
            if self.max_tb is not None and self.max_tb < -1:
                errors.append(f"a Lagrangian disk needs a tb = -1 representative, max_tb is {self.max_tb}")

        if self.slice is True and self.tau not in (None, 0):
            errors.append(f"slice knots have tau = 0, got {self.tau}")

        if self.torus is not None:
            p, q = self.torus
            if p < 2 or q < 2 or math.gcd(p, q) != 1:
                errors.append(f"torus parameters ({p},{q}) must be coprime and at least 2")
            elif p > q:
                errors.append(f"torus parameters must be stored with p < q, got ({p},{q})")
            else:
                if self.max_tb is not None and self.max_tb != p * q - p - q:
                    errors.append(f"T({p},{q}) has max_tb {p * q - p - q}, got {self.max_tb}")
                if self.tau is not None and self.tau != (p - 1) * (q - 1) // 2:
                    errors.append(f"T({p},{q}) has tau {(p - 1) * (q - 1) // 2}, got {self.tau}")
            if self.slice is True:
                errors.append("nontrivial torus knots are not slice")
            if self.bounds_lagrangian_disk is True:
                errors.append("nontrivial torus knots bound no Lagrangian disk")
            if self.no_tight_positive_surgery is True:
                errors.append("large contact surgeries on max-tb torus knots are tight")

        return errors


@dataclass(frozen=True)
class KnotRecord:
    """A named knot type with its facts and where each fact comes from"""
    name: str
    facts: KnotFacts = field(default_factory=KnotFacts)
    provenance: Dict[str, str] = field(default_factory=dict)
    synthetic: bool = False
    derived_from: Tuple[str, ...] = ()
    same_as: Optional[str] = None  # set when a closure operation returns a known knot

    def validate(self) -> List[str]:
        errors = [f"{self.name}: {e}" for e in self.facts.validate()]
        if not self.name:
            errors.append("record name is empty")
        if not self.synthetic:
            for name in self.facts.known_fields():
                if not self.provenance.get(name):
                    errors.append(f"{self.name}: field {name} has no provenance")
        errors.extend(f"{self.name}: {p}" for p in provenance_problems(self.provenance))
        return errors

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        facts = {f.name: getattr(self.facts, f.name) for f in fields(self.facts)}
        if facts['torus'] is not None:
            facts['torus'] = list(facts['torus'])
        return {
            'name': self.name,
            'facts': facts,
            'provenance': dict(self.provenance),
            'synthetic': self.synthetic,
            'derived_from': list(self.derived_from),
            'same_as': self.same_as,
        }


def format_cell(value: Any) -> str:
    """Render a fact for CSV: empty for unknown, lowercase booleans"""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


def parse_bool(text: str) -> Optional[bool]:
    raw = text.strip()
    if raw == '':
        return None
    if raw == 'true':
        return True
    if raw == 'false':
        return False
    raise ValueError(f"expected true/false, got {raw!r}")


def parse_int(text: str) -> Optional[int]:
    raw = text.strip()
    if raw == '':
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"expected an integer, got {raw!r}") from None


PROVENANCE_SEPARATOR = ' | '
_FACT_NAMES = frozenset(f.name for f in fields(KnotFacts))


def _field_prefix(part: str) -> Optional[str]:
    head, sep, _ = part.strip().partition(': ')
    return head if sep and head in _FACT_NAMES else None


def provenance_problems(provenance: Dict[str, str]) -> List[str]:
    """Texts that would be read back differently once written to a provenance cell"""
    problems = []
    for name, text in provenance.items():
        parts = text.split(PROVENANCE_SEPARATOR)
        if any(_field_prefix(part) for part in parts[1:]):
            problems.append(f"provenance of {name} has a '{PROVENANCE_SEPARATOR.strip()} field:' segment")
    return problems


def format_provenance(provenance: Dict[str, str], known: List[str]) -> str:
    """Collapse per-field provenance: the commonest text is bare, the rest `field: text`"""
    texts = [provenance[name] for name in known if provenance.get(name)]
    if not texts:
        return ''
    default = max(texts, key=lambda t: (texts.count(t), -texts.index(t)))
    if _field_prefix(default.split(PROVENANCE_SEPARATOR)[0]):
        # a bare text starting like `tau: ...` would be read as field-specific
        default = ''
    parts = [default] if default else []
    for name in known:
        text = provenance.get(name)
        if text and text != default:
            parts.append(f"{name}: {text}")
    return PROVENANCE_SEPARATOR.join(parts)


def parse_provenance(cell: str, known: List[str]) -> Dict[str, str]:
    """Inverse of format_provenance.

    The cell opens with an optional bare text that applies to every field,
    followed by `field: text` entries. A segment without a field prefix
    continues the entry before it, so free text may itself contain the
    separator.
    """
    default_parts: List[str] = []
    specific: Dict[str, List[str]] = {}
    current = default_parts
    for part in cell.strip().split(PROVENANCE_SEPARATOR) if cell.strip() else []:
        name = _field_prefix(part)
        if name is None:
            current.append(part)
            continue
        if name in specific:
            raise ValueError(f"provenance names {name} twice")
        current = specific[name] = [part.strip().partition(': ')[2]]
    default = PROVENANCE_SEPARATOR.join(default_parts).strip()
    joined = {name: PROVENANCE_SEPARATOR.join(parts).strip() for name, parts in specific.items()}
    return {name: joined.get(name, default) for name in known if joined.get(name, default)}
