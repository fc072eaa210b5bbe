"""
Knot database for the fillability engine
Loads the shipped seed table and user CSV files, resolves parametric
families, and derives records under connected sum and (n,1)-cabling
"""
import csv
import io
import logging
import math
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from ..core.models import RecordValidationError, SurgeryInputError
from .models import (
    CSV_HEADER, FACT_COLUMNS, INTEGER_FACTS, KnotFacts, KnotRecord,
    format_cell, format_provenance, parse_bool, parse_int, parse_provenance,
)

logger = logging.getLogger(__name__)

SEED_CSV = Path(__file__).parent / "seed_knots.csv"
UNKNOT = "0_1"
PRETZEL_ALIAS = "m9_46"  # P(-3,-3,3)

_TORUS_RE = re.compile(r"^T\((\d+),(\d+)\)$")
_PRETZEL_RE = re.compile(r"^P\(-(\d+),-3,3\)$")


class KnotDatabase:
    """Name-indexed knot records plus synthetic records from closure operations"""

    def __init__(self,
                 records: Optional[Iterable[KnotRecord]] = None,
                 pretzel_max_m: int = 100,
                 source: str = "memory"):
        self.records: Dict[str, KnotRecord] = {}
        self.derived: Dict[str, KnotRecord] = {}
        self.pretzel_max_m = pretzel_max_m
        self.source = source
        for record in records or ():
            if record.name in self.records:
                raise RecordValidationError("Duplicate knot name", [record.name])
            self.records[record.name] = record

    def __contains__(self, name: str) -> bool:
        try:
            self.lookup(name)
            return True
        except SurgeryInputError:
            return False

    def __len__(self) -> int:
        return len(self.records)

    def names(self) -> List[str]:
        return list(self.records)

    def lookup(self, name: str) -> KnotRecord:
        """Resolve stored, synthetic, T(p,q) and P(-3-m,-3,3) names"""
        name = name.strip()
        if name in self.records:
            return self.records[name]
        if name in self.derived:
            return self.derived[name]

        match = _TORUS_RE.match(name)
        if match:
            return self._torus_record(int(match.group(1)), int(match.group(2)))

        match = _PRETZEL_RE.match(name)
        if match:
            return self._pretzel_record(int(match.group(1)) - 3)

        raise SurgeryInputError(f"Unknown knot: {name}")

    def _torus_record(self, p: int, q: int) -> KnotRecord:
        p, q = min(p, q), max(p, q)
        name = f"T({p},{q})"
        if name in self.records:
            return self.records[name]
        if p < 2 or math.gcd(p, q) != 1:
            raise SurgeryInputError(f"{name} is not a nontrivial torus knot")
        source = "positive torus knot generator: tb = pq-p-q, tau = (p-1)(q-1)/2"
        facts = KnotFacts(max_tb=p * q - p - q, tau=(p - 1) * (q - 1) // 2, torus=(p, q))
        return KnotRecord(
            name=name, facts=facts,
            provenance={f: source for f in facts.known_fields()},
            synthetic=True,
        )

    def _pretzel_record(self, m: int) -> KnotRecord:
        if m < 0:
            raise SurgeryInputError("pretzel family P(-3-m,-3,3) needs m >= 0")
        if m == 0 and PRETZEL_ALIAS in self.records:
            return self.records[PRETZEL_ALIAS]
        if m > self.pretzel_max_m:
            raise SurgeryInputError(
                f"pretzel parameter m={m} exceeds the configured limit {self.pretzel_max_m}"
            )
        source = "P(-3-m,-3,3) family: half-ribbon twists on m9_46 keep a Lagrangian disk"
        return KnotRecord(
            name=f"P({-3 - m},-3,3)",
            facts=KnotFacts(bounds_lagrangian_disk=True),
            provenance={'bounds_lagrangian_disk': source},
            synthetic=True,
        )

    def add_derived(self, record: KnotRecord) -> KnotRecord:
        """Store a closure-derived record; ingested records are never shadowed"""
        if record.name in self.records:
            logger.warning(f"Derived record {record.name} ignored: an ingested record has that name")
            return self.records[record.name]
        if record.name in record.derived_from:
            raise SurgeryInputError(f"{record.name} cannot derive from itself")
        self.derived[record.name] = record
        return record

    def merge(self, other: 'KnotDatabase') -> 'KnotDatabase':
        """New database with other's records layered over ours"""
        merged = KnotDatabase(pretzel_max_m=self.pretzel_max_m, source=f"{self.source}+{other.source}")
        merged.records.update(self.records)
        for name, record in other.records.items():
            if name in merged.records and merged.records[name] != record:
                logger.warning(f"Record {name} from {other.source} replaces the one from {self.source}")
            merged.records[name] = record
        return merged

    def get_statistics(self) -> Dict[str, int]:
        """Counts over the stored records"""
        stored = list(self.records.values())
        return {
            'records': len(stored),
            'derived': len(self.derived),
            'disk': sum(1 for r in stored if r.facts.has_disk),
            'decomposable': sum(1 for r in stored if r.facts.decomposable),
            'torus': sum(1 for r in stored if r.facts.torus),
            'no_tight_positive': sum(1 for r in stored if r.facts.no_tight_positive_surgery),
        }


def _row_to_record(row: List[str], line: int) -> Tuple[Optional[KnotRecord], List[str]]:
    errors = []
    if len(row) != len(CSV_HEADER):
        return None, [f"row {line}: expected {len(CSV_HEADER)} columns, found {len(row)}"]
    cells = dict(zip(CSV_HEADER, row))
    name = cells['name'].strip()
    if not name:
        errors.append(f"row {line}: empty name")

    values = {}
    for attr, column in FACT_COLUMNS.items():
        parser = parse_int if attr in INTEGER_FACTS else parse_bool
        try:
            values[attr] = parser(cells[column])
        except ValueError as e:
            errors.append(f"row {line}: {column}: {e}")

    try:
        tp, tq = parse_int(cells['torus_p']), parse_int(cells['torus_q'])
        if (tp is None) != (tq is None):
            errors.append(f"row {line}: torus_p and torus_q must both be set or both empty")
        elif tp is not None:
            values['torus'] = (tp, tq)
    except ValueError as e:
        errors.append(f"row {line}: torus: {e}")

    if errors:
        return None, errors

    facts = KnotFacts(**values)
    try:
        provenance = parse_provenance(cells['provenance'], facts.known_fields())
    except ValueError as e:
        return None, [f"row {line}: provenance: {e}"]
    record = KnotRecord(name=name, facts=facts, provenance=provenance)
    errors.extend(f"row {line}: {e}" for e in record.validate())
    return (None if errors else record), errors


def parse_csv(text: str, source: str = "<string>", pretzel_max_m: int = 100) -> KnotDatabase:
    """Parse knot CSV text, collecting every problem before rejecting"""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise RecordValidationError(
            f"Malformed knot file {source}", ["row 1: header must be " + ",".join(CSV_HEADER)]
        )

    records: List[KnotRecord] = []
    seen: Dict[str, int] = {}
    diagnostics: List[str] = []
    for line, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        record, errors = _row_to_record(row, line)
        diagnostics.extend(errors)
        if record is None:
            continue
        if record.name in seen:
            diagnostics.append(f"row {line}: duplicate name {record.name} (first on row {seen[record.name]})")
            continue
        seen[record.name] = line
        records.append(record)

    if diagnostics:
        for message in diagnostics:
            logger.error(message)
        raise RecordValidationError(f"Rejected knot file {source}", diagnostics)

    logger.debug(f"Parsed {len(records)} knot records from {source}")
    return KnotDatabase(records, pretzel_max_m=pretzel_max_m, source=source)


def ingest_csv(path: Path, pretzel_max_m: int = 100) -> KnotDatabase:
    """Load a knot CSV file"""
    path = Path(path)
    if not path.exists():
        raise RecordValidationError(f"Knot file not found: {path}")
    db = parse_csv(path.read_text(encoding='utf-8'), source=str(path), pretzel_max_m=pretzel_max_m)
    logger.info(f"Loaded {len(db)} knot records from {path}")
    return db


def seed_database(pretzel_max_m: int = 100) -> KnotDatabase:
    """The shipped knot table"""
    return ingest_csv(SEED_CSV, pretzel_max_m=pretzel_max_m)


def emit_csv(db: KnotDatabase) -> str:
    """Render the stored (non-derived) records in the ingestion schema"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for record in db.records.values():
        facts = record.facts
        cells = {column: format_cell(getattr(facts, attr)) for attr, column in FACT_COLUMNS.items()}
        cells['name'] = record.name
        cells['torus_p'] = format_cell(facts.torus[0] if facts.torus else None)
        cells['torus_q'] = format_cell(facts.torus[1] if facts.torus else None)
        cells['provenance'] = format_provenance(record.provenance, facts.known_fields())
        writer.writerow([cells[column] for column in CSV_HEADER])
    return buffer.getvalue()


def write_csv(db: KnotDatabase, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_csv(db), encoding='utf-8')
    logger.info(f"Wrote {len(db)} knot records to {path}")


def _is_unknot(record: KnotRecord) -> bool:
    return record.name == UNKNOT or record.same_as == UNKNOT


def _both_true(a: Optional[bool], b: Optional[bool]) -> Optional[bool]:
    # Only the positive conclusion is known; anything else stays unknown.
    return True if a is True and b is True else None


def connected_sum(a: KnotRecord, b: KnotRecord) -> KnotRecord:
    """Synthetic a#b carrying only the disk and decomposable flags"""
    name = f"{a.name}#{b.name}"
    if _is_unknot(a) or _is_unknot(b):
        other = b if _is_unknot(a) else a
        return KnotRecord(
            name=name, facts=other.facts, provenance=dict(other.provenance), synthetic=True,
            derived_from=(a.name, b.name), same_as=other.same_as or other.name,
        )
    facts = KnotFacts(
        bounds_lagrangian_disk=_both_true(a.facts.has_disk, b.facts.has_disk),
        decomposable=_both_true(a.facts.decomposable, b.facts.decomposable),
    )
    source = "connected sum of disjoint (decomposable) Lagrangian disks"
    return KnotRecord(
        name=name, facts=facts, provenance={f: source for f in facts.known_fields()},
        synthetic=True, derived_from=(a.name, b.name),
    )


def cable_n1(a: KnotRecord, n: int) -> KnotRecord:
    """Synthetic (n,1)-cable carrying only the disk and decomposable flags"""
    if not isinstance(n, int) or n < 1:
        raise SurgeryInputError(f"cable parameter must be a positive integer, got {n!r}")
    name = f"{a.name}_({n},1)"
    if _is_unknot(a) or n == 1:
        # The (n,1)-cable of the unknot is the unknot, and the (1,1)-cable is the knot.
        return KnotRecord(
            name=name, facts=a.facts, provenance=dict(a.provenance), synthetic=True,
            derived_from=(a.name,), same_as=a.same_as or a.name,
        )
    facts = KnotFacts(
        bounds_lagrangian_disk=True if a.facts.has_disk else None,
        decomposable=True if a.facts.decomposable else None,
    )
    source = "(n,1)-cable of a knot bounding a (decomposable) Lagrangian disk"
    return KnotRecord(
        name=name, facts=facts, provenance={f: source for f in facts.known_fields()},
        synthetic=True, derived_from=(a.name,),
    )

