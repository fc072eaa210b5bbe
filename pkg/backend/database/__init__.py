"""
Knot-fact storage: records, the shipped seed table, CSV ingestion and closure operations
"""

from .database_manager import (
    KnotDatabase, cable_n1, connected_sum, emit_csv, ingest_csv, parse_csv, seed_database,
    write_csv,
)
from .models import KnotFacts, KnotRecord

__all__ = [
    'KnotDatabase',
    'KnotFacts',
    'KnotRecord',
    'cable_n1',
    'connected_sum',
    'emit_csv',
    'ingest_csv',
    'parse_csv',
    'seed_database',
    'write_csv',
]
