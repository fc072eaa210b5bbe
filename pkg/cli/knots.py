"""
Knot database commands for CLI
"""
import json
import sys
from pathlib import Path
from typing import Optional

import click
from rich.panel import Panel
from rich.table import Table

# Add backend to path for imports
sys.path.append(str(Path(__file__).parent.parent))

from backend.api.schemas import KnotOutput, knot_output
from backend.database.database_manager import (
    KnotDatabase, cable_n1, connected_sum, ingest_csv, seed_database, write_csv,
)
from backend.database.models import KnotRecord

from .output import console, emit, handle_errors, json_mode, json_option


def open_database(ctx: click.Context, db_path: Optional[Path] = None) -> KnotDatabase:
    """Seed table, with --db (or the configured database_path) merged over it"""
    settings = ctx.obj['settings']
    db = seed_database(pretzel_max_m=settings.pretzel_max_m)
    path = db_path or settings.database_path
    if path:
        db = db.merge(ingest_csv(Path(path), pretzel_max_m=settings.pretzel_max_m))
    return db


def _flag(value) -> str:
    if value is None:
        return "[dim]?[/dim]"
    if isinstance(value, bool):
        return "[green]yes[/green]" if value else "[red]no[/red]"
    return str(value)


def _show_record(model: KnotOutput):
    lines = []
    for key, value in model.facts.items():
        if value is None:
            continue
        source = model.provenance.get(key, "")
        lines.append(f"[bold]{key}:[/bold] {_flag(value)}  [dim]{source}[/dim]")
    if not lines:
        lines.append("[dim]no known facts[/dim]")
    if model.synthetic:
        lines.append("")
        lines.append(f"[yellow]Synthetic[/yellow], derived from: {', '.join(model.derived_from) or 'generator'}")
    if model.same_as:
        lines.append(f"Same knot as: [cyan]{model.same_as}[/cyan]")
    console.print(Panel("\n".join(lines), title=f"Knot: {model.name}"))


def _emit_record(ctx: click.Context, as_json: bool, record: KnotRecord):
    emit(ctx, as_json, knot_output(record), _show_record)


def db_option(func):
    return click.option('--db', 'db_path', type=click.Path(path_type=Path),
                        help='Knot CSV merged over the seed table')(func)


def _common(func):
    func = handle_errors(func)
    func = click.pass_context(func)
    func = json_option(func)
    return db_option(func)


@click.group()
def knots():
    """Browse and combine knot records"""
    pass


@knots.command('list')
@click.option('--torus', is_flag=True, help='Also list generated positive torus knots')
@_common
def list_knots(ctx, torus, as_json, db_path):
    """List all knot records"""
    db = open_database(ctx, db_path)
    records = [db.lookup(name) for name in db.names()]
    if torus:
        max_q = ctx.obj['settings'].torus_max_q
        for q in range(3, max_q + 1):
            for p in range(2, q):
                name = f"T({p},{q})"
                if name not in db.records and name in db:
                    records.append(db.lookup(name))

    if json_mode(ctx, as_json):
        click.echo(json.dumps([knot_output(r).model_dump() for r in records]))
        return

    table = Table(title=f"🪢 Knots ({db.source})")
    table.add_column("Name", style="cyan")
    table.add_column("max tb", justify="right")
    table.add_column("τ", justify="right")
    table.add_column("Slice")
    table.add_column("QP")
    table.add_column("Disk")
    table.add_column("Decomposable")
    table.add_column("No tight +")
    for r in records:
        f = r.facts
        table.add_row(
            r.name, _flag(f.max_tb), _flag(f.tau), _flag(f.slice), _flag(f.quasipositive),
            _flag(f.bounds_lagrangian_disk), _flag(f.decomposable), _flag(f.no_tight_positive_surgery),
        )
    console.print(table)

    stats = db.get_statistics()
    console.print(f"\n📊 {stats['records']} records, {stats['disk']} bounding Lagrangian disks")


@knots.command()
@click.argument('name')
@_common
def show(ctx, name, as_json, db_path):
    """Show a knot record with provenance"""
    _emit_record(ctx, as_json, open_database(ctx, db_path).lookup(name))


@knots.command('sum')
@click.argument('a')
@click.argument('b')
@_common
def sum_cmd(ctx, a, b, as_json, db_path):
    """Connected sum A#B (disk and decomposable flags only)"""
    db = open_database(ctx, db_path)
    record = db.add_derived(connected_sum(db.lookup(a), db.lookup(b)))
    _emit_record(ctx, as_json, record)


@knots.command()
@click.argument('name')
@click.argument('n', type=int)
@_common
def cable(ctx, name, n, as_json, db_path):
    """(N,1)-cable of NAME (disk and decomposable flags only)"""
    db = open_database(ctx, db_path)
    record = db.add_derived(cable_n1(db.lookup(name), n))
    _emit_record(ctx, as_json, record)


@knots.command()
@click.argument('output', type=click.Path(path_type=Path))
@_common
def export(ctx, output, as_json, db_path):
    """Write the (merged) knot table as CSV"""
    db = open_database(ctx, db_path)
    write_csv(db, output)
    console.print(f"✅ Exported {len(db)} records to: [cyan]{output}[/cyan]")
