"""
fillcheck command line
Farey queries, surgery decomposition, d3, f(tau) and fillability verdicts
"""
import logging
import sys
from pathlib import Path

import click
from rich.panel import Panel
from rich.table import Table

# Add backend to path for imports
sys.path.append(str(Path(__file__).parent.parent))

from backend.api.schemas import (
    D3TableOutput, FTableOutput, SlopeOutput, d3_output, decomposition_output,
    linking_output, rational, verdict_output,
)
from backend.core.farey import (
    CircularArc, extremal_neighbor, is_edge, mediant, parents, walk_to_one,
)
from backend.core.four_manifold import d3, d3_table, matching_structures, read_diagram, surgery_d3
from backend.core.models import (
    ArcEnd, Direction, FillabilityStatus, Openness, SurgeryInputError,
)
from backend.core.obstructions import f_lower_bound, f_of_tau, f_witness
from backend.core.rules_engine import get_rules_engine
from backend.core.surgery_calculus import LegendrianRep, decompose, linking_matrix, smooth_coefficient
from config.settings_manager import LOG_LEVELS, get_settings_manager

from .config import config_group
from .knots import knots, open_database
from .output import SLOPE, console, emit, handle_errors, json_option, setup_logging

logger = logging.getLogger(__name__)


@click.group()
@click.version_option(version="1.0.0", prog_name="fillcheck")
@click.option('--config', 'config_file', type=click.Path(path_type=Path), help='Settings file (YAML or JSON)')
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), help='Override the log level')
@click.option('--json', 'as_json', is_flag=True, help='Machine-readable output for every command')
@click.pass_context
def cli(ctx, config_file, log_level, as_json):
    """
    fillcheck - fillability of contact surgeries on Legendrian knots

    Exact Farey arithmetic, surgery decomposition, d3 and slice-genus
    obstructions, with theorem-citing verdicts.
    """
    manager = get_settings_manager(config_file)
    settings = manager.settings
    setup_logging(log_level or settings.log_level)
    ctx.ensure_object(dict)
    ctx.obj['settings_manager'] = manager
    ctx.obj['settings'] = settings
    ctx.obj['json'] = as_json or settings.output_format == "json"


# Farey commands

@cli.group()
def farey():
    """Farey tessellation queries"""
    pass


def _show_slope_result(model: SlopeOutput):
    result = model.result
    if isinstance(result, list):
        result = " → ".join(result)
    console.print(f"{model.query}: [bold cyan]{result}[/bold cyan]")


@farey.command()
@click.argument('a', type=SLOPE)
@click.argument('b', type=SLOPE)
@json_option
@click.pass_context
@handle_errors
def edge(ctx, a, b, as_json):
    """Whether A and B are joined by a Farey edge"""
    emit(ctx, as_json, SlopeOutput(query=f"edge {a} {b}", result=is_edge(a, b)), _show_slope_result)


@farey.command('mediant')
@click.argument('a', type=SLOPE)
@click.argument('b', type=SLOPE)
@json_option
@click.pass_context
@handle_errors
def mediant_cmd(ctx, a, b, as_json):
    """The Farey child of the edge A-B"""
    emit(ctx, as_json, SlopeOutput(query=f"mediant {a} {b}", result=str(mediant(a, b))), _show_slope_result)


@farey.command('parents')
@click.argument('s', type=SLOPE)
@json_option
@click.pass_context
@handle_errors
def parents_cmd(ctx, s, as_json):
    """The two Farey parents of S"""
    result = [str(x) for x in parents(s)]
    emit(ctx, as_json, SlopeOutput(query=f"parents {s}", result=result), _show_slope_result)


@farey.command()
@click.argument('r', type=SLOPE)
@click.argument('from_', metavar='FROM', type=SLOPE)
@click.argument('to', type=SLOPE)
@click.argument('direction', type=click.Choice([d.value for d in Direction]))
@click.option('--openness', type=click.Choice([o.value for o in Openness]), default=Openness.OPEN.value)
@click.option('--end', type=click.Choice([e.value for e in ArcEnd]), default=ArcEnd.NEAREST_TO_TO.value,
              help='Which end of the arc the answer should be closest to')
@json_option
@click.pass_context
@handle_errors
def extremal(ctx, r, from_, to, direction, openness, end, as_json):
    """Farey neighbor of R in the arc FROM→TO closest to one end"""
    arc = CircularArc(from_, to, Direction(direction), Openness(openness))
    neighbor = extremal_neighbor(r, arc, ArcEnd(end))
    query = f"extremal {r} in {openness} {direction} arc {from_}→{to} ({end})"
    emit(ctx, as_json, SlopeOutput(query=query, result=str(neighbor)), _show_slope_result)


@farey.command()
@click.argument('r', type=SLOPE)
@json_option
@click.pass_context
@handle_errors
def walk(ctx, r, as_json):
    """Farey path from R in (0, 1] to 1"""
    path = [str(s) for s in walk_to_one(r)]
    emit(ctx, as_json, SlopeOutput(query=f"walk {r}", result=path), _show_slope_result)


# Surgery commands

@cli.group()
def surgery():
    """Contact surgery decomposition and invariants"""
    pass


def surgery_options(func):
    func = click.option('--coef', type=SLOPE, required=True, help='Contact surgery coefficient p/q')(func)
    func = click.option('--rot', type=int, default=0, show_default=True, help='Rotation number')(func)
    func = click.option('--tb', type=int, required=True, help='Thurston-Bennequin invariant')(func)
    func = click.option('--knot', default='L', help='Label for the knot')(func)
    return func


def _show_decomposition(model):
    table = Table(title=f"🧩 Contact ({model.coefficient})-surgery on {model.knot} (tb={model.tb}, rot={model.rot})")
    table.add_column("#", style="dim")
    table.add_column("Contact", style="cyan")
    table.add_column("tb", style="green")
    table.add_column("rot", style="green")
    table.add_column("Stabilizations", style="yellow")
    table.add_column("Push-off of", style="magenta")
    table.add_column("Framing", style="bold")
    for i, c in enumerate(model.components):
        table.add_row(
            str(i), f"{c.contact_sign:+d}", str(c.tb), str(c.rot), str(c.stabilizations),
            "-" if c.parent is None else str(c.parent), str(c.smooth_framing),
        )
    console.print(table)
    console.print(f"Smooth coefficient: [bold]{model.smooth_coefficient}[/bold]   (+1)-components: {model.plus_count}")


@surgery.command('decompose')
@surgery_options
@json_option
@click.pass_context
@handle_errors
def decompose_cmd(ctx, knot, tb, rot, coef, as_json):
    """Decompose contact (r)-surgery into (±1)-surgeries"""
    rep = LegendrianRep(knot, tb, rot)
    diagram = decompose(rep, coef)
    emit(ctx, as_json, decomposition_output(diagram, smooth_coefficient(rep, coef)), _show_decomposition)


def _show_linking(model):
    table = Table(title="🔗 Linking matrix")
    for i in range(len(model.matrix)):
        table.add_column(str(i), justify="right")
    table.add_column("rot", justify="right", style="yellow")
    for row, r in zip(model.matrix, model.rot):
        table.add_row(*[str(x) for x in row], str(r))
    console.print(table)
    console.print(f"(+1)-components: {model.plus_count}")


@surgery.command()
@surgery_options
@json_option
@click.pass_context
@handle_errors
def linking(ctx, knot, tb, rot, coef, as_json):
    """Linking matrix of the decomposed surgery"""
    cob = linking_matrix(decompose(LegendrianRep(knot, tb, rot), coef))
    emit(ctx, as_json, linking_output(cob), _show_linking)


def _show_d3(model):
    table = Table(title="📐 d3 invariant")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("d3", model.d3)
    table.add_row("c²", model.c_squared)
    table.add_row("σ", str(model.sigma))
    table.add_row("χ", str(model.chi))
    table.add_row("|H₁|", str(model.h1_order))
    table.add_row("(+1)-count", str(model.plus_count))
    console.print(table)
    if model.extended_convention:
        console.print("⚠️ [yellow]Extended convention: plus-count differs from 1[/yellow]")


@surgery.command('d3')
@surgery_options
@json_option
@click.pass_context
@handle_errors
def surgery_d3_cmd(ctx, knot, tb, rot, coef, as_json):
    """d3 of contact (r)-surgery via the full pipeline"""
    emit(ctx, as_json, d3_output(surgery_d3(LegendrianRep(knot, tb, rot), coef)), _show_d3)


def _show_d3_table(model):
    table = Table(title=f"📐 Tight structures on 4n-surgery on T(2,{2 * model.n + 1}), n={model.n}")
    table.add_column("Structure", style="cyan")
    table.add_column("d3", style="green")
    for name, value in model.values.items():
        marker = " ✓" if name in model.matching_structures else ""
        table.add_row(name + marker, value)
    console.print(table)
    console.print(f"Same d3 as xi_n: {', '.join(model.matching_structures) or 'none'}")


@cli.command('d3')
@click.option('--diagram', type=click.Path(path_type=Path), help='Diagram file: dimension, matrix rows, rot vector, plus-count')
@click.option('--table', 'table_n', type=int, help='d3 table for 4n-surgery on T(2,2n+1)')
@json_option
@click.pass_context
@handle_errors
def d3_cmd(ctx, diagram, table_n, as_json):
    """d3 from a diagram file, or the T(2,2n+1) table"""
    if (diagram is None) == (table_n is None):
        raise SurgeryInputError("give exactly one of --diagram or --table")
    if diagram is not None:
        emit(ctx, as_json, d3_output(d3(read_diagram(diagram))), _show_d3)
        return
    values = d3_table(table_n)
    model = D3TableOutput(
        n=table_n,
        values={name: rational(v) for name, v in values.items()},
        matching_structures=matching_structures(table_n),
    )
    emit(ctx, as_json, model, _show_d3_table)


# f(tau)

def _show_f_table(model: FTableOutput):
    table = Table(title="📈 f(τ)")
    table.add_column("τ", style="cyan", justify="right")
    table.add_column("f(τ)", style="green", justify="right")
    table.add_column("Lower bound", style="yellow", justify="right")
    if model.witnesses is not None:
        table.add_column("Witness", style="magenta")
    for t, value in model.values.items():
        row = [str(t), str(value), str(model.lower_bounds[t])]
        if model.witnesses is not None:
            row.append(", ".join(str(d) for d in model.witnesses[t]) or "()")
        table.add_row(*row)
    console.print(table)


def _show_f_values(model: FTableOutput):
    click.echo(", ".join(str(v) for v in model.values.values()))


@cli.command()
@click.argument('t', type=int, required=False)
@click.option('--table', 'table_max', type=int, is_flag=False, flag_value=-1, default=None,
              help='Tabulate f for 0..MAX (default from settings)')
@click.option('--details', is_flag=True, help='Table with lower bounds instead of the bare values')
@click.option('--witness', is_flag=True, help='Show an optimal tuple')
@json_option
@click.pass_context
@handle_errors
def ftau(ctx, t, table_max, details, witness, as_json):
    """f(T): min sum d_i^2 subject to sum (d_i^2 - d_i) >= 2T"""
    if table_max is not None:
        top = ctx.obj['settings'].f_table_default if table_max == -1 else table_max
        if top < 0:
            raise SurgeryInputError("table size cannot be negative")
        taus = list(range(top + 1))
    elif t is not None:
        taus = [t]
    else:
        raise SurgeryInputError("give T or --table")

    model = FTableOutput(
        values={s: f_of_tau(s) for s in taus},
        lower_bounds={s: f_lower_bound(s) for s in taus},
        witnesses={s: list(f_witness(s)) for s in taus} if witness else None,
    )
    emit(ctx, as_json, model, _show_f_table if details or witness else _show_f_values)


# Verdicts

STATUS_STYLE = {
    FillabilityStatus.FILLABLE.value: "bold green",
    FillabilityStatus.NOT_FILLABLE.value: "bold red",
    FillabilityStatus.UNKNOWN.value: "bold yellow",
}


def _show_verdict(model):
    style = STATUS_STYLE.get(model.status, "bold")
    strength = f" ({model.strength})" if model.strength else ""
    title = f"Contact ({model.coefficient})-surgery on {model.knot} (tb={model.tb}, rot={model.rot})"
    console.print(Panel(f"[{style}]{model.status}{strength}[/{style}]", title=title))

    if model.citations:
        console.print("[bold]Citations:[/bold]")
        for c in model.citations:
            console.print(f"  • [cyan]{c.tag}[/cyan]: {c.quote}")

    table = Table(title="Details")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    for key, value in model.details.model_dump().items():
        if key in ('notes', 'necessary_conditions') or value is None:
            continue
        table.add_row(key, ", ".join(value) if isinstance(value, list) else str(value))
    console.print(table)

    if model.details.necessary_conditions:
        for name, status in model.details.necessary_conditions.items():
            console.print(f"  {name}: {status}")
    for note in model.details.notes:
        console.print(f"📝 [italic]{note}[/italic]")


@cli.command()
@click.option('--knot', required=True, help='Knot name, e.g. 0_1, m9_46, T(2,5), P(-5,-3,3)')
@click.option('--tb', type=int, help='Thurston-Bennequin invariant (default: maximal tb)')
@click.option('--rot', type=int, default=0, show_default=True, help='Rotation number')
@click.option('--coef', type=SLOPE, required=True, help='Contact surgery coefficient p/q')
@click.option('--db', 'db_path', type=click.Path(path_type=Path), help='Knot CSV merged over the seed table')
@json_option
@click.pass_context
@handle_errors
def obstruct(ctx, knot, tb, rot, coef, db_path, as_json):
    """Fillability verdict for contact (r)-surgery on a knot"""
    record = open_database(ctx, db_path).lookup(knot)
    logger.debug(f"Resolved {knot} to record {record.name}")
    if tb is None:
        tb = record.facts.max_tb
        if tb is None:
            raise SurgeryInputError(f"maximal tb of {record.name} is unknown; pass --tb")
    rep = LegendrianRep(record.name, tb, rot)
    verdict = get_rules_engine().evaluate(rep, record.facts, coef)
    emit(ctx, as_json, verdict_output(verdict, record.name, tb, rot, coef), _show_verdict)


cli.add_command(knots)
cli.add_command(config_group)


if __name__ == '__main__':
    cli()
