"""
Shared CLI plumbing: logging setup, JSON/rich output and exit codes
"""
import functools
import logging

import click
from rich.console import Console
from rich.logging import RichHandler

from backend.api.schemas import ErrorOutput
from backend.core.farey import Slope
from backend.core.models import RecordValidationError, RuleConflictError, SurgeryInputError

console = Console()
logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 2
EXIT_CONFLICT = 3


def setup_logging(level: str):
    """Route all logging through rich on stderr"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def json_mode(ctx: click.Context, local_flag: bool) -> bool:
    return local_flag or ctx.obj.get('json', False)


def emit(ctx: click.Context, as_json: bool, model, render):
    """Print a schema object as JSON, or hand it to the rich renderer"""
    if json_mode(ctx, as_json):
        click.echo(model.model_dump_json())
    else:
        render(model)


def handle_errors(func):
    """Map rejected input to exit code 2 and rule conflicts to exit code 3"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        as_json = ctx.obj.get('json', False) or kwargs.get('as_json', False)
        try:
            return func(*args, **kwargs)
        except SurgeryInputError as e:
            diagnostics = e.diagnostics if isinstance(e, RecordValidationError) else []
            _fail(ctx, as_json, str(e), diagnostics, EXIT_INPUT_ERROR)
        except RuleConflictError as e:
            logger.error(f"Internal consistency error: {e}")
            _fail(ctx, as_json, str(e), [], EXIT_CONFLICT)
    return wrapper


def _fail(ctx: click.Context, as_json: bool, message: str, diagnostics, code: int):
    if as_json:
        click.echo(ErrorOutput(error=message, diagnostics=list(diagnostics), exit_code=code).model_dump_json())
    else:
        console.print(f"❌ {message}", markup=False)
        for line in diagnostics:
            console.print(f"   • {line}", markup=False)
    ctx.exit(code)


def json_option(func):
    return click.option('--json', 'as_json', is_flag=True, help='Machine-readable output')(func)


class SlopeType(click.ParamType):
    """Click parameter accepting p/q, integers and inf"""
    name = "slope"

    def convert(self, value, param, ctx):
        if isinstance(value, Slope):
            return value
        try:
            return Slope.parse(value)
        except SurgeryInputError as e:
            self.fail(str(e), param, ctx)


SLOPE = SlopeType()
