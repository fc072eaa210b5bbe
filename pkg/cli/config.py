"""
Settings commands for CLI
"""
import json
from pathlib import Path

import click
import yaml
from rich.table import Table

from config.settings_manager import SettingsManager

from .output import console, json_mode, json_option


def _manager(ctx: click.Context) -> SettingsManager:
    return ctx.obj['settings_manager']


def _check_key(manager: SettingsManager, key: str):
    if key not in manager.settings.to_dict():
        raise click.BadParameter(f"unknown setting {key}", param_hint='KEY')


@click.group('config')
def config_group():
    """Show, change and export settings"""
    pass


@config_group.command('show')
@json_option
@click.pass_context
def show_settings(ctx, as_json):
    """All settings and the file they come from"""
    manager = _manager(ctx)
    values = manager.settings.to_dict()
    if json_mode(ctx, as_json):
        click.echo(json.dumps({'file': str(manager.settings_file), 'settings': values}))
        return

    table = Table(title=f"⚙️ Settings ({manager.settings_file})")
    table.add_column("Key", style="cyan")
    table.add_column("Value", style="green")
    for key, value in values.items():
        table.add_row(key, "-" if value is None else str(value))
    console.print(table)


@config_group.command('get')
@click.argument('key')
@click.pass_context
def get_cmd(ctx, key):
    """Print one setting"""
    manager = _manager(ctx)
    _check_key(manager, key)
    click.echo(json.dumps(manager.get_setting(key)))


@config_group.command('set')
@click.argument('key')
@click.argument('value')
@click.pass_context
def set_cmd(ctx, key, value):
    """Change one setting and write the settings file

    VALUE is read as a YAML scalar, so 7 is a number and null clears
    database_path.
    """
    manager = _manager(ctx)
    _check_key(manager, key)
    try:
        parsed = yaml.safe_load(value)
    except yaml.YAMLError as e:
        raise click.BadParameter(str(e), param_hint='VALUE')
    if not manager.update_setting(key, parsed):
        raise click.BadParameter(f"{value!r} is not valid for {key}", param_hint='VALUE')

    manager.save_settings()
    console.print(f"✅ {key} = {parsed!r} written to {manager.settings_file}")


@config_group.command('export')
@click.argument('path', type=click.Path(path_type=Path))
@click.option('--format', 'fmt', type=click.Choice(['yaml', 'json']), default='yaml', show_default=True)
@click.pass_context
def export_cmd(ctx, path, fmt):
    """Write the current settings to PATH"""
    _manager(ctx).export_settings(path, format=fmt)
    console.print(f"✅ Settings exported to {path}")
