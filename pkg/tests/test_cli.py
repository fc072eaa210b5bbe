#!/usr/bin/env python3
"""
Tests for the fillcheck command line
"""
import json
import sys
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from cli.main import cli
from cli.output import EXIT_CONFLICT, EXIT_INPUT_ERROR
from config.settings_manager import DEFAULT_SETTINGS_FILE, get_settings_manager


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(cli, ['--log-level', 'ERROR', *args])


def run_json(runner, *args):
    result = run(runner, '--json', *args)
    lines = [line for line in result.output.strip().splitlines() if line.startswith(('{', '['))]
    return result, json.loads(lines[-1])


class TestFtau:

    def test_table(self, runner):
        result = run(runner, 'ftau', '--table', '5')
        assert result.exit_code == 0
        assert result.output == "0, 4, 8, 9, 13, 16\n"

    def test_default_table_size(self, runner):
        result = run(runner, 'ftau', '--table')
        assert result.exit_code == 0
        assert result.output == "0, 4, 8, 9, 13, 16\n"

    def test_single_value(self, runner):
        assert run(runner, 'ftau', '4').output == "13\n"

    def test_details_table(self, runner):
        result = run(runner, 'ftau', '--table', '3', '--details')
        assert result.exit_code == 0
        assert "Lower bound" in result.output
        assert "0, 4, 8, 9" not in result.output

    def test_json_witness(self, runner):
        result, data = run_json(runner, 'ftau', '4', '--witness')
        assert result.exit_code == 0
        assert data['values'] == {'4': 13}
        assert data['witnesses'] == {'4': [3, 2]}
        assert data['lower_bounds'] == {'4': 12}

    def test_negative_tau(self, runner):
        result = run(runner, 'ftau', '--', '-1')
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_needs_argument(self, runner):
        assert run(runner, 'ftau').exit_code == EXIT_INPUT_ERROR


class TestFarey:

    def test_mediant(self, runner):
        result, data = run_json(runner, 'farey', 'mediant', '1/2', '1/3')
        assert result.exit_code == 0
        assert data['result'] == "2/5"

    def test_parents(self, runner):
        _, data = run_json(runner, 'farey', 'parents', '2/5')
        assert data['result'] == ["1/3", "1/2"]

    def test_edge(self, runner):
        _, data = run_json(runner, 'farey', 'edge', '0', 'inf')
        assert data['result'] is True

    def test_extremal(self, runner):
        _, data = run_json(runner, 'farey', 'extremal', '3', '3', '0', 'counterclockwise')
        assert data['result'] == "2/1"

    def test_walk(self, runner):
        _, data = run_json(runner, 'farey', 'walk', '2/5')
        assert data['result'] == ["2/5", "1/2", "1/1"]

    def test_malformed_slope(self, runner):
        result = run(runner, 'farey', 'mediant', 'x', '1')
        assert result.exit_code != 0

    def test_non_neighbors(self, runner):
        result, data = run_json(runner, 'farey', 'mediant', '1', '3')
        assert result.exit_code == EXIT_INPUT_ERROR
        assert data['exit_code'] == EXIT_INPUT_ERROR


class TestSurgery:

    def test_decompose(self, runner):
        result, data = run_json(
            runner, 'surgery', 'decompose', '--knot', 'T(2,3)', '--tb', '1', '--coef', '3'
        )
        assert result.exit_code == 0
        assert data['smooth_coefficient'] == "4/1"
        assert [c['contact_sign'] for c in data['components']] == [1, -1, -1]

    def test_linking(self, runner):
        _, data = run_json(runner, 'surgery', 'linking', '--tb', '1', '--coef', '3')
        assert data['matrix'] == [[2, 1, 1], [1, -1, 0], [1, 0, -1]]
        assert data['rot'] == [0, -1, -1]

    def test_d3(self, runner):
        _, data = run_json(runner, 'surgery', 'd3', '--tb', '3', '--coef', '5')
        assert data['d3'] == "1/4"
        assert data['h1_order'] == 8

    def test_rejects_zero_coefficient(self, runner):
        result = run(runner, 'surgery', 'decompose', '--tb', '1', '--coef', '0')
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_rejects_negative_coefficient(self, runner):
        result = run(runner, 'surgery', 'd3', '--tb', '1', '--coef', '-3/2')
        assert result.exit_code == EXIT_INPUT_ERROR


class TestD3Command:

    def test_table(self, runner):
        _, data = run_json(runner, 'd3', '--table', '3')
        assert data['values']['xi_n'] == "1/2"
        assert data['values']['theta_1'] == "1/4"
        assert data['matching_structures'] == ['eta_1', 'eta_2']

    def test_diagram(self, runner, tmp_path):
        path = tmp_path / "diagram.txt"
        path.write_text("3\n2 1 1\n1 -1 0\n1 0 -1\n0 -1 -1\n1\n")
        _, data = run_json(runner, 'd3', '--diagram', str(path))
        assert data['d3'] == "0/1"
        assert data['sigma'] == -1

    def test_singular_diagram(self, runner, tmp_path):
        path = tmp_path / "singular.txt"
        path.write_text("1\n0\n0\n1\n")
        assert run(runner, 'd3', '--diagram', str(path)).exit_code == EXIT_INPUT_ERROR

    def test_malformed_diagram(self, runner, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2\n1 0\n")
        result, data = run_json(runner, 'd3', '--diagram', str(path))
        assert result.exit_code == EXIT_INPUT_ERROR
        assert data['diagnostics']

    def test_needs_exactly_one_source(self, runner):
        assert run(runner, 'd3').exit_code == EXIT_INPUT_ERROR


class TestObstruct:

    def test_trefoil(self, runner):
        result, data = run_json(runner, 'obstruct', '--knot', 'T(2,3)', '--coef', '3')
        assert result.exit_code == 0
        assert data['status'] == "Fillable"
        assert data['strength'] == "Stein"
        assert data['tb'] == 1
        assert data['details']['d3'] == "0/1"
        assert data['citations'][0]['tag'] == "torus-2-2n+1"

    def test_trefoil_below_threshold(self, runner):
        _, data = run_json(runner, 'obstruct', '--knot', 'T(2,3)', '--coef', '2')
        assert data['status'] == "NotFillable"
        assert data['details']['threshold'] == "2/1"

    def test_disk_knot(self, runner):
        result = run(runner, 'obstruct', '--knot', 'm9_46', '--coef', '1')
        assert result.exit_code == 0
        assert "Fillable" in result.output

    def test_unknown_knot(self, runner):
        result = run(runner, 'obstruct', '--knot', 'nope', '--coef', '1')
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_tb_above_max(self, runner):
        result = run(runner, 'obstruct', '--knot', 'T(2,3)', '--tb', '4', '--coef', '3')
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_user_database(self, runner, tmp_path):
        path = tmp_path / "knots.csv"
        path.write_text(
            "name,max_tb,tau,slice,quasipositive,disk,decomposable,regular,"
            "torus_p,torus_q,no_tight_positive,epsilon,provenance\n"
            "mine,-1,,,,true,,,,,,,my notes\n"
        )
        _, data = run_json(runner, 'obstruct', '--knot', 'mine', '--coef', '1', '--db', str(path))
        assert data['status'] == "Fillable"
        assert data['strength'] == "exact"

    def test_rejected_database(self, runner, tmp_path):
        path = tmp_path / "knots.csv"
        path.write_text("name\nmine\n")
        result = run(runner, 'obstruct', '--knot', 'mine', '--coef', '1', '--db', str(path))
        assert result.exit_code == EXIT_INPUT_ERROR
        assert "row 1" in result.output


class TestKnots:

    def test_list(self, runner):
        result = run(runner, 'knots', 'list')
        assert result.exit_code == 0
        assert "m9_46" in result.output

    def test_list_json_with_torus(self, runner):
        _, data = run_json(runner, 'knots', 'list', '--torus')
        names = [record['name'] for record in data]
        assert "0_1" in names
        assert "T(3,4)" in names
        assert names.count("T(2,3)") == 1

    def test_show(self, runner):
        _, data = run_json(runner, 'knots', 'show', '4_1')
        assert data['facts']['max_tb'] == -3
        assert data['provenance']['no_tight_positive_surgery']

    def test_sum(self, runner):
        _, data = run_json(runner, 'knots', 'sum', 'm9_46', '0_1')
        assert data['same_as'] == "m9_46"

    def test_cable(self, runner):
        _, data = run_json(runner, 'knots', 'cable', 'm10_140', '2')
        assert data['facts']['decomposable'] is True
        assert data['synthetic'] is True

    def test_export(self, runner, tmp_path):
        path = tmp_path / "export.csv"
        result = run(runner, 'knots', 'export', str(path))
        assert result.exit_code == 0
        assert path.read_text().startswith("name,max_tb,tau")


class TestConfig:

    @pytest.fixture
    def settings_file(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("f_table_default: 3\n")
        yield path
        get_settings_manager(DEFAULT_SETTINGS_FILE)

    def test_show(self, runner, settings_file):
        result, data = run_json(runner, '--config', str(settings_file), 'config', 'show')
        assert result.exit_code == 0
        assert data['file'] == str(settings_file)
        assert data['settings']['f_table_default'] == 3
        assert data['settings']['database_path'] is None

    def test_get(self, runner, settings_file):
        assert run(runner, '--config', str(settings_file), 'config', 'get', 'f_table_default').output == "3\n"
        assert run(runner, '--config', str(settings_file), 'config', 'get', 'database_path').output == "null\n"

    def test_set_writes_file(self, runner, settings_file):
        result = run(runner, '--config', str(settings_file), 'config', 'set', 'f_table_default', '2')
        assert result.exit_code == 0
        saved = yaml.safe_load(settings_file.read_text())
        assert saved['f_table_default'] == 2
        assert saved['torus_max_q'] == 15

        result = run(runner, '--config', str(settings_file), 'ftau', '--table')
        assert result.output == "0, 4, 8\n"

    def test_set_rejects_invalid_value(self, runner, settings_file):
        result = run(runner, '--config', str(settings_file), 'config', 'set', 'torus_max_q', '1')
        assert result.exit_code == EXIT_INPUT_ERROR
        assert settings_file.read_text() == "f_table_default: 3\n"

    def test_unknown_key(self, runner, settings_file):
        for args in (['get', 'speed'], ['set', 'speed', '1']):
            result = run(runner, '--config', str(settings_file), 'config', *args)
            assert result.exit_code == EXIT_INPUT_ERROR

    def test_export(self, runner, settings_file, tmp_path):
        out = tmp_path / "out" / "settings.json"
        result = run(runner, '--config', str(settings_file), 'config', 'export', str(out), '--format', 'json')
        assert result.exit_code == 0
        assert json.loads(out.read_text())['f_table_default'] == 3


class TestConflictExitCode:

    def test_conflict_maps_to_exit_three(self, runner, monkeypatch):
        from backend.core import rules_engine
        from backend.core.models import RuleConflictError

        def explode(*args, **kwargs):
            raise RuleConflictError("contradictory rules")

        engine = rules_engine.create_rules_engine()
        monkeypatch.setattr(engine, 'evaluate', explode)
        monkeypatch.setattr('cli.main.get_rules_engine', lambda: engine)
        result = run(runner, 'obstruct', '--knot', 'T(2,3)', '--coef', '3')
        assert result.exit_code == EXIT_CONFLICT
