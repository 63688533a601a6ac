# Test cases for the command-line interface

import pytest
import os
import json
from unittest.mock import patch

import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from click.testing import CliRunner

from cli import EXIT_CHECK, EXIT_FAILED, EXIT_INVALID, cli
from src.config import Config

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def runner(tmp_path):
    """CLI runner with run logs written under tmp_path"""
    with patch.object(Config, 'LOG_DIR', str(tmp_path / 'logs')):
        yield CliRunner()


class TestReplayAndCheck:
    """replay and check commands"""

    def test_replay(self, runner):
        result = runner.invoke(cli, ['replay', '--n', '2', '--d', '2', '--m', '4'])
        assert result.exit_code == 0
        assert "PHI blocks: 1, grid: 2 x 2" in result.output
        assert "steps: 7" in result.output

    def test_replay_invalid_params(self, runner):
        result = runner.invoke(cli, ['replay', '--n', '3', '--d', '2', '--m', '5'])
        assert result.exit_code == EXIT_INVALID
        assert "invalid parameters" in result.output

    def test_replay_missing_params(self, runner):
        result = runner.invoke(cli, ['replay', '--n', '2'])
        assert result.exit_code == EXIT_INVALID

    def test_replay_preset(self, runner):
        result = runner.invoke(cli, ['replay', '--preset', 'cubic:4'])
        assert result.exit_code == 0
        assert "PHI blocks: 2, grid: 3 x 3" in result.output

    def test_replay_then_check(self, runner, tmp_path):
        out = tmp_path / 'quartic.jsonl'
        assert runner.invoke(cli, ['replay', '--preset', 'quartic', '--out', str(out)]).exit_code == 0
        result = runner.invoke(cli, ['check', str(out)])
        assert result.exit_code == 0
        assert "ok: 7 steps checked" in result.output

    def test_check_rejects_corruption(self, runner, tmp_path):
        out = tmp_path / 'gm.jsonl'
        runner.invoke(cli, ['replay', '--preset', 'gm:5', '--out', str(out)])
        lines = out.read_text(encoding='utf-8').splitlines()
        record = json.loads(lines[2])
        record["after"][1]["t"] += 1
        lines[2] = json.dumps(record)
        out.write_text("\n".join(lines) + "\n", encoding='utf-8')

        result = runner.invoke(cli, ['check', str(out)])
        assert result.exit_code == EXIT_CHECK
        assert "step 2" in result.output

    def test_check_unreadable(self, runner, tmp_path):
        bad = tmp_path / 'bad.jsonl'
        bad.write_text('{"schema": 2}\n', encoding='utf-8')
        assert runner.invoke(cli, ['check', str(bad)]).exit_code == EXIT_CHECK
        assert runner.invoke(cli, ['check', str(tmp_path / 'absent.jsonl')]).exit_code == EXIT_CHECK

    def test_replay_writes_script_and_report(self, runner, tmp_path):
        script = tmp_path / 'gm.sod'
        report = tmp_path / 'gm.md'
        result = runner.invoke(cli, ['replay', '--preset', 'gm:5', '--script', str(script), '--report', str(report)])
        assert result.exit_code == 0
        assert report.read_text(encoding='utf-8').startswith("# Replay report")
        rerun = runner.invoke(cli, ['run', str(script)])
        assert rerun.exit_code == 0
        assert "assertions: 1 passed" in rerun.output

    def test_run_log_saved(self, runner, tmp_path):
        runner.invoke(cli, ['replay', '--preset', 'quartic'])
        assert any('replay' in name for name in os.listdir(tmp_path / 'logs'))


class TestExplain:
    """explain command"""

    def test_guaranteed(self, runner):
        result = runner.invoke(cli, ['explain', '--n', '2', 'BX(1,0)', 'BX(0,0)'])
        assert result.exit_code == 0
        assert "Guaranteed:" in result.output
        assert "Y window 1 ≤ 1 ≤ 3" in result.output

    def test_composite_not_guaranteed(self, runner):
        result = runner.invoke(cli, ['explain', '--n', '3', 'BX(4,0)', 'DZ(0)'])
        assert result.exit_code == 0
        assert "NotGuaranteed via k = ℓ branch of (sojf)" in result.output

    def test_phi_literal(self, runner):
        result = runner.invoke(cli, ['explain', '--n', '2', 'PHI(0)', 'BX(0,0)'])
        assert result.exit_code == 0
        assert "provenance-only block" in result.output

    def test_bad_literal(self, runner):
        result = runner.invoke(cli, ['explain', '--n', '2', 'BX(1', 'BX(0,0)'])
        assert result.exit_code == EXIT_INVALID


class TestRun:
    """run command"""

    @pytest.mark.parametrize("name", ["example-quartic.sod", "example-gm-5.sod", "example-cyclic-cubic-4.sod"])
    def test_examples(self, runner, name):
        result = runner.invoke(cli, ['run', os.path.join(ROOT, name)])
        assert result.exit_code == 0
        assert "passed" in result.output

    def test_pretty_and_trace(self, runner, tmp_path):
        out = tmp_path / 'run.jsonl'
        result = runner.invoke(cli, ['run', os.path.join(ROOT, 'example-quartic.sod'), '--pretty', '--out', str(out)])
        assert result.exit_code == 0
        assert "params { n=2; d=2; m=4 }" in result.output
        assert runner.invoke(cli, ['check', str(out)]).exit_code == 0

    def test_syntax_error(self, runner, tmp_path):
        script = tmp_path / 'broken.sod'
        script.write_text("params { n=2; d=1; m=4 }\nlet S = sod [ FY(0) DZ(0) ]\n", encoding='utf-8')
        result = runner.invoke(cli, ['run', str(script)])
        assert result.exit_code == EXIT_INVALID
        assert "DslSyntaxError" in result.output

    def test_failed_assertion(self, runner, tmp_path):
        script = tmp_path / 'false.sod'
        script.write_text("params { n=2; d=1; m=4 }\nassert vanishes BX(0,0) BX(1,0)\n", encoding='utf-8')
        assert runner.invoke(cli, ['run', str(script)]).exit_code == EXIT_FAILED

    def test_script_not_utf8(self, runner, tmp_path):
        script = tmp_path / 'latin1.sod'
        script.write_bytes("params { n=2; d=1; m=4 }\n# caf\xe9\n".encode('latin-1'))
        result = runner.invoke(cli, ['run', str(script)])
        assert result.exit_code == EXIT_INVALID
        assert "cannot read script" in result.output


class TestPresetAndSweep:
    """preset and sweep commands"""

    def test_list_presets(self, runner):
        result = runner.invoke(cli, ['preset'])
        assert result.exit_code == 0
        assert "quartic" in result.output
        assert "[informational]" in result.output

    def test_preset_replay(self, runner):
        result = runner.invoke(cli, ['preset', 'gm:5', '--replay'])
        assert result.exit_code == 0
        assert "replay ok: 8 steps" in result.output

    def test_unknown_preset(self, runner):
        assert runner.invoke(cli, ['preset', 'sextic']).exit_code == EXIT_INVALID

    def test_sweep(self, runner, tmp_path):
        report = tmp_path / 'sweep.md'
        result = runner.invoke(cli, ['sweep', '--n', '2', '--d', '1', '--m-max', '3', '--jobs', '1', '--faults', '5',
                                     '--no-progress', '--report', str(report)])
        assert result.exit_code == 0
        assert "2/2 cells pass" in result.output
        assert report.exists()

    def test_sweep_bad_range(self, runner):
        assert runner.invoke(cli, ['sweep', '--n', 'two', '--no-progress']).exit_code == EXIT_INVALID
