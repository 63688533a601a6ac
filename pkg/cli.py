# Command-line entry point for the SOD calculus
# Supports:
# - python cli.py replay --n 2 --d 2 --m 4 --out trace.jsonl → replays the main theorem, writes the trace
# - python cli.py check trace.jsonl → re-validates a trace with the adjunction engine only
# - python cli.py sweep --n 2..5 --d 1..3 --m-max 12 → replay + check + crosscheck over every cell
# - python cli.py explain --n 3 "BX(4,0)" "DZ(0)" → vanishing verdict with citation
# - python cli.py run example-quartic.sod → elaborates a script
# - python cli.py preset quartic → shows a named parameter point

import sys
import logging
from pathlib import Path

import click

from src.api_handler import explain_pair, resolve_params
from src.config import Config
from src.dsl import parse, pretty, script_from_trace
from src.errors import (
    DslSemanticError, DslSyntaxError, InvalidParams, InvalidPreset, ReplayFailed, ScriptAssertionFailed,
    SodCalcError, TraceFormatError,
)
from src.report_generator import generate_replay_report, generate_sweep_report
from src.script_runner import run_script
from src.sweep import SweepOptions, run_sweep, sweep_cells
from src.theorem_driver import PRESET_NAMES, preset, replay_main
from src.trace_checker import check_file
from src.trace_format import write_trace
from src.utils import save_run_log, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_REPLAY = 3
EXIT_CHECK = 4


def _fail(message: str, code: int):
    click.echo(message, err=True)
    sys.exit(code)


def validate_config():
    """Validate that configuration is usable"""
    errors = Config.validate_config()
    if errors:
        logger.error("Configuration errors:")
        for error in errors:
            logger.error(f"  - {error}")
        return False
    return True


@click.group()
@click.option('--log-level', default=None, help='Log level (defaults to SODCALC_LOG_LEVEL)')
def cli(log_level):
    """Replay, check and explain semiorthogonal decompositions of cyclic covers."""
    setup_logging(log_level)
    if not validate_config():
        _fail("Configuration validation failed. Check your .env file.", EXIT_FAILED)


@cli.command()
@click.option('--n', type=int, help='Cover degree')
@click.option('--d', type=int, help='Divisor degree parameter')
@click.option('--m', type=int, help='Lefschetz length')
@click.option('--preset', 'preset_name', help='Named parameter point (quartic, gm:N, cubic:N)')
@click.option('--out', type=click.Path(dir_okay=False), help='Write the JSON Lines trace here')
@click.option('--script', type=click.Path(dir_okay=False), help='Write the equivalent .sod script here')
@click.option('--report', type=click.Path(dir_okay=False), help='Write a markdown report here')
def replay(n, d, m, preset_name, out, script, report):
    """Replay the main decomposition theorem for one parameter point."""
    try:
        p = resolve_params(n, d, m, preset_name)
    except (InvalidParams, InvalidPreset) as e:
        _fail(f"invalid parameters: {e}", EXIT_INVALID)

    try:
        result = replay_main(p)
    except ReplayFailed as e:
        logger.error(f"Replay failed: {str(e)}")
        if e.step is not None:
            click.echo(f"failing step: {e.step}", err=True)
        _fail(f"replay failed over {p}: {e}", EXIT_REPLAY)
    except SodCalcError as e:
        _fail(f"replay failed over {p}: {e.code}: {e}", EXIT_REPLAY)

    if out:
        write_trace(result.trace, out)
    if script:
        Path(script).write_text(pretty(script_from_trace(result.trace, final=result.final)), encoding='utf-8')
    if report:
        Path(report).write_text(generate_replay_report(result, out), encoding='utf-8')

    click.echo(f"params: {p}")
    click.echo(f"final: {pretty(result.final)}")
    click.echo(f"PHI blocks: {len(result.phi_blocks)}, grid: {p.n} x {p.M}")
    click.echo(f"counts: b_type={result.counts.b_type}, a_type={result.counts.a_type}")
    click.echo(f"steps: {len(result.trace)}")
    save_run_log('replay', {"params": p.as_dict(), "steps": len(result.trace), "out": out})


@cli.command()
@click.argument('path', type=click.Path(dir_okay=False))
def check(path):
    """Re-validate a JSON Lines trace using the adjunction engine only."""
    try:
        result = check_file(path)
    except TraceFormatError as e:
        logger.error(f"Unreadable trace {path}: {str(e)}")
        _fail(f"{e.code}: {e}", EXIT_CHECK)

    save_run_log('check', {"path": path, **result.as_dict()})
    if not result.ok:
        _fail(f"step {result.failed_step}: {result.reason}", EXIT_CHECK)
    click.echo(f"ok: {result.steps} steps checked")


@cli.command()
@click.option('--n', 'n_range', default=Config.SWEEP_N, show_default=True, help='Inclusive n range')
@click.option('--d', 'd_range', default=Config.SWEEP_D, show_default=True, help='Inclusive d range')
@click.option('--m-min', type=int, default=None, help='Lower bound of m (defaults to n*d)')
@click.option('--m-max', type=int, default=Config.SWEEP_M_MAX, show_default=True, help='Upper bound of m')
@click.option('--jobs', type=int, default=Config.JOBS, show_default=True, help='Worker processes (0 = one per core)')
@click.option('--faults', type=int, default=Config.FAULTS_PER_CELL, show_default=True,
              help='Trace corruptions per cell (0 disables)')
@click.option('--crosscheck/--no-crosscheck', default=True, help='Compare the window oracle with the engine')
@click.option('--seed', type=int, default=Config.SEED, show_default=True, help='Fault-injection seed')
@click.option('--report', type=click.Path(dir_okay=False), help='Write a markdown report here')
@click.option('--progress/--no-progress', default=True, help='Show a progress bar')
def sweep(n_range, d_range, m_min, m_max, jobs, faults, crosscheck, seed, report, progress):
    """Run every verification stage over a range of parameter cells."""
    try:
        cells = sweep_cells(Config.parse_range(n_range), Config.parse_range(d_range), (m_min, m_max))
    except ValueError as e:
        _fail(f"invalid range: {e}", EXIT_INVALID)
    if not cells:
        _fail("no admissible cells in the requested ranges", EXIT_INVALID)

    result = run_sweep(cells, jobs, SweepOptions(faults, crosscheck, seed), progress)
    for row in result.rows():
        status = "pass" if row["ok"] else "FAIL"
        click.echo(f"({row['n']}, {row['d']}, {row['m']})  {status}  steps={row['steps']}  "
                   f"phi={row['phi']}  grid={row['grid']}")
    for cell in result.failed:
        click.echo(f"({cell.n}, {cell.d}, {cell.m}): {'; '.join(cell.failures())}", err=True)
    click.echo(f"{len(result.cells) - len(result.failed)}/{len(result.cells)} cells pass")

    if report:
        Path(report).write_text(generate_sweep_report(result), encoding='utf-8')
    save_run_log('sweep', {"cells": len(result.cells), "failed": [list(c.key) for c in result.failed]})
    if not result.ok:
        sys.exit(EXIT_FAILED)


@cli.command()
@click.argument('p_block')
@click.argument('q_block')
@click.option('--n', type=int, required=True, help='Cover degree')
@click.option('--d', type=int, default=None, help='Divisor degree parameter (default 1)')
@click.option('--m', type=int, default=None, help='Lefschetz length (default n*d + 2)')
def explain(p_block, q_block, n, d, m):
    """Explain whether Hom(P_BLOCK, Q_BLOCK) is guaranteed to vanish."""
    d = 1 if d is None else d
    m = n * d + 2 if m is None else m
    try:
        p = resolve_params(n, d, m)
        result = explain_pair(p, p_block, q_block)
    except (InvalidParams, DslSyntaxError) as e:
        _fail(f"{e.code}: {e}", EXIT_INVALID)

    click.echo(result["text"])
    if result["verdict"] != "Guaranteed":
        for line in result["reduction"]:
            click.echo(f"  {line}")


@cli.command()
@click.argument('script_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--pretty', 'show', is_flag=True, help='Print the script in canonical form')
@click.option('--trace', 'trace_name', default=None, help='Binding whose trace is written with --out')
@click.option('--out', type=click.Path(dir_okay=False), help='Write the trace of --trace here')
def run(script_path, show, trace_name, out):
    """Elaborate a .sod script and check its assertions."""
    try:
        text = Path(script_path).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        _fail(f"{script_path}: cannot read script: {e}", EXIT_INVALID)
    try:
        script = parse(text)
        result = run_script(script)
    except (DslSyntaxError, DslSemanticError, InvalidParams) as e:
        _fail(f"{script_path}: {e.code}: {e}", EXIT_INVALID)
    except ScriptAssertionFailed as e:
        _fail(f"{script_path}: {e}", EXIT_FAILED)
    except ReplayFailed as e:
        if e.step is not None:
            click.echo(f"failing step: {e.step}", err=True)
        _fail(f"{script_path}: {e}", EXIT_REPLAY)
    except SodCalcError as e:
        _fail(f"{script_path}: {e.code}: {e}", EXIT_FAILED)

    if show:
        click.echo(pretty(script), nl=False)
    for name, rw in result.bindings.items():
        click.echo(f"{name}: {pretty(rw.sod)} ({len(rw.trace)} steps)")
    click.echo(f"assertions: {result.assertions} passed")

    if out:
        name = trace_name or next(iter(result.bindings), None)
        if name not in result.bindings:
            _fail(f"no binding named {name!r}", EXIT_INVALID)
        write_trace(result.trace(name), out)


@cli.command(name='preset')
@click.argument('name', required=False)
@click.option('--replay', 'do_replay', is_flag=True, help='Replay the preset and compare the final shape')
def preset_cmd(name, do_replay):
    """Show a named parameter point, or list them all."""
    names = [name] if name else PRESET_NAMES
    for item in names:
        try:
            info = preset(item)
        except InvalidPreset as e:
            _fail(f"{e.code}: {e}", EXIT_INVALID)
        flag = "" if info.verified else "  [informational]"
        click.echo(f"{info.name}: {info.params}  PHI={info.phi_count}  grid={info.grid_shape[0]}x{info.grid_shape[1]}"
                   f"  components={info.components}{flag}")
        if info.note:
            click.echo(f"  {info.note}")
        if do_replay and info.verified:
            try:
                result = replay_main(info.params)
            except ReplayFailed as e:
                _fail(f"replay of {info.name} failed: {e}", EXIT_REPLAY)
            shape = (len(result.phi_blocks), (info.params.n, info.params.M))
            if shape != (info.phi_count, info.grid_shape):
                _fail(f"{info.name}: replay gives {shape}, expected {(info.phi_count, info.grid_shape)}",
                      EXIT_REPLAY)
            click.echo(f"  replay ok: {len(result.trace)} steps")


if __name__ == '__main__':
    cli()
