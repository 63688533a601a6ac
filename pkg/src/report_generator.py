# Markdown reports for replays and sweeps

from collections import Counter
from datetime import datetime, timezone
from typing import Optional

from .calculus import Params
from .rules import RuleId
from .sweep import STAGES, SweepReport
from .theorem_driver import ReplayResult


def _header(title: str, subtitle: str) -> str:
    generated = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M UTC")
    return f"# {title}\n> {subtitle} | Generated: {generated}\n"


def _params_line(p: Params) -> str:
    return f"n = {p.n}, d = {p.d}, m = {p.m}, M = {p.M}"


def generate_replay_report(result: ReplayResult, trace_path: Optional[str] = None) -> str:
    """
    Generate a markdown summary of one replay

    Args:
        result: Finished replay
        trace_path: Where the JSON Lines trace was written, if anywhere

    Returns:
        Markdown text
    """
    p = result.params
    rules = Counter(step.rule for step in result.trace.steps)
    rule_rows = "\n".join(f"| {rule.value} | {rules.get(rule, 0)} |" for rule in RuleId)

    phi_rows = "\n".join(f"| PHI({b.k}) | `{b.word}` | {b.origin} |" for b in result.phi_blocks)

    induction_rows = "\n".join(
        f"| {r.k} | {'trivial' if r.trivial else 'induction'} | {r.transforms} | {r.steps} |"
        for r in result.inductions
    ) or "| - | - | - | - |"

    trace_section = f"\nTrace written to `{trace_path}`.\n" if trace_path else ""

    report = f"""{_header("Replay report", _params_line(p))}
## Result
- Final decomposition: {len(result.phi_blocks)} PHI block(s) followed by an {p.n} x {p.M} grid
- Atom count: {result.counts.b_type} B-type, {result.counts.a_type} A-type
- Steps: {len(result.trace)}
{trace_section}
## Steps per rule
| rule | steps |
|---|---|
{rule_rows}

## PHI blocks
| block | defining word | formed at step |
|---|---|---|
{phi_rows}

## Column inductions
| k | branch | transforms | steps |
|---|---|---|---|
{induction_rows}
"""
    return report.strip() + "\n"


def generate_sweep_report(report: SweepReport) -> str:
    """
    Generate a markdown table of a sweep, one row per cell

    Rows are in (n, d, m) order so equal sweeps produce equal tables apart
    from the generation time.
    """
    total = len(report.cells)
    passed = total - len(report.failed)
    head = "| n | d | m | steps | PHI | grid | " + " | ".join(STAGES) + " |"
    rule = "|" + "---|" * (6 + len(STAGES))
    rows = []
    for row in report.rows():
        cells = [str(row[k]) for k in ("n", "d", "m", "steps", "phi", "grid")]
        cells += [row[s] if row[s] in ("pass", "skip") else "FAIL" for s in STAGES]
        rows.append("| " + " | ".join(cells) + " |")

    failures = ""
    if report.failed:
        lines = [f"- ({c.n}, {c.d}, {c.m}): {'; '.join(c.failures())}" for c in report.failed]
        failures = "\n## Failures\n" + "\n".join(lines) + "\n"

    text = f"""{_header("Sweep report", f"{passed}/{total} cells pass")}
## Cells
{head}
{rule}
{chr(10).join(rows)}
{failures}"""
    return text.strip() + "\n"
