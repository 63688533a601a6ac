# Independent trace checker
#
# Side conditions are re-derived with the adjunction engine only; this module
# must never import the window oracle.

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Tuple, Union

from .adjunction import block_hom
from .calculus import Block, Params, Sod, make_sod
from .errors import SodCalcError, TraceCheckFailed, TraceFormatError
from .rules import RULES, Trace, TraceStep, required_pairs, rewrite
from .trace_format import (
    TraceHeader, TraceRecord, load_trace_text, parse_objects, read_trace, step_from_record, to_block, trace_objects,
)

logger = logging.getLogger(__name__)


class CheckResult(NamedTuple):
    ok: bool
    steps: int
    failed_step: Optional[int] = None
    reason: Optional[str] = None

    def as_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "steps": self.steps, "failed_step": self.failed_step, "reason": self.reason}


def _key(b: Block) -> Tuple:
    return (b.kind.value, b.t, b.k, str(b.word) if b.word is not None else None)


def _slice_keys(blocks: Iterable[Block], with_origin: bool = False) -> List[Tuple]:
    return [_key(b) + ((b.origin,) if with_origin and b.is_phi else ()) for b in blocks]


def check_step(step: TraceStep, p: Params, state: Optional[Sod] = None) -> Optional[Sod]:
    """
    Re-validate one step

    Args:
        step: Step to check
        p: Parameters from the header
        state: Decomposition before the step, or None for step-local checks

    Returns:
        The decomposition after the step (None when state is None)

    Raises:
        TraceCheckFailed: naming the first violated requirement
    """
    n = step.step
    rule = RULES[step.rule]
    start, stop = step.pos
    if stop - start != len(step.before) or start < 0:
        raise TraceCheckFailed(f"position {list(step.pos)} does not span the {len(step.before)} blocks before", n)
    if not rule.applicable(step.before, p):
        raise TraceCheckFailed(f"{step.rule.value} is not applicable to the recorded slice", n)
    if state is not None and _slice_keys(state.blocks[start:stop]) != _slice_keys(step.before):
        raise TraceCheckFailed("recorded slice differs from the replayed decomposition", n)

    expected = rewrite(step.rule, step.before, p, n)
    if _slice_keys(expected, True) != _slice_keys(step.after, True):
        shown = ", ".join(str(b) for b in expected)
        raise TraceCheckFailed(f"result differs from the rule's result [{shown}]", n)

    required = {(_key(x), _key(y)) for x, y in required_pairs(step.rule, step.before, p)}
    recorded = [(_key(c.p), _key(c.q)) for c in step.conds]
    if len(recorded) != len(set(recorded)) or set(recorded) != required:
        raise TraceCheckFailed(
            f"side conditions differ from those {step.rule.value} requires "
            f"({len(set(recorded) - required)} extra, {len(required - set(recorded))} missing)",
            n,
        )
    for c in step.conds:
        if c.verdict != "Zero":
            raise TraceCheckFailed(f"side condition Hom({c.p}, {c.q}) is recorded as {c.verdict}", n)
        try:
            verdict = block_hom(c.p, c.q, p)
        except SodCalcError as e:
            raise TraceCheckFailed(f"engine cannot evaluate Hom({c.p}, {c.q}): {e}", n)
        if not verdict.is_zero():
            raise TraceCheckFailed(f"engine gives {verdict} for Hom({c.p}, {c.q})", n)

    if state is None:
        return None
    try:
        return state.splice(start, stop, step.after)
    except SodCalcError as e:
        raise TraceCheckFailed(f"result does not splice into the decomposition: {e}", n)


def check_records(header: TraceHeader, p: Params, records: List[TraceRecord]) -> int:
    """
    Check every record in order

    Returns:
        Number of steps checked

    Raises:
        TraceCheckFailed: on the first failing step
    """
    state = None
    if header.initial:
        try:
            state = make_sod(p, [to_block(b, p) for b in header.initial])
        except SodCalcError as e:
            raise TraceCheckFailed(f"initial decomposition is malformed: {e}", 0)
    for expected_id, rec in enumerate(records, start=1):
        if rec.step != expected_id:
            raise TraceCheckFailed(f"step id {rec.step} out of sequence (expected {expected_id})", rec.step)
        try:
            step = step_from_record(rec, p)
        except (TraceFormatError, ValueError) as e:
            raise TraceCheckFailed(f"unreadable record: {e}", rec.step)
        state = check_step(step, p, state)
    logger.debug(f"checked {len(records)} steps over {p}")
    return len(records)


def _result(header: TraceHeader, p: Params, records: List[TraceRecord],
            log_level: int = logging.ERROR) -> CheckResult:
    try:
        steps = check_records(header, p, records)
    except TraceCheckFailed as e:
        logger.log(log_level, f"trace check failed at step {e.step}: {e.reason}")
        return CheckResult(False, len(records), e.step, e.reason)
    return CheckResult(True, steps)


def check_objects(objects: Iterable[Dict[str, Any]], log_level: int = logging.ERROR) -> CheckResult:
    """
    Check a trace given as decoded JSON objects, header first

    Args:
        objects: Header followed by step records
        log_level: Level for the rejection message; corruptions injected on
            purpose are logged at DEBUG
    """
    return _result(*parse_objects(objects), log_level=log_level)


def check_text(text: str) -> CheckResult:
    return _result(*load_trace_text(text))


def check_file(path: Union[str, Path]) -> CheckResult:
    """
    Check a JSON Lines trace file

    Raises:
        TraceFormatError: when the file cannot be read or decoded
        UnknownSchemaVersion: for unsupported schema versions
    """
    return _result(*read_trace(path))


def check_trace(trace: Trace) -> CheckResult:
    """Serialise an in-memory trace and check it as a reader would."""
    return check_objects(trace_objects(trace))
