# Mutation engine: validated rewrites on decomposition sequences

import logging
from typing import Callable, List, Optional, Sequence, Tuple

from .calculus import Block, Kind, Params, Sod, column, grid, make_sod, sod_equiv
from .errors import (
    NotComposite, PrefixNotCk, ReplayFailed, RuleNotApplicable, SimplificationBlocked, SodCalcError,
)
from .rules import Condition, RuleId, Trace, TraceStep, required_pairs, rewrite
from .windows import diagnose, explain, window_oracle

logger = logging.getLogger(__name__)

StepResult = Tuple[Sod, TraceStep]


def _conditions(rule: RuleId, before: Sequence[Block], p: Params, error=RuleNotApplicable) -> Tuple[Condition, ...]:
    conds = []
    for x, y in required_pairs(rule, before, p):
        if not window_oracle(x, y, p):
            raise error(
                f"{rule.value}: Hom({x}, {y}) is not certified zero ({diagnose(x, y, p)})",
                {"rule": rule.value, "p": str(x), "q": str(y)},
            )
        conds.append(Condition(x, y, "Zero", explain(x, y, p)))
    return tuple(conds)


def _record(s: Sod, rule: RuleId, start: int, stop: int, step: int, error=RuleNotApplicable) -> StepResult:
    before = s.blocks[start:stop]
    after = rewrite(rule, before, s.params, step)
    conds = _conditions(rule, before, s.params, error)
    record = TraceStep(step, rule, (start, stop), before, after, conds)
    logger.debug(str(record))
    return s.splice(start, stop, after), record


def _check_index(s: Sod, i: int, rule: RuleId):
    if not 0 <= i < len(s):
        raise RuleNotApplicable(f"{rule.value}: position {i} is outside a decomposition of length {len(s)}")


def expand(s: Sod, i: int, step: int = 1) -> StepResult:
    """
    Replace a composite block by its generator blocks

    Args:
        s: Decomposition
        i: Position of FY(k) or DZ(k)
        step: Trace step id

    Returns:
        (new Sod, TraceStep)

    Raises:
        NotComposite: if the block at i is not FY or DZ
    """
    _check_index(s, i, RuleId.EXPAND_FY)
    b = s.blocks[i]
    if b.kind == Kind.FY:
        return _record(s, RuleId.EXPAND_FY, i, i + 1, step)
    if b.kind == Kind.DZ:
        return _record(s, RuleId.EXPAND_DZ, i, i + 1, step)
    raise NotComposite(f"{b} is not a composite block", {"block": str(b)})


def right_mutate(s: Sod, i: int, step: int = 1) -> StepResult:
    """Mutate BX(t,k) at i to the right through DZ(k) at i+1."""
    _check_index(s, i + 1, RuleId.RMUT_THROUGH_DZ)
    return _record(s, RuleId.RMUT_THROUGH_DZ, i, i + 2, step)


def left_mutate_step(s: Sod, i: int, step: int = 1) -> StepResult:
    """
    Mutate the Z-side block at i one place to the left

    The transform case applies when the left neighbour is BX(t,k) and the
    block is JZ(t,k); otherwise the pair must be completely orthogonal and
    the mutation is the identity.

    Raises:
        RuleNotApplicable: when neither case is certified
    """
    _check_index(s, i, RuleId.LMUT_IDENTITY)
    if i < 1:
        raise RuleNotApplicable(f"nothing to the left of {s.blocks[i]}")
    b, z = s.blocks[i - 1], s.blocks[i]
    if z.kind == Kind.JZ and b.kind == Kind.BX and (b.t, b.k) == (z.t, z.k):
        return _record(s, RuleId.LMUT_JZ_TRANSFORM, i - 1, i + 1, step)
    return _record(s, RuleId.LMUT_IDENTITY, i - 1, i + 1, step)


def swap_orth(s: Sod, i: int, step: int = 1) -> StepResult:
    """Swap the completely orthogonal neighbours at i and i+1."""
    _check_index(s, i + 1, RuleId.SWAP_ORTH)
    return _record(s, RuleId.SWAP_ORTH, i, i + 2, step)


def phi_prefix_start(s: Sod, i: int) -> int:
    start = i
    while start > 0 and not s.blocks[start - 1].is_phi:
        start -= 1
    return start


def form_phi(s: Sod, i: int, step: int = 1) -> StepResult:
    """
    Left-mutate AZ(d,k) through the grid C_k to its left and record PHI(k)

    Args:
        s: Decomposition whose non-PHI blocks left of i are exactly C_k
        i: Position of AZ(d,k)
        step: Trace step id (becomes the origin of the new PHI block)

    Raises:
        PrefixNotCk: when the block is not AZ(d,k) or the prefix is not C_k
    """
    if not 0 <= i < len(s):
        raise PrefixNotCk(f"position {i} is outside the decomposition")
    p = s.params
    b = s.blocks[i]
    if b.kind != Kind.AZ or b.t != p.d:
        raise PrefixNotCk(f"{b} is not AZ({p.d},k)", {"block": str(b)})
    start = phi_prefix_start(s, i)
    try:
        return _record(s, RuleId.PHI_FORM, start, i + 1, step)
    except RuleNotApplicable:
        prefix = ", ".join(str(x) for x in s.blocks[start:i])
        raise PrefixNotCk(f"blocks left of {b} are not C_{b.k}: [{prefix}]", {"block": str(b)})


def simplify_phi(b: Block, p: Params, step: Optional[int] = None) -> Tuple[Block, Tuple[Condition, ...]]:
    """
    Reduce the raw defining word of PHI(k) to LMut(BX^k([0,d-1]))·PushJ(k)·Twist(d)

    Every dropped mutation factor needs Hom(factor, AZ(d,k)) = 0, and the
    kept column must be reachable at the front of C_k by licensed swaps.

    Returns:
        The simplified PHI block and the recorded citations

    Raises:
        SimplificationBlocked: when any factor cannot be dropped
    """
    try:
        after = rewrite(RuleId.PHI_SIMPLIFY, (b,), p, step)
    except RuleNotApplicable as e:
        raise SimplificationBlocked(str(e), {"block": str(b)})
    conds = _conditions(RuleId.PHI_SIMPLIFY, (b,), p, SimplificationBlocked)

    kept = column(p, range(p.d), b.k)
    ck = grid(p, range(p.M), range(b.k + 1))
    reordered = kept + [x for x in ck if x not in kept]
    if not sod_equiv(make_sod(p, ck), make_sod(p, reordered), window_oracle):
        raise SimplificationBlocked(f"BX^{b.k}([0,{p.d - 1}]) cannot be moved to the front of C_{b.k}")
    return after[0], conds


def simplify_phi_at(s: Sod, i: int, step: int = 1) -> StepResult:
    b = s.blocks[i]
    simplified, conds = simplify_phi(b, s.params, step)
    record = TraceStep(step, RuleId.PHI_SIMPLIFY, (i, i + 1), (b,), (simplified,), conds)
    logger.debug(str(record))
    return s.splice(i, i + 1, [simplified]), record


class Rewriter:
    """Applies rewrites to a decomposition and records every step in a trace"""

    def __init__(self, sod: Sod, trace: Optional[Trace] = None):
        self.sod = sod
        self.trace = trace if trace is not None else Trace(sod.params, sod.blocks)

    @property
    def params(self) -> Params:
        return self.sod.params

    def _apply(self, rule: RuleId, op: Callable[[Sod, int, int], StepResult], i: int, width: int) -> TraceStep:
        step_id = self.trace.next_id()
        try:
            self.sod, record = op(self.sod, i, step_id)
        except SodCalcError as e:
            failed = TraceStep(step_id, rule, (i, i + width), self.sod.blocks[i:i + width], ())
            logger.error(f"step {step_id} ({rule.value}) failed at {i}: {e}")
            raise ReplayFailed(str(e), step=failed, details={"code": e.code, **e.details})
        self.trace.steps.append(record)
        return record

    def expand(self, i: int) -> TraceStep:
        rule = RuleId.EXPAND_FY if self.sod.blocks[i].kind == Kind.FY else RuleId.EXPAND_DZ
        return self._apply(rule, expand, i, 1)

    def right_mutate(self, i: int) -> TraceStep:
        return self._apply(RuleId.RMUT_THROUGH_DZ, right_mutate, i, 2)

    def left_mutate(self, i: int) -> TraceStep:
        return self._apply(RuleId.LMUT_IDENTITY, left_mutate_step, i, 1)

    def swap(self, i: int) -> TraceStep:
        return self._apply(RuleId.SWAP_ORTH, swap_orth, i, 2)

    def form_phi(self, i: int) -> TraceStep:
        return self._apply(RuleId.PHI_FORM, form_phi, i, 1)

    def simplify_phi(self, i: int) -> TraceStep:
        return self._apply(RuleId.PHI_SIMPLIFY, simplify_phi_at, i, 1)

    def canonicalize(self, start: int, target: Sequence[Block]) -> int:
        """
        Reorder the slice starting at `start` into `target` with SWAP_ORTH steps

        Returns:
            Number of swaps recorded
        """
        stop = start + len(target)
        current = make_sod(self.params, self.sod.blocks[start:stop])
        result = sod_equiv(current, make_sod(self.params, target), window_oracle)
        if not result:
            raise ReplayFailed(
                f"blocks at [{start}, {stop}) are not a licensed permutation of the target order",
                details={"current": str(current)},
            )
        for i in result.witness:
            self.swap(start + i)
        return len(result.witness)

    def locate(self, b: Block) -> int:
        try:
            return self.sod.index(b)
        except ValueError:
            raise ReplayFailed(f"{b} is not in {self.sod}")


def steps_of(trace: Trace, rule: RuleId) -> List[TraceStep]:
    return [s for s in trace.steps if s.rule == rule]
