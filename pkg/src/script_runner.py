# Elaboration of parsed scripts against the mutation engine

import logging
from dataclasses import dataclass, field
from typing import Dict, List

from .calculus import Block, Params, Sod, make_sod, mk_params, sod_equiv
from .dsl import (
    AssertEquiv, BlockLit, GridLit, Let, Rewrite, Script, block_from_literal, expand_items, parse, pretty,
)
from .errors import DslSemanticError, ScriptAssertionFailed
from .mutations import Rewriter
from .rules import Trace
from .windows import diagnose, window_oracle

logger = logging.getLogger(__name__)

@dataclass
class ScriptResult:
    params: Params
    bindings: Dict[str, Rewriter] = field(default_factory=dict)
    assertions: int = 0

    def sod(self, name: str) -> Sod:
        return self.bindings[name].sod

    def trace(self, name: str) -> Trace:
        return self.bindings[name].trace


def _lookup(result: ScriptResult, name: str) -> Rewriter:
    if name not in result.bindings:
        raise DslSemanticError(f"unbound name {name!r}", {"name": name})
    return result.bindings[name]


def _position(rw: Rewriter, lit: BlockLit) -> int:
    target = block_from_literal(lit, rw.params)
    matches = [i for i, b in enumerate(rw.sod.blocks)
               if b == target or (target.is_phi and b.is_phi and b.k == target.k)]
    if not matches:
        raise DslSemanticError(f"{pretty(lit)} does not occur in {rw.sod}", {"block": pretty(lit)})
    if len(matches) > 1:
        raise DslSemanticError(f"{pretty(lit)} is ambiguous", {"block": pretty(lit)})
    return matches[0]


def _target_blocks(result: ScriptResult, target, p: Params) -> List[Block]:
    if isinstance(target, str):
        return list(_lookup(result, target).sod.blocks)
    if isinstance(target, GridLit):
        return expand_items([target], p)
    return expand_items(target.items, p)


def run_script(script: Script) -> ScriptResult:
    """
    Elaborate a script: bind decompositions, apply rewrites and check assertions

    Args:
        script: Parsed script

    Returns:
        ScriptResult with the final bindings and their traces

    Raises:
        InvalidParams: for an invalid params declaration
        DslSemanticError: for unbound names and unresolvable literals
        ScriptAssertionFailed: when an assertion does not hold
        SodCalcError: when a rewrite is not applicable
    """
    p = mk_params(script.params.n, script.params.d, script.params.m)
    result = ScriptResult(p)
    for stmt in script.statements:
        if isinstance(stmt, Let):
            result.bindings[stmt.name] = Rewriter(make_sod(p, expand_items(stmt.sod.items, p)))
        elif isinstance(stmt, Rewrite):
            rw = _lookup(result, stmt.name)
            i = _position(rw, stmt.at)
            {
                "expand": rw.expand,
                "rmut": rw.right_mutate,
                "lmut": rw.left_mutate,
                "swap": rw.swap,
                "phi": rw.form_phi,
                "simplify": rw.simplify_phi,
            }[stmt.op](i)
        elif isinstance(stmt, AssertEquiv):
            rw = _lookup(result, stmt.name)
            blocks = rw.sod.blocks
            if stmt.after is not None:
                blocks = blocks[_position(rw, stmt.after) + 1:]
            target = _target_blocks(result, stmt.target, p)
            if not sod_equiv(make_sod(p, blocks), make_sod(p, target), window_oracle):
                raise ScriptAssertionFailed(f"{pretty(stmt)} does not hold", {"statement": pretty(stmt)})
            result.assertions += 1
        else:
            x, y = block_from_literal(stmt.p, p), block_from_literal(stmt.q, p)
            if not window_oracle(x, y, p):
                raise ScriptAssertionFailed(f"{pretty(stmt)} does not hold: {diagnose(x, y, p)}",
                                            {"statement": pretty(stmt)})
            result.assertions += 1
    logger.debug(f"script over {p}: {len(script.statements)} statements, {result.assertions} assertions")
    return result


def run_text(text: str) -> ScriptResult:
    return run_script(parse(text))
