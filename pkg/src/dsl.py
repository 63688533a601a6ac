# Script language for decomposition sequences: parser and printer
#
# Elaboration lives in script_runner; this module only depends on the
# calculus and the rule vocabulary so that trace readers can use it.

import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from lark import Lark, Transformer
from lark.exceptions import LarkError, UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from .calculus import (
    BARE_GENERATORS, INTEGER_GENERATORS, WEIGHTED_GENERATORS,
    Block, FunctorWord, Gen, Kind, Params, Sod, az, axe, bx, dz, fy, gen, grid, jz, lmut,
)
from .config import Config
from .errors import DslSemanticError, DslSyntaxError
from .rules import RuleId, Trace, TraceStep

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: params stmt*

params: "params" "{" "n" "=" integer ";" "d" "=" integer ";" "m" "=" integer ";"? "}"

?stmt: let_stmt
     | rewrite_stmt
     | equiv_stmt
     | vanishes_stmt

let_stmt: "let" NAME "=" sod
rewrite_stmt: rewrite_op NAME "at" block
!rewrite_op: "expand" | "rmut" | "lmut" | "swap" | "phi" | "simplify"
equiv_stmt: "assert" "equiv" NAME target ("after" block)?
vanishes_stmt: "assert" "vanishes" block block

?target: NAME -> name_target
       | sod
       | grid

sod: "sod" "[" (item ("," item)*)? "]"
?item: block | span | grid

block: TWISTED_BLOCK  -> twisted
     | AXE_BLOCK      -> axe_block
     | WEIGHTED_BLOCK -> weighted
!twisted_kind: "BX" | "JZ" | "AZ"
span: twisted_kind "(" interval "," integer ")"
grid: "grid" "(" interval "," interval ")"
interval: "[" integer ".." integer "]"
integer: SIGNED_INT

block_only: block

word_only: "id"               -> empty_word
         | gen ("·" gen)*     -> gens
gen: gen_name "(" integer ")"          -> arg_gen
   | gen_name                          -> bare_gen
   | "LMut" "(" (block ("," block)*)? ")" -> lmut_gen
!gen_name: "PullF" | "PushF" | "PushJ" | "PullJ" | "ShriekJ" | "ShriekF"
         | "PushI" | "PullI" | "Twist" | "Chi" | "Shift"

// Block literals lex as single tokens
TWISTED_BLOCK.2: /(?:BX|JZ|AZ)\s*\(\s*[+-]?\d+\s*,\s*[+-]?\d+\s*\)/
AXE_BLOCK.2: /AXE\s*\(\s*[+-]?\d+\s*\)/
WEIGHTED_BLOCK.2: /(?:FY|DZ|PHI)\s*\(\s*[+-]?\d+\s*\)/
COMMENT: /#[^\n]*/

%import common.SIGNED_INT
%import common.CNAME -> NAME
%import common.WS
%ignore WS
%ignore COMMENT
"""

KEYWORDS = frozenset({
    "params", "n", "d", "m", "let", "sod", "expand", "rmut", "lmut", "swap", "phi", "simplify", "assert",
    "equiv", "vanishes", "at", "after", "grid", "id", "BX", "JZ", "AZ", "AXE", "FY", "DZ", "PHI", "LMut",
    "PullF", "PushF", "PushJ", "PullJ", "ShriekJ", "ShriekF", "PushI", "PullI", "Twist", "Chi", "Shift",
})

REWRITE_OPS = ("expand", "rmut", "lmut", "swap", "phi", "simplify")


# Script AST. Range sugar is kept as written so printing reproduces it.

@dataclass(frozen=True)
class BlockLit:
    kind: str
    t: Optional[int] = None
    k: Optional[int] = None


@dataclass(frozen=True)
class SpanLit:
    kind: str
    lo: int
    hi: int
    k: int


@dataclass(frozen=True)
class GridLit:
    twists: Tuple[int, int]
    weights: Tuple[int, int]


Item = Union[BlockLit, SpanLit, GridLit]


@dataclass(frozen=True)
class SodExpr:
    items: Tuple[Item, ...] = ()


@dataclass(frozen=True)
class ParamsDecl:
    n: int
    d: int
    m: int


@dataclass(frozen=True)
class Let:
    name: str
    sod: SodExpr


@dataclass(frozen=True)
class Rewrite:
    op: str
    name: str
    at: BlockLit


@dataclass(frozen=True)
class AssertEquiv:
    name: str
    target: Union[str, SodExpr, GridLit]
    after: Optional[BlockLit] = None


@dataclass(frozen=True)
class AssertVanishes:
    p: BlockLit
    q: BlockLit


Statement = Union[Let, Rewrite, AssertEquiv, AssertVanishes]


@dataclass(frozen=True)
class Script:
    params: ParamsDecl
    statements: Tuple[Statement, ...] = ()


_BLOCK_KIND = re.compile(r"[A-Z]+")
_BLOCK_INT = re.compile(r"[+-]?\d+")


def _block_token(token: str) -> Tuple[str, Tuple[int, ...]]:
    kind = _BLOCK_KIND.match(token).group()
    return kind, tuple(int(v) for v in _BLOCK_INT.findall(token, len(kind)))


class _ToAst(Transformer):
    def integer(self, c):
        return int(c[0])

    def interval(self, c):
        return (c[0], c[1])

    def twisted_kind(self, c):
        return str(c[0])

    rewrite_op = twisted_kind
    gen_name = twisted_kind

    def twisted(self, c):
        kind, (t, k) = _block_token(c[0])
        return BlockLit(kind, t, k)

    def axe_block(self, c):
        _, (t,) = _block_token(c[0])
        return BlockLit("AXE", t, None)

    def weighted(self, c):
        kind, (k,) = _block_token(c[0])
        return BlockLit(kind, None, k)

    def span(self, c):
        kind, (lo, hi), k = c
        return SpanLit(kind, lo, hi, k)

    def grid(self, c):
        return GridLit(c[0], c[1])

    def sod(self, c):
        return SodExpr(tuple(c))

    def params(self, c):
        return ParamsDecl(*c)

    def let_stmt(self, c):
        name = c[0]
        if name in KEYWORDS:
            raise DslSyntaxError(f"'{name}' is a reserved word and cannot be bound", name.line, name.column)
        return Let(str(name), c[1])

    def rewrite_stmt(self, c):
        return Rewrite(c[0], str(c[1]), c[2])

    def name_target(self, c):
        return str(c[0])

    def equiv_stmt(self, c):
        return AssertEquiv(str(c[0]), c[1], c[2] if len(c) > 2 else None)

    def vanishes_stmt(self, c):
        return AssertVanishes(c[0], c[1])

    def start(self, c):
        return Script(c[0], tuple(c[1:]))

    def block_only(self, c):
        return c[0]

    def empty_word(self, c):
        return ()

    def gens(self, c):
        return tuple(c)

    def arg_gen(self, c):
        return (c[0], c[1], ())

    def bare_gen(self, c):
        return (c[0], None, ())

    def lmut_gen(self, c):
        return ("LMut", None, tuple(c))


_PARSER = Lark(GRAMMAR, parser="lalr", start=["start", "block_only", "word_only"], maybe_placeholders=False,
               transformer=_ToAst())


def _parse(text: str, start: str):
    if len(text.encode("utf-8", errors="replace")) > Config.MAX_SCRIPT_BYTES:
        raise DslSyntaxError(f"input exceeds {Config.MAX_SCRIPT_BYTES} bytes")
    try:
        return _PARSER.parse(text, start=start)
    except UnexpectedEOF as e:
        lines = text.splitlines() or [""]
        raise DslSyntaxError(f"unexpected end of input, expected one of {sorted(e.expected)}",
                             len(lines), len(lines[-1]) + 1)
    except UnexpectedCharacters as e:
        raise DslSyntaxError(f"unexpected character {e.char!r}", e.line, e.column)
    except UnexpectedInput as e:
        token = getattr(e, "token", None)
        raise DslSyntaxError(f"unexpected token {str(token)!r}", e.line, e.column)
    except VisitError as e:
        if isinstance(e.orig_exc, DslSyntaxError):
            raise e.orig_exc
        raise DslSyntaxError(f"malformed literal: {e.orig_exc}")
    except LarkError as e:
        raise DslSyntaxError(str(e))


def parse(text: str) -> Script:
    """
    Parse a script

    Args:
        text: Script source

    Returns:
        Script AST

    Raises:
        DslSyntaxError: with the line and column of the first error
    """
    script = _parse(text, "start")
    logger.debug(f"parsed {len(script.statements)} statements")
    return script


def block_from_literal(lit: BlockLit, p: Params) -> Block:
    kind = Kind(lit.kind)
    if kind == Kind.BX:
        return bx(lit.t, lit.k, p)
    if kind == Kind.JZ:
        return jz(lit.t, lit.k, p)
    if kind == Kind.AZ:
        return az(lit.t, lit.k, p)
    if kind == Kind.AXE:
        return axe(lit.t)
    if kind == Kind.FY:
        return fy(lit.k, p)
    if kind == Kind.DZ:
        return dz(lit.k, p)
    return Block(Kind.PHI, None, p.weight(lit.k))


def parse_block(text: str, p: Params) -> Block:
    """Parse a single block literal such as "BX(2,0)" or "DZ(1)"."""
    return block_from_literal(_parse(text.strip(), "block_only"), p)


def parse_word(text: str, p: Params) -> FunctorWord:
    """Parse a printed functor word such as "LMut(BX(0,0))·PushJ(0)·Twist(1)"."""
    gens: List[Gen] = []
    for name, arg, blocks in _parse(text.strip(), "word_only"):
        if name == "LMut":
            gens.append(lmut([block_from_literal(b, p) for b in blocks]))
        elif name in WEIGHTED_GENERATORS:
            if arg is None:
                raise DslSyntaxError(f"{name} needs an index")
            gens.append(gen(name, arg, p))
        elif name in INTEGER_GENERATORS:
            if arg is None:
                raise DslSyntaxError(f"{name} needs an integer argument")
            gens.append(Gen(name, arg))
        elif name in BARE_GENERATORS:
            if arg is not None:
                raise DslSyntaxError(f"{name} takes no argument")
            gens.append(Gen(name))
    return FunctorWord(tuple(gens))


def expand_items(items, p: Params) -> List[Block]:
    blocks: List[Block] = []
    for item in items:
        if isinstance(item, GridLit):
            (t0, t1), (k0, k1) = item.twists, item.weights
            if t0 > t1 or k0 > k1:
                raise DslSemanticError(f"empty range in {pretty(item)}")
            blocks.extend(grid(p, range(t0, t1 + 1), range(k0, k1 + 1)))
        elif isinstance(item, SpanLit):
            if item.lo > item.hi:
                raise DslSemanticError(f"empty range in {pretty(item)}")
            blocks.extend(block_from_literal(BlockLit(item.kind, t, item.k), p) for t in range(item.lo, item.hi + 1))
        else:
            if item.kind == Kind.PHI.value:
                raise DslSemanticError("PHI blocks only arise from phi statements; they cannot be listed")
            blocks.append(block_from_literal(item, p))
    return blocks


# Printing

def _interval(iv: Tuple[int, int]) -> str:
    return f"[{iv[0]}..{iv[1]}]"


def _block_lit(lit: BlockLit) -> str:
    if lit.kind in ("BX", "JZ", "AZ"):
        return f"{lit.kind}({lit.t},{lit.k})"
    if lit.kind == "AXE":
        return f"AXE({lit.t})"
    return f"{lit.kind}({lit.k})"


def _sod_expr(items) -> str:
    if not items:
        return "sod [ ]"
    return "sod [ " + ", ".join(pretty(i) for i in items) + " ]"


def _statement(stmt: Statement) -> str:
    if isinstance(stmt, Let):
        return f"let {stmt.name} = {_sod_expr(stmt.sod.items)}"
    if isinstance(stmt, Rewrite):
        return f"{stmt.op} {stmt.name} at {_block_lit(stmt.at)}"
    if isinstance(stmt, AssertEquiv):
        target = stmt.target if isinstance(stmt.target, str) else pretty(stmt.target)
        text = f"assert equiv {stmt.name} {target}"
        if stmt.after is not None:
            text += f" after {_block_lit(stmt.after)}"
        return text
    return f"assert vanishes {_block_lit(stmt.p)} {_block_lit(stmt.q)}"


def _trace(trace: Trace) -> str:
    p = trace.params
    lines = [f"# trace over {p}, schedule {trace.schedule}",
             "# initial: " + ", ".join(str(b) for b in trace.initial)]
    for step in trace.steps:
        lines.append(str(step))
        for c in step.conds:
            lines.append(f"    Hom({c.p}, {c.q}) = 0: {c.cite}")
        for b in step.after:
            if b.is_phi:
                lines.append(f"    {b} := {b.word}")
    return "\n".join(lines)


def pretty(obj) -> str:
    """
    Canonical text of a script, script fragment, decomposition or trace

    Scripts print in the form `parse` reads back; decompositions print as a
    block list and traces include the citation of every side condition.
    """
    if isinstance(obj, Script):
        ps = obj.params
        lines = [f"params {{ n={ps.n}; d={ps.d}; m={ps.m} }}"]
        lines.extend(_statement(s) for s in obj.statements)
        return "\n".join(lines) + "\n"
    if isinstance(obj, (Let, Rewrite, AssertEquiv, AssertVanishes)):
        return _statement(obj)
    if isinstance(obj, BlockLit):
        return _block_lit(obj)
    if isinstance(obj, SpanLit):
        return f"{obj.kind}({_interval((obj.lo, obj.hi))},{obj.k})"
    if isinstance(obj, GridLit):
        return f"grid({_interval(obj.twists)},{_interval(obj.weights)})"
    if isinstance(obj, SodExpr):
        return _sod_expr(obj.items)
    if isinstance(obj, Sod):
        return "sod [ " + ", ".join(str(b) for b in obj.blocks) + " ]"
    if isinstance(obj, Trace):
        return _trace(obj)
    if isinstance(obj, Block):
        return str(obj)
    raise TypeError(f"cannot print {type(obj).__name__}")


def literal(b: Block) -> BlockLit:
    return BlockLit(b.kind.value, b.t, b.k)


_STEP_OPS = {
    RuleId.EXPAND_FY: "expand",
    RuleId.EXPAND_DZ: "expand",
    RuleId.RMUT_THROUGH_DZ: "rmut",
    RuleId.SWAP_ORTH: "swap",
    RuleId.LMUT_IDENTITY: "lmut",
    RuleId.LMUT_JZ_TRANSFORM: "lmut",
    RuleId.PHI_FORM: "phi",
    RuleId.PHI_SIMPLIFY: "simplify",
}


def _addressed(step: TraceStep) -> Block:
    if step.rule in (RuleId.LMUT_IDENTITY, RuleId.LMUT_JZ_TRANSFORM, RuleId.PHI_FORM):
        return step.before[-1]
    return step.before[0]


def script_from_trace(trace: Trace, name: str = "S", final: Optional[Sod] = None) -> Script:
    """
    Turn a replay trace into an equivalent script

    Every step becomes one rewrite statement addressing its block by
    literal; when the final decomposition is given the script ends with an
    equivalence assertion against the grid after the last PHI block.
    """
    p = trace.params
    statements: List[Statement] = [Let(name, SodExpr(tuple(literal(b) for b in trace.initial)))]
    for step in trace.steps:
        statements.append(Rewrite(_STEP_OPS[step.rule], name, literal(_addressed(step))))
    if final is not None:
        phis = [b for b in final.blocks if b.is_phi]
        after = literal(phis[-1]) if phis else None
        statements.append(AssertEquiv(name, GridLit((0, p.M - 1), (0, p.n - 1)), after))
    return Script(ParamsDecl(p.n, p.d, p.m), tuple(statements))
