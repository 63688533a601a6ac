# JSON Lines trace format (schema 1)

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .calculus import Block, Kind, Params, mk_params
from .dsl import parse_word
from .errors import DslSyntaxError, InvalidParams, TraceFormatError, UnknownSchemaVersion
from .rules import SCHEDULE, Condition, RuleId, Trace, TraceStep

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

BlockKind = Literal["BX", "JZ", "AZ", "AXE", "FY", "DZ", "PHI"]


class BlockRecord(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: BlockKind
    t: Optional[int] = None
    k: Optional[int] = None
    word: Optional[str] = None
    origin: Optional[int] = None


class ConditionRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: BlockRecord
    q: BlockRecord
    verdict: str
    cite: str


class TraceHeader(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: int = Field(alias="schema")
    n: int
    d: int
    m: int
    M: int
    schedule: str = SCHEDULE
    initial: List[BlockRecord] = Field(default_factory=list)


class TraceRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    step: int
    rule: RuleId
    pos: Tuple[int, int]
    before: List[BlockRecord]
    after: List[BlockRecord]
    conds: List[ConditionRecord] = Field(default_factory=list)


def block_record(b: Block) -> BlockRecord:
    if b.kind in (Kind.BX, Kind.JZ, Kind.AZ):
        return BlockRecord(kind=b.kind.value, t=b.t, k=b.k)
    if b.kind == Kind.AXE:
        return BlockRecord(kind=b.kind.value, t=b.t)
    if b.kind == Kind.PHI:
        return BlockRecord(kind=b.kind.value, k=b.k, word=str(b.word), origin=b.origin)
    return BlockRecord(kind=b.kind.value, k=b.k)


def to_block(rec: BlockRecord, p: Params) -> Block:
    """
    Rebuild a block from its record

    Raises:
        TraceFormatError: when fields required by the kind are missing or the
            PHI word does not parse
    """
    kind = Kind(rec.kind)
    needs_t = kind in (Kind.BX, Kind.JZ, Kind.AZ, Kind.AXE)
    needs_k = kind != Kind.AXE
    if (needs_t and rec.t is None) or (needs_k and rec.k is None):
        raise TraceFormatError(f"block record {rec.model_dump(exclude_none=True)} is incomplete")
    if kind == Kind.PHI:
        if rec.word is None:
            raise TraceFormatError("PHI record without a defining word")
        try:
            word = parse_word(rec.word, p)
        except DslSyntaxError as e:
            raise TraceFormatError(f"PHI word {rec.word!r} does not parse: {e}")
        return Block(kind, None, p.weight(rec.k), word, rec.origin)
    return Block(kind, rec.t, p.weight(rec.k) if needs_k else None)


def header_record(trace: Trace) -> TraceHeader:
    p = trace.params
    return TraceHeader(schema=SCHEMA_VERSION, n=p.n, d=p.d, m=p.m, M=p.M, schedule=trace.schedule,
                       initial=[block_record(b) for b in trace.initial])


def step_record(step: TraceStep) -> TraceRecord:
    return TraceRecord(
        step=step.step,
        rule=step.rule,
        pos=step.pos,
        before=[block_record(b) for b in step.before],
        after=[block_record(b) for b in step.after],
        conds=[ConditionRecord(p=block_record(c.p), q=block_record(c.q), verdict=c.verdict, cite=c.cite)
               for c in step.conds],
    )


def step_from_record(rec: TraceRecord, p: Params) -> TraceStep:
    conds = tuple(Condition(to_block(c.p, p), to_block(c.q, p), c.verdict, c.cite) for c in rec.conds)
    return TraceStep(rec.step, rec.rule, tuple(rec.pos),
                     tuple(to_block(b, p) for b in rec.before),
                     tuple(to_block(b, p) for b in rec.after), conds)


def _line(model: BaseModel) -> str:
    return model.model_dump_json(by_alias=True, exclude_none=True)


def trace_lines(trace: Trace) -> List[str]:
    return [_line(header_record(trace))] + [_line(step_record(s)) for s in trace.steps]


def dump_trace(trace: Trace) -> str:
    """Serialise a trace; identical traces give byte-identical text."""
    return "\n".join(trace_lines(trace)) + "\n"


def trace_objects(trace: Trace) -> List[Dict[str, Any]]:
    """The JSON Lines records as plain objects (header first)."""
    return [json.loads(line) for line in trace_lines(trace)]


def write_trace(trace: Trace, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_trace(trace), encoding="utf-8")
    logger.info(f"wrote {len(trace)} trace steps to {path}")
    return path


def parse_header(obj: Dict[str, Any]) -> Tuple[TraceHeader, Params]:
    """
    Validate the header object

    Raises:
        UnknownSchemaVersion: when the schema field is missing or unsupported
        TraceFormatError: for malformed headers
    """
    if obj.get("schema") != SCHEMA_VERSION:
        raise UnknownSchemaVersion(f"unsupported trace schema {obj.get('schema')!r}", {"schema": obj.get("schema")})
    try:
        header = TraceHeader.model_validate(obj)
        p = mk_params(header.n, header.d, header.m)
    except ValidationError as e:
        raise TraceFormatError(f"malformed trace header: {e.errors()[0]['msg']}")
    except InvalidParams as e:
        raise TraceFormatError(f"trace header has invalid parameters: {e}")
    if header.M != p.M:
        raise TraceFormatError(f"header M={header.M} does not match m-(n-1)d = {p.M}")
    return header, p


def parse_objects(objects: Iterable[Dict[str, Any]]) -> Tuple[TraceHeader, Params, List[TraceRecord]]:
    objects = list(objects)
    if not objects:
        raise TraceFormatError("empty trace")
    header, p = parse_header(objects[0])
    records = []
    for i, obj in enumerate(objects[1:], start=2):
        try:
            records.append(TraceRecord.model_validate(obj))
        except ValidationError as e:
            raise TraceFormatError(f"record {i}: {e.errors()[0]['msg']}", {"line": i})
    return header, p, records


def load_trace_text(text: str) -> Tuple[TraceHeader, Params, List[TraceRecord]]:
    """
    Parse JSON Lines text into the header and the step records

    Raises:
        TraceFormatError: for lines that are not JSON objects
    """
    objects = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceFormatError(f"line {i} is not JSON: {e.msg}", {"line": i})
        if not isinstance(obj, dict):
            raise TraceFormatError(f"line {i} is not a JSON object", {"line": i})
        objects.append(obj)
    return parse_objects(objects)


def read_trace(path: Union[str, Path]) -> Tuple[TraceHeader, Params, List[TraceRecord]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise TraceFormatError(f"cannot read {path}: {e}")
    return load_trace_text(text)
