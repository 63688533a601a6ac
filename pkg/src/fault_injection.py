# Fault injection for the trace checker

import copy
import logging
import random
from typing import Any, Dict, List, NamedTuple, Optional

from .trace_checker import check_objects

logger = logging.getLogger(__name__)

RESULT_BLOCK = "result_block"
CONDITION_PAIR = "condition_pair"


class Fault(NamedTuple):
    kind: str
    step: int
    description: str
    objects: List[Dict[str, Any]]


class FaultReport(NamedTuple):
    injected: int
    detected: int
    missed: List[str]

    @property
    def rate(self) -> float:
        return 1.0 if not self.injected else self.detected / self.injected

    @property
    def ok(self) -> bool:
        return self.detected == self.injected


def _corrupt_block(block: Dict[str, Any], n: int) -> str:
    if block["kind"] == "PHI":
        block["k"] = (block["k"] + 1) % n
        return f"PHI weight -> {block['k']}"
    if "t" in block:
        block["t"] += 1
        return f"{block['kind']} twist -> {block['t']}"
    block["k"] = (block["k"] + 1) % n
    return f"{block['kind']} weight -> {block['k']}"


def make_fault(objects: List[Dict[str, Any]], rng: random.Random, kind: Optional[str] = None) -> Fault:
    """
    Corrupt one step of a trace given as JSON objects (header first)

    Args:
        objects: Header followed by step records
        rng: Random source
        kind: RESULT_BLOCK or CONDITION_PAIR; drawn from rng when omitted

    Returns:
        Fault carrying a corrupted deep copy
    """
    n = objects[0]["n"]
    steps = objects[1:]
    with_conds = [i for i, s in enumerate(steps) if s.get("conds")]
    if kind is None:
        kind = rng.choice([RESULT_BLOCK, CONDITION_PAIR]) if with_conds else RESULT_BLOCK
    corrupted = copy.deepcopy(objects)
    if kind == CONDITION_PAIR:
        i = rng.choice(with_conds)
        record = corrupted[i + 1]
        c = rng.randrange(len(record["conds"]))
        cond = record["conds"][c]
        cond["p"], cond["q"] = cond["q"], cond["p"]
        return Fault(kind, record["step"], f"swapped the pair of condition {c}", corrupted)
    i = rng.randrange(len(steps))
    record = corrupted[i + 1]
    b = rng.randrange(len(record["after"]))
    change = _corrupt_block(record["after"][b], n)
    return Fault(kind, record["step"], f"result block {b}: {change}", corrupted)


def cell_seed(n: int, d: int, m: int, seed: int = 0) -> str:
    return f"{n}:{d}:{m}:{seed}"


def run_faults(objects: List[Dict[str, Any]], count: int, seed: str) -> FaultReport:
    """
    Inject `count` single-step corruptions and check that every one is rejected

    The same seed always produces the same corruptions.
    """
    if len(objects) < 2:
        return FaultReport(0, 0, [])
    rng = random.Random(seed)
    detected = 0
    missed = []
    for _ in range(count):
        fault = make_fault(objects, rng)
        result = check_objects(fault.objects, log_level=logging.DEBUG)
        if result.ok:
            missed.append(f"step {fault.step}: {fault.description}")
        else:
            detected += 1
    if missed:
        logger.error(f"{len(missed)} of {count} corruptions were accepted, first: {missed[0]}")
    return FaultReport(count, detected, missed)
