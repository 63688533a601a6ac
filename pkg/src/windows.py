# Window oracle: closed-form vanishing rules with citations

import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple

from .adjunction import block_hom, relative_pair
from .calculus import Block, Kind, Params, axe, az, bx, dz, expansion, fy, jz
from .errors import BZUndefined, NotGuaranteedNoExplanation, PhiBlockUnsupported

logger = logging.getLogger(__name__)


class Vanishing(str, Enum):
    GUARANTEED = "Guaranteed"
    NOT_GUARANTEED = "NotGuaranteed"

    def __bool__(self) -> bool:
        return self is Vanishing.GUARANTEED


class RuleOutcome(NamedTuple):
    fired: bool
    text: str


def _window(lo: int, value: int, hi: int) -> bool:
    return lo <= value <= hi


def _bx_bx(r: int, k: int, s: int, l: int, p: Params) -> RuleOutcome:
    a = (k - l) % p.n
    x = r - s + a * p.d
    if _window(1, x, p.m - 1):
        return RuleOutcome(True, f"Lefschetz window on Y (Y window 1 ≤ {x} ≤ {p.m - 1}, a = {a})")
    return RuleOutcome(False, f"via the Lefschetz window on Y: r−s+a·d = {x} is outside [1, {p.m - 1}] (a = {a})")


def _z_window(plabel: str, qlabel: str, delta: int, p: Params, branch: str, name: str) -> RuleOutcome:
    width = p.bz_length
    if plabel == "B" and qlabel == "B":
        lo, hi = 1, width - 1
    elif plabel == "A" and qlabel == "B":
        lo, hi = 1, width
    elif plabel == "B" and qlabel == "A":
        lo, hi = 0, width - 1
    else:
        return RuleOutcome(False, f"via {branch}: A_Z to A_Z vanishing is not derivable")
    if _window(lo, delta, hi):
        return RuleOutcome(True, f"Z-window, {name} ({lo} ≤ {delta} ≤ {hi})")
    return RuleOutcome(False, f"via {branch}: Z window {lo} ≤ {delta} ≤ {hi} fails")


def _label(b: Block) -> str:
    return "B" if b.kind == Kind.JZ else "A"


def _atomic(pb: Block, qb: Block, p: Params) -> RuleOutcome:
    d = p.d
    if pb.kind == Kind.BX and qb.kind == Kind.BX:
        return _bx_bx(pb.t, pb.k, qb.t, qb.k, p)

    if pb.kind == Kind.BX and qb.kind in (Kind.JZ, Kind.AZ):
        if qb.k != pb.k:
            return RuleOutcome(True, f"sojf: k ≠ ℓ (k={qb.k}, ℓ={pb.k})")
        return _z_window("B", _label(qb), pb.t - qb.t, p, "k = ℓ branch of (sojf)", "k=l branch")

    if pb.kind in (Kind.JZ, Kind.AZ) and qb.kind == Kind.BX:
        if pb.k != p.weight(qb.k - 1):
            return RuleOutcome(True, f"sofj: k ≠ ℓ−1 (k={pb.k}, ℓ={qb.k})")
        return _z_window(_label(pb), "B", pb.t - qb.t - d, p, "k = ℓ−1 branch of (sofj)", "k=l−1 branch")

    if pb.kind in (Kind.JZ, Kind.AZ) and qb.kind in (Kind.JZ, Kind.AZ):
        if qb.k == pb.k:
            return _z_window(_label(pb), _label(qb), pb.t - qb.t, p, "k = ℓ branch of (sojj)", "equal-weight branch")
        if qb.k == p.weight(pb.k + 1):
            return _z_window(_label(pb), _label(qb), pb.t - d - qb.t, p, "k = ℓ+1 branch of (sojj)", "ℓ+1 branch")
        return RuleOutcome(True, f"sojj: k ≠ ℓ, ℓ+1 (k={qb.k}, ℓ={pb.k})")

    if pb.kind == Kind.AXE and qb.kind == Kind.BX:
        x = pb.t - qb.t
        if _window(1, x, p.M):
            return RuleOutcome(True, f"A_X window family (1 ≤ {x} ≤ M = {p.M})")
        return RuleOutcome(False, f"via the A_X window family: 1 ≤ {x} ≤ M = {p.M} fails")

    if pb.kind == Kind.BX and qb.kind == Kind.AXE:
        x = pb.t - qb.t
        if _window(0, x, p.M - 1):
            return RuleOutcome(True, f"A_X window family (0 ≤ {x} ≤ M−1 = {p.M - 1})")
        return RuleOutcome(False, f"via the A_X window family: 0 ≤ {x} ≤ M−1 = {p.M - 1} fails")

    return RuleOutcome(False, f"no window relates {pb.kind.value} to {qb.kind.value}")


_ON_Y = (Kind.BX, Kind.FY)
_ON_Z = (Kind.JZ, Kind.AZ, Kind.DZ)


def _composite_citation(pb: Block, qb: Block, pairs: int, p: Params) -> str:
    # One side is composite here; cite the weight rule when it covers every pair
    if pb.kind in _ON_Y and qb.kind in _ON_Z and qb.k != pb.k:
        return f"sojf: k ≠ ℓ (k={qb.k}, ℓ={pb.k})"
    if pb.kind in _ON_Z and qb.kind in _ON_Y and pb.k != p.weight(qb.k - 1):
        return f"sofj: k ≠ ℓ−1 (k={pb.k}, ℓ={qb.k})"
    if pb.kind in _ON_Z and qb.kind in _ON_Z and qb.k not in (pb.k, p.weight(pb.k + 1)):
        return f"sojj: k ≠ ℓ, ℓ+1 (k={qb.k}, ℓ={pb.k})"
    return f"all {pairs} expansion pairs vanish"


def _evaluate(pb: Block, qb: Block, p: Params) -> RuleOutcome:
    if pb.is_phi or qb.is_phi:
        raise PhiBlockUnsupported("PHI blocks are provenance-only; no window applies")
    if not (pb.is_composite or qb.is_composite):
        return _atomic(pb, qb, p)
    pairs = 0
    for x in expansion(pb, p):
        for y in expansion(qb, p):
            outcome = _atomic(x, y, p)
            if not outcome.fired:
                return RuleOutcome(False, f"{outcome.text} (at {x} vs {y})")
            pairs += 1
    return RuleOutcome(True, _composite_citation(pb, qb, pairs, p))


@lru_cache(maxsize=1 << 16)
def _fires(pb: Block, qb: Block, p: Params) -> bool:
    return _evaluate(pb, qb, p).fired


def vanishes(pblock: Block, qblock: Block, p: Params) -> Vanishing:
    """
    Closed-form check that Hom(pblock, qblock) = 0

    Args:
        pblock: Source block (not PHI)
        qblock: Target block (not PHI)
        p: Parameters

    Returns:
        Vanishing.GUARANTEED when a window rule fires
    """
    if pblock.is_phi or qblock.is_phi:
        raise PhiBlockUnsupported("PHI blocks are provenance-only; no window applies")
    fired = _fires(*relative_pair(pblock, qblock), p)
    return Vanishing.GUARANTEED if fired else Vanishing.NOT_GUARANTEED


def explain(pblock: Block, qblock: Block, p: Params) -> str:
    """Citation of the rule that makes Hom(pblock, qblock) vanish."""
    outcome = _evaluate(pblock, qblock, p)
    if not outcome.fired:
        raise NotGuaranteedNoExplanation(f"Hom({pblock}, {qblock}) is not guaranteed to vanish")
    return outcome.text


def diagnose(pblock: Block, qblock: Block, p: Params) -> str:
    """Name the rule branch that failed; empty for guaranteed pairs."""
    outcome = _evaluate(pblock, qblock, p)
    return "" if outcome.fired else outcome.text


def window_oracle(pblock: Block, qblock: Block, p: Params) -> bool:
    return bool(vanishes(pblock, qblock, p))


class Mismatch(NamedTuple):
    p: str
    q: str
    oracle: str
    engine: str


class CrosscheckReport(NamedTuple):
    params: Params
    twist_range: Tuple[int, int]
    compared: int
    skipped: int
    mismatches: List[Mismatch]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def crosscheck_blocks(p: Params, twist_range: Tuple[int, int]) -> List[Block]:
    """Every non-PHI block with twists in the (inclusive) range, all weights."""
    lo, hi = twist_range
    blocks: List[Block] = []
    for t in range(lo, hi + 1):
        for k in range(p.n):
            blocks.extend([bx(t, k, p), jz(t, k, p), az(t, k, p)])
        blocks.append(axe(t))
    for k in range(p.n):
        blocks.extend([fy(k, p), dz(k, p)])
    return blocks


def _pair_key(x: Block, y: Block) -> Tuple:
    if x.t is None or y.t is None:
        return (x.key, y.key)
    return (x.kind, x.k, y.kind, y.k, x.t - y.t)


def _crosscheck_rows(args) -> Tuple[int, int, List[Mismatch]]:
    p, rows, columns = args
    compared = 0
    skipped = 0
    mismatches = []
    verdicts: Dict[Tuple, Optional[Tuple[str, str]]] = {}
    for x in rows:
        for y in columns:
            key = _pair_key(x, y)
            if key not in verdicts:
                try:
                    engine = block_hom(x, y, p)
                except BZUndefined:
                    verdicts[key] = None
                else:
                    oracle = vanishes(x, y, p)
                    verdicts[key] = (oracle.value, engine.value) if bool(oracle) != engine.is_zero() else ()
            outcome = verdicts[key]
            if outcome is None:
                skipped += 1
                continue
            compared += 1
            if outcome:
                mismatches.append(Mismatch(str(x), str(y), *outcome))
    return compared, skipped, mismatches


def crosscheck(p: Params, twist_range: Tuple[int, int], jobs: int = 1) -> CrosscheckReport:
    """
    Compare the closed forms against the adjunction engine pair by pair

    Args:
        p: Parameters
        twist_range: Inclusive (lo, hi) twist window
        jobs: Worker processes; rows of the pair table are split between them

    Returns:
        CrosscheckReport; pairs the engine cannot evaluate (B_Z undefined)
        are counted as skipped
    """
    blocks = crosscheck_blocks(p, twist_range)
    if jobs <= 1:
        chunks = [(p, blocks, blocks)]
        results = [_crosscheck_rows(chunks[0])]
    else:
        size = max(1, len(blocks) // (jobs * 4))
        chunks = [(p, blocks[i:i + size], blocks) for i in range(0, len(blocks), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_crosscheck_rows, chunks))

    compared = sum(r[0] for r in results)
    skipped = sum(r[1] for r in results)
    mismatches = sorted(m for r in results for m in r[2])
    if mismatches:
        logger.error(f"crosscheck {p}: {len(mismatches)} disagreements, first {mismatches[0]}")
    else:
        logger.info(f"crosscheck {p}: {compared} pairs agree, {skipped} skipped")
    return CrosscheckReport(p, tuple(twist_range), compared, skipped, mismatches)
