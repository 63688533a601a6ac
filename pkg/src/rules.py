# Rewrite-rule vocabulary, trace steps and oracle-free structural rewrites
#
# Both the mutation engine and the trace checker build on this module, so it
# must stay independent of any vanishing oracle.

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from .calculus import (
    PUSH_J, TWIST, Block, FunctorWord, Gen, Kind, Params, bx, column, expansion, gen, grid, lmut, phi, word,
)
from .errors import RuleNotApplicable


class RuleId(str, Enum):
    EXPAND_FY = "EXPAND_FY"
    EXPAND_DZ = "EXPAND_DZ"
    SWAP_ORTH = "SWAP_ORTH"
    RMUT_THROUGH_DZ = "RMUT_THROUGH_DZ"
    LMUT_JZ_TRANSFORM = "LMUT_JZ_TRANSFORM"
    LMUT_IDENTITY = "LMUT_IDENTITY"
    PHI_FORM = "PHI_FORM"
    PHI_SIMPLIFY = "PHI_SIMPLIFY"


class Condition(NamedTuple):
    """A side condition: Hom(p, q) = 0, with the verdict and citation recorded."""

    p: Block
    q: Block
    verdict: str
    cite: str


@dataclass(frozen=True)
class TraceStep:
    step: int
    rule: RuleId
    pos: Tuple[int, int]
    before: Tuple[Block, ...]
    after: Tuple[Block, ...]
    conds: Tuple[Condition, ...] = ()

    def __str__(self) -> str:
        before = ", ".join(str(b) for b in self.before)
        after = ", ".join(str(b) for b in self.after)
        return f"#{self.step} {self.rule.value} @{list(self.pos)}: [{before}] -> [{after}]"


SCHEDULE = "a=1..n-1 rightmost-first"


@dataclass
class Trace:
    params: Params
    initial: Tuple[Block, ...]
    steps: List[TraceStep] = field(default_factory=list)
    schedule: str = SCHEDULE

    def __len__(self) -> int:
        return len(self.steps)

    def next_id(self) -> int:
        return len(self.steps) + 1

    def count(self, rule: RuleId) -> int:
        return sum(1 for s in self.steps if s.rule == rule)


def raw_phi_word(k: int, p: Params) -> FunctorWord:
    """LMut(C_k)·PushJ(k)·Twist(d) with C_k listed in grid order."""
    return word(lmut(grid(p, range(p.M), range(k + 1))), gen(PUSH_J, k, p), Gen(TWIST, p.d))


def simplified_phi_word(k: int, p: Params) -> FunctorWord:
    return word(lmut(column(p, range(p.d), k)), gen(PUSH_J, k, p), Gen(TWIST, p.d))


def phi_reorder_pairs(k: int, p: Params) -> List[Tuple[Block, Block]]:
    """
    Neighbour swaps that bring BX^k([0,d-1]) to the front of the grid C_k

    Each kept block BX(s,k) overtakes the blocks BX(r,l) with r <= s and
    l < k; the list holds (kept, overtaken) pairs.
    """
    pairs = []
    for s in range(p.d):
        for r in range(s + 1):
            for l in range(k):
                pairs.append((bx(s, k, p), bx(r, l, p)))
    return pairs


def phi_dropped_factors(k: int, p: Params) -> List[Block]:
    kept = set(column(p, range(p.d), k))
    return [b for b in grid(p, range(p.M), range(k + 1)) if b not in kept]


def _is(b: Block, *kinds: Kind) -> bool:
    return b.kind in kinds


def _expand_fy_ok(before: Sequence[Block], p: Params) -> bool:
    return len(before) == 1 and _is(before[0], Kind.FY)


def _expand_dz_ok(before: Sequence[Block], p: Params) -> bool:
    return len(before) == 1 and _is(before[0], Kind.DZ)


def _swap_ok(before: Sequence[Block], p: Params) -> bool:
    return len(before) == 2 and not (before[0].is_phi or before[1].is_phi)


def _rmut_ok(before: Sequence[Block], p: Params) -> bool:
    return (len(before) == 2 and _is(before[0], Kind.BX) and _is(before[1], Kind.DZ)
            and before[0].k == before[1].k)


def _lmut_identity_ok(before: Sequence[Block], p: Params) -> bool:
    return len(before) == 2 and _is(before[0], Kind.BX) and _is(before[1], Kind.JZ, Kind.AZ)


def _lmut_transform_ok(before: Sequence[Block], p: Params) -> bool:
    return (len(before) == 2 and _is(before[0], Kind.BX) and _is(before[1], Kind.JZ)
            and before[0].k == before[1].k and before[0].t == before[1].t)


def _phi_form_ok(before: Sequence[Block], p: Params) -> bool:
    if not before or not _is(before[-1], Kind.AZ) or before[-1].t != p.d:
        return False
    prefix = before[:-1]
    if any(b.is_phi for b in prefix):
        return False
    return Counter(prefix) == Counter(grid(p, range(p.M), range(before[-1].k + 1)))


def _phi_simplify_ok(before: Sequence[Block], p: Params) -> bool:
    return (len(before) == 1 and before[0].is_phi
            and before[0].word == raw_phi_word(before[0].k, p))


@dataclass(frozen=True)
class RewriteRule:
    id: RuleId
    anchor: str
    applicable: Callable[[Sequence[Block], Params], bool]


RULES: Dict[RuleId, RewriteRule] = {
    r.id: r for r in (
        RewriteRule(RuleId.EXPAND_FY, "D(Y) = <B, B(1), ..., B(m-1)>", _expand_fy_ok),
        RewriteRule(RuleId.EXPAND_DZ, "D(Z) = <A_Z(d), B_Z(d), ..., B_Z(M-1)>", _expand_dz_ok),
        RewriteRule(RuleId.SWAP_ORTH, "completely orthogonal neighbours commute", _swap_ok),
        RewriteRule(RuleId.RMUT_THROUGH_DZ, "R_{j_k* D(Z)}(B_X^k(t)) = B_X^{k+1}(t-d)", _rmut_ok),
        RewriteRule(RuleId.LMUT_JZ_TRANSFORM, "L_{B_X^k(t)}(j_k* B_Z(t)) = B_X^{k+1}(t-d)", _lmut_transform_ok),
        RewriteRule(RuleId.LMUT_IDENTITY, "L_A(G) = G when Hom(A, G) = 0", _lmut_identity_ok),
        RewriteRule(RuleId.PHI_FORM, "Phi_k = L_{C_k} ∘ j_k* ∘ O_Z(d)", _phi_form_ok),
        RewriteRule(RuleId.PHI_SIMPLIFY, "Phi_k = L_{B_X^k([0,d-1])} ∘ j_k* ∘ O_Z(d)", _phi_simplify_ok),
    )
}


def rewrite(rule: RuleId, before: Sequence[Block], p: Params, step: Optional[int] = None) -> Tuple[Block, ...]:
    """
    Structural result of a rule on a slice

    Args:
        rule: Rule id
        before: Slice the rule rewrites
        p: Parameters
        step: Id of the step being recorded (becomes the provenance of PHI blocks)

    Returns:
        The rewritten slice

    Raises:
        RuleNotApplicable: when the slice does not have the rule's shape
    """
    if not RULES[rule].applicable(before, p):
        raise RuleNotApplicable(
            f"{rule.value} does not apply to [{', '.join(str(b) for b in before)}]",
            {"rule": rule.value},
        )
    if rule in (RuleId.EXPAND_FY, RuleId.EXPAND_DZ):
        return tuple(expansion(before[0], p))
    if rule in (RuleId.SWAP_ORTH, RuleId.LMUT_IDENTITY):
        return (before[1], before[0])
    if rule == RuleId.RMUT_THROUGH_DZ:
        b, z = before
        return (z, bx(b.t - p.d, b.k + 1, p))
    if rule == RuleId.LMUT_JZ_TRANSFORM:
        b = before[0]
        return (bx(b.t - p.d, b.k + 1, p), b)
    if rule == RuleId.PHI_FORM:
        k = before[-1].k
        return (phi(k, raw_phi_word(k, p), step, p),) + tuple(before[:-1])
    k = before[0].k
    return (phi(k, simplified_phi_word(k, p), step, p),)


def required_pairs(rule: RuleId, before: Sequence[Block], p: Params) -> List[Tuple[Block, Block]]:
    """Pairs (p, q) whose Hom must vanish for the rule to be sound on this slice."""
    if rule in (RuleId.SWAP_ORTH, RuleId.LMUT_IDENTITY):
        x, y = before
        return [(x, y), (y, x)]
    if rule == RuleId.RMUT_THROUGH_DZ:
        b, z = before
        return [(bx(b.t - p.d, b.k + 1, p), z)]
    if rule == RuleId.LMUT_JZ_TRANSFORM:
        b = before[0]
        return [(b, bx(b.t - p.d, b.k + 1, p))]
    if rule == RuleId.PHI_SIMPLIFY:
        k = before[0].k
        pairs = []
        for kept, other in phi_reorder_pairs(k, p):
            pairs.extend([(kept, other), (other, kept)])
        target = Block(Kind.AZ, p.d, k)
        pairs.extend((b, target) for b in phi_dropped_factors(k, p))
        return pairs
    return []
