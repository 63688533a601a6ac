# Core calculus: parameters, blocks, functor words and decomposition sequences

import logging
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import CertificationFailed, DuplicateBlock, InvalidParams, ParamMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Params:
    """
    Arithmetic context of a cyclic cover.

    n is the cover degree, d the divisor degree parameter and m the length of
    the rectangular Lefschetz decomposition of D(Y). M is derived and never
    stored, so it cannot drift from m - (n-1)d.
    """

    n: int
    d: int
    m: int

    def __post_init__(self):
        for name in ('n', 'd', 'm'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidParams(f"{name} must be an integer, got {value!r}", code="NotAnInteger")
        if self.n < 2:
            raise InvalidParams(f"cover degree n={self.n} must be at least 2", code="NTooSmall")
        if self.d < 1:
            raise InvalidParams(f"divisor degree d={self.d} must be at least 1", code="DTooSmall")
        if self.n * self.d > self.m:
            raise InvalidParams(
                f"n*d = {self.n * self.d} exceeds m = {self.m}",
                {"n": self.n, "d": self.d, "m": self.m},
                code="NdExceedsM",
            )

    @property
    def M(self) -> int:
        return self.m - (self.n - 1) * self.d

    @property
    def e(self) -> int:
        """Degree of the branch divisor Z in units of the Lefschetz twist."""
        return self.n * self.d

    @property
    def bz_length(self) -> int:
        """Length of the rectangular Lefschetz decomposition of D(Z); zero when m = nd."""
        return self.M - self.d

    @property
    def bz_defined(self) -> bool:
        return self.m > self.n * self.d

    def weight(self, k: int) -> int:
        return k % self.n

    def as_dict(self) -> Dict[str, int]:
        return {"n": self.n, "d": self.d, "m": self.m, "M": self.M}

    def __str__(self) -> str:
        return f"(n={self.n}, d={self.d}, m={self.m}, M={self.M})"


def mk_params(n: int, d: int, m: int) -> Params:
    """
    Validate and build a parameter triple

    Args:
        n: Cover degree (at least 2)
        d: Divisor degree parameter (at least 1)
        m: Lefschetz length (at least n*d)

    Returns:
        Params with M = m - (n-1)d

    Raises:
        InvalidParams: with code NTooSmall, DTooSmall or NdExceedsM
    """
    return Params(n, d, m)


class Kind(str, Enum):
    BX = "BX"
    JZ = "JZ"
    AZ = "AZ"
    AXE = "AXE"
    FY = "FY"
    DZ = "DZ"
    PHI = "PHI"


TWISTED_KINDS = (Kind.BX, Kind.JZ, Kind.AZ, Kind.AXE)
WEIGHTED_KINDS = (Kind.BX, Kind.JZ, Kind.AZ, Kind.FY, Kind.DZ, Kind.PHI)
COMPOSITE_KINDS = (Kind.FY, Kind.DZ)
Z_KINDS = (Kind.JZ, Kind.AZ)


# Functor-word generators. Indices of the weighted ones are residues mod n.
PULL_F = "PullF"
PUSH_F = "PushF"
PUSH_J = "PushJ"
PULL_J = "PullJ"
SHRIEK_J = "ShriekJ"
SHRIEK_F = "ShriekF"
PUSH_I = "PushI"
PULL_I = "PullI"
TWIST = "Twist"
CHI = "Chi"
SHIFT = "Shift"
LMUT = "LMut"

WEIGHTED_GENERATORS = (PULL_F, PUSH_F, PUSH_J, PULL_J, SHRIEK_J, SHRIEK_F)
INTEGER_GENERATORS = (TWIST, CHI, SHIFT)
BARE_GENERATORS = (PUSH_I, PULL_I)


@dataclass(frozen=True)
class Gen:
    name: str
    arg: Optional[int] = None
    blocks: Tuple['Block', ...] = ()

    def __str__(self) -> str:
        if self.name == LMUT:
            return f"LMut({','.join(str(b) for b in self.blocks)})"
        if self.arg is None:
            return self.name
        return f"{self.name}({self.arg})"


@dataclass(frozen=True)
class FunctorWord:
    """A composite functor; the leftmost generator is applied last."""

    gens: Tuple[Gen, ...] = ()

    def __mul__(self, other: 'FunctorWord') -> 'FunctorWord':
        return FunctorWord(self.gens + other.gens)

    def __len__(self) -> int:
        return len(self.gens)

    def __iter__(self) -> Iterator[Gen]:
        return iter(self.gens)

    def __str__(self) -> str:
        if not self.gens:
            return "id"
        return "·".join(str(g) for g in self.gens)


def gen(name: str, arg: Optional[int] = None, p: Optional[Params] = None) -> Gen:
    """Build a generator, reducing weight indices mod n when params are known."""
    if name in WEIGHTED_GENERATORS and p is not None:
        arg = p.weight(arg)
    return Gen(name, arg)


def word(*gens: Gen) -> FunctorWord:
    return FunctorWord(tuple(gens))


def lmut(blocks: Sequence['Block']) -> Gen:
    return Gen(LMUT, None, tuple(blocks))


@dataclass(frozen=True)
class Block:
    """
    Label of an admissible subcategory.

    t is the twist (unbounded) and k the weight (reduced mod n by the
    factories below). PHI blocks carry their defining word and the trace step
    that created them; the step id does not take part in comparisons.
    """

    kind: Kind
    t: Optional[int] = None
    k: Optional[int] = None
    word: Optional[FunctorWord] = None
    origin: Optional[int] = field(default=None, compare=False)

    @property
    def key(self) -> Tuple[str, Optional[int], Optional[int]]:
        return (self.kind.value, self.t, self.k)

    @property
    def is_composite(self) -> bool:
        return self.kind in COMPOSITE_KINDS

    @property
    def is_phi(self) -> bool:
        return self.kind == Kind.PHI

    def with_weight(self, k: int, p: Params) -> 'Block':
        return replace(self, k=p.weight(k))

    def __str__(self) -> str:
        if self.kind in (Kind.BX, Kind.JZ, Kind.AZ):
            return f"{self.kind.value}({self.t},{self.k})"
        if self.kind == Kind.AXE:
            return f"AXE({self.t})"
        return f"{self.kind.value}({self.k})"


def bx(t: int, k: int, p: Params) -> Block:
    return Block(Kind.BX, t, p.weight(k))


def jz(t: int, k: int, p: Params) -> Block:
    return Block(Kind.JZ, t, p.weight(k))


def az(t: int, k: int, p: Params) -> Block:
    return Block(Kind.AZ, t, p.weight(k))


def axe(t: int) -> Block:
    return Block(Kind.AXE, t, None)


def fy(k: int, p: Params) -> Block:
    return Block(Kind.FY, None, p.weight(k))


def dz(k: int, p: Params) -> Block:
    return Block(Kind.DZ, None, p.weight(k))


def phi(k: int, defining: FunctorWord, origin: Optional[int], p: Params) -> Block:
    if not defining.gens:
        raise ValueError("PHI blocks need a non-empty defining word")
    return Block(Kind.PHI, None, p.weight(k), defining, origin)


def expansion(b: Block, p: Params) -> List[Block]:
    """
    Generator blocks of a composite block

    Args:
        b: FY(k) or DZ(k)
        p: Parameters

    Returns:
        FY(k) -> BX(0..m-1, k); DZ(k) -> AZ(d, k), JZ(d..M-1, k). Any other
        block expands to itself.
    """
    if b.kind == Kind.FY:
        return [bx(t, b.k, p) for t in range(p.m)]
    if b.kind == Kind.DZ:
        return [az(p.d, b.k, p)] + [jz(t, b.k, p) for t in range(p.d, p.M)]
    return [b]


def grid(p: Params, twists: Iterable[int], weights: Iterable[int]) -> List[Block]:
    """BX blocks in grid order: twist-major, then weight."""
    weights = list(weights)
    return [bx(t, k, p) for t in twists for k in weights]


def column(p: Params, twists: Iterable[int], k: int) -> List[Block]:
    return [bx(t, k, p) for t in twists]


class PairWitness(NamedTuple):
    later: int
    earlier: int
    cite: str


@dataclass(frozen=True)
class Sod:
    """An ordered block sequence claiming Hom(blocks[i], blocks[j]) = 0 for i > j."""

    params: Params
    blocks: Tuple[Block, ...]
    verified: bool = False
    witness: Tuple[PairWitness, ...] = ()

    def __post_init__(self):
        seen = set()
        for b in self.blocks:
            if b.key in seen:
                raise DuplicateBlock(f"block {b} appears twice", {"block": str(b)})
            seen.add(b.key)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    def index(self, b: Block) -> int:
        for i, x in enumerate(self.blocks):
            if x == b or (b.is_phi and x.is_phi and x.k == b.k and b.word is None):
                return i
        raise ValueError(f"{b} not in decomposition")

    def splice(self, start: int, stop: int, new: Sequence[Block]) -> 'Sod':
        blocks = self.blocks[:start] + tuple(new) + self.blocks[stop:]
        return Sod(self.params, blocks)

    def __str__(self) -> str:
        return "sod [ " + ", ".join(str(b) for b in self.blocks) + " ]"


def make_sod(p: Params, blocks: Iterable[Block]) -> Sod:
    return Sod(p, tuple(blocks))


# An oracle certifies Hom(p, q) = 0 between two non-PHI blocks.
Oracle = Callable[[Block, Block, Params], bool]


class EquivResult(NamedTuple):
    equal: bool
    witness: Tuple[int, ...]

    def __bool__(self) -> bool:
        return self.equal


def invert_witness(witness: Sequence[int]) -> Tuple[int, ...]:
    """Swap sequence taking b back to a."""
    return tuple(reversed(witness))


def apply_swaps(s: Sod, witness: Sequence[int]) -> Sod:
    blocks = list(s.blocks)
    for i in witness:
        blocks[i], blocks[i + 1] = blocks[i + 1], blocks[i]
    return Sod(s.params, tuple(blocks))


def _licenser(p: Params, oracle: Oracle) -> Callable[[Block, Block], bool]:
    cache: Dict[Tuple[Block, Block], bool] = {}

    def licensed(x: Block, y: Block) -> bool:
        if x.is_phi or y.is_phi:
            return False
        key = (x, y) if str(x) <= str(y) else (y, x)
        if key not in cache:
            cache[key] = oracle(x, y, p) and oracle(y, x, p)
        return cache[key]

    return licensed


def sod_equiv(a: Sod, b: Sod, oracle: Oracle, search_limit: Optional[int] = None) -> EquivResult:
    """
    Decide whether b is a licensed permutation of a

    A swap of neighbours is licensed when the oracle certifies the pair
    completely orthogonal. Blocks are moved into b's order greedily; because
    the licence of a pair does not depend on its position the greedy pass
    finds a witness whenever one exists. A bounded breadth-first search runs
    before a negative answer is returned.

    Args:
        a: Source decomposition
        b: Target decomposition
        oracle: Vanishing oracle
        search_limit: Node budget of the fallback search

    Returns:
        EquivResult(equal, witness) where witness lists swap positions i
        (swapping i and i+1) taking a to b
    """
    if a.params != b.params:
        raise ParamMismatch(f"cannot compare decompositions over {a.params} and {b.params}")
    if a.blocks == b.blocks:
        return EquivResult(True, ())
    if Counter(a.blocks) != Counter(b.blocks):
        return EquivResult(False, ())

    licensed = _licenser(a.params, oracle)
    seq = list(a.blocks)
    witness: List[int] = []
    greedy_ok = True
    for j, target in enumerate(b.blocks):
        pos = seq.index(target, j)
        while pos > j:
            if not licensed(seq[pos - 1], seq[pos]):
                greedy_ok = False
                break
            seq[pos - 1], seq[pos] = seq[pos], seq[pos - 1]
            witness.append(pos - 1)
            pos -= 1
        if not greedy_ok:
            break
    if greedy_ok:
        return EquivResult(True, tuple(witness))

    logger.debug(f"greedy regrouping stuck for {len(a)} blocks, falling back to search")
    return _search_equiv(a, b, licensed, search_limit)


def _search_equiv(a: Sod, b: Sod, licensed, search_limit: Optional[int]) -> EquivResult:
    if search_limit is None:
        from .config import Config
        search_limit = Config.EQUIV_SEARCH_LIMIT
    start = a.blocks
    goal = b.blocks
    max_depth = len(start) ** 2
    parents: Dict[Tuple[Block, ...], Tuple[Optional[Tuple[Block, ...]], int]] = {start: (None, -1)}
    queue = deque([(start, 0)])
    while queue and len(parents) <= search_limit:
        state, depth = queue.popleft()
        if state == goal:
            path = []
            while parents[state][0] is not None:
                prev, i = parents[state]
                path.append(i)
                state = prev
            return EquivResult(True, tuple(reversed(path)))
        if depth >= max_depth:
            continue
        for i in range(len(state) - 1):
            if not licensed(state[i], state[i + 1]):
                continue
            nxt = state[:i] + (state[i + 1], state[i]) + state[i + 2:]
            if nxt not in parents:
                parents[nxt] = (state, i)
                queue.append((nxt, depth + 1))
    return EquivResult(False, ())


class AtomCount(NamedTuple):
    b_type: int
    a_type: int


def count_atoms(s: Sod) -> AtomCount:
    """
    Count B-type and A-type atoms, expanding composite blocks

    Args:
        s: Decomposition

    Returns:
        AtomCount(b_type, a_type)
    """
    p = s.params
    b_type = 0
    a_type = 0
    for b in s.blocks:
        if b.kind in (Kind.BX, Kind.JZ):
            b_type += 1
        elif b.kind in (Kind.AZ, Kind.PHI):
            a_type += 1
        elif b.kind == Kind.FY:
            b_type += p.m
        elif b.kind == Kind.DZ:
            b_type += p.bz_length
            a_type += 1
        elif b.kind == Kind.AXE:
            a_type += p.n - 1
    return AtomCount(b_type, a_type)


def certify(s: Sod, oracle: Oracle, explain: Optional[Callable[[Block, Block, Params], str]] = None,
            provenance: Optional[str] = None) -> Sod:
    """
    Check every pair i > j and return the decomposition marked verified

    Pairs involving PHI blocks can only be justified by trace provenance.
    """
    witnesses = []
    for i in range(len(s.blocks)):
        for j in range(i):
            later, earlier = s.blocks[i], s.blocks[j]
            if later.is_phi or earlier.is_phi:
                if provenance is None:
                    raise CertificationFailed(
                        f"pair ({later}, {earlier}) involves a PHI block and no provenance was given",
                        {"later": str(later), "earlier": str(earlier)},
                    )
                witnesses.append(PairWitness(i, j, provenance))
                continue
            if not oracle(later, earlier, s.params):
                raise CertificationFailed(
                    f"Hom({later}, {earlier}) is not certified zero over {s.params}",
                    {"later": str(later), "earlier": str(earlier)},
                )
            cite = explain(later, earlier, s.params) if explain else "certified"
            witnesses.append(PairWitness(i, j, cite))
    return Sod(s.params, s.blocks, True, tuple(witnesses))
