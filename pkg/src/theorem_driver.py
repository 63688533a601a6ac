# Theorem driver: scripted replays of the decomposition proofs and the presets

import logging
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .adjunction import apply, block_hom, formal, y_atom
from .calculus import (
    CHI, LMUT, PULL_F, PUSH_F, PUSH_J, SHIFT, TWIST,
    AtomCount, Block, FunctorWord, Gen, Kind, Params, Sod,
    axe, az, bx, certify, column, count_atoms, dz, fy, gen, grid, jz, lmut, make_sod, mk_params, sod_equiv, word,
)
from .errors import (
    InductionStepFailed, InvalidParams, InvalidPreset, RelabelMismatch, ReplayFailed, SodCalcError,
)
from .mutations import Rewriter
from .rules import RuleId, Trace, simplified_phi_word
from .windows import diagnose, explain, window_oracle

logger = logging.getLogger(__name__)


def rotated_blocks(p: Params, k: int) -> List[Block]:
    """<DZ(k+1), ..., DZ(n-1), FY(0), DZ(0), ..., DZ(k-1)>"""
    return [dz(j, p) for j in range(k + 1, p.n)] + [fy(0, p)] + [dz(j, p) for j in range(k)]


def enumerate_cover_sods(p: Params) -> List[Sod]:
    """
    The n rotated decompositions of the cyclic cover, each fully certified

    Args:
        p: Parameters

    Returns:
        One verified Sod per k in Z/n

    Raises:
        CertificationFailed: when a pair does not vanish
    """
    sods = [certify(make_sod(p, rotated_blocks(p, k)), window_oracle, explain) for k in range(p.n)]
    logger.debug(f"{p}: {len(sods)} rotated decompositions certified")
    return sods


class InductionReport(NamedTuple):
    k: int
    trivial: bool
    transforms: int
    trace: Trace
    final: Sod

    @property
    def steps(self) -> int:
        return len(self.trace)


def ck_start_blocks(p: Params, k: int) -> List[Block]:
    """[C_{k-1} in grid order, JZ^{k-1}([d,M-1]), BX^k([M-d,M-1])]"""
    return (grid(p, range(p.M), range(k))
            + [jz(t, k - 1, p) for t in range(p.d, p.M)]
            + column(p, range(p.M - p.d, p.M), k))


def run_column_induction(rw: Rewriter, k: int) -> int:
    """
    Left-mutate each JZ(t,k-1), t = d..M-1, until it meets BX(t,k-1)

    Returns:
        Number of transform steps
    """
    p = rw.params
    transforms = 0
    for t in range(p.d, p.M):
        i = rw.locate(jz(t, k - 1, p))
        while True:
            left = rw.sod.blocks[i - 1] if i > 0 else None
            if left is None or left.kind != Kind.BX:
                raise InductionStepFailed(
                    f"JZ({t},{k - 1}) ran out of BX blocks before meeting BX({t},{k - 1})",
                    {"k": k, "t": t},
                )
            record = rw.left_mutate(i)
            if record.rule == RuleId.LMUT_JZ_TRANSFORM:
                transforms += 1
                break
            i -= 1
    return transforms


def verify_ck(p: Params, k: int) -> InductionReport:
    """
    Replay the induction that identifies C_k with the grid B_X^{[0,k]}([0,M-1])

    Args:
        p: Parameters
        k: Column index, 0 <= k <= n-1

    Returns:
        InductionReport with its own sub-trace

    Raises:
        InductionStepFailed: when a step is not certified or the result is
            not a licensed permutation of the grid
    """
    if not 0 <= k < p.n:
        raise InductionStepFailed(f"k={k} is outside [0, {p.n - 1}]", {"k": k})
    target = make_sod(p, grid(p, range(p.M), range(k + 1)))
    if k == 0:
        return InductionReport(k, True, 0, Trace(p, target.blocks), target)

    start = make_sod(p, ck_start_blocks(p, k))
    rw = Rewriter(start)
    trivial = not p.bz_defined
    transforms = 0
    if not trivial:
        try:
            transforms = run_column_induction(rw, k)
        except ReplayFailed as e:
            raise InductionStepFailed(f"C_{k} induction over {p}: {e}", {"k": k, **e.details})

    if not sod_equiv(rw.sod, target, window_oracle):
        raise InductionStepFailed(f"C_{k} induction over {p} does not reach the grid: {rw.sod}", {"k": k})
    logger.debug(f"C_{k} over {p}: {transforms} transforms, {len(rw.trace)} steps")
    return InductionReport(k, trivial, transforms, rw.trace, rw.sod)


@dataclass
class ReplayResult:
    params: Params
    final: Sod
    trace: Trace
    counts: AtomCount
    inductions: List[InductionReport] = field(default_factory=list)

    @property
    def phi_blocks(self) -> List[Block]:
        return [b for b in self.final.blocks if b.is_phi]

    @property
    def grid_blocks(self) -> List[Block]:
        return [b for b in self.final.blocks if not b.is_phi]


def _step_one(rw: Rewriter):
    """Right-mutate the groups BX^0([m-ad, m-ad+d-1]) through DZ(0..n-a-1), a = 1..n-1."""
    p = rw.params
    for a in range(1, p.n):
        group = list(range(p.m - a * p.d, p.m - a * p.d + p.d))
        for j in range(p.n - a):
            for t in reversed(group):
                src = bx(t - j * p.d, j, p)
                rw.right_mutate(rw.locate(src))


def replay_main(p: Params) -> ReplayResult:
    """
    Replay the main decomposition theorem for one parameter point

    The run expands FY(0), right-mutates the top twists through the DZ
    blocks, expands every DZ, then alternates the column induction with
    PHI formation and finally simplifies every PHI word.

    Args:
        p: Parameters

    Returns:
        ReplayResult with the final decomposition [PHI(0..n-2), grid] and
        its trace

    Raises:
        ReplayFailed: carrying the failing TraceStep when available
    """
    logger.info(f"replaying the main theorem over {p}")
    initial = make_sod(p, [fy(0, p)] + [dz(k, p) for k in range(p.n - 1)])
    rw = Rewriter(initial)
    inductions = []

    try:
        rw.expand(rw.locate(fy(0, p)))
        _step_one(rw)
        for k in range(p.n - 1):
            rw.expand(rw.locate(dz(k, p)))

        for k in range(p.n):
            if k >= 1:
                inductions.append(verify_ck(p, k))
                if p.bz_defined:
                    run_column_induction(rw, k)
                ck = grid(p, range(p.M), range(k + 1))
                rw.canonicalize(k, ck)
            if k < p.n - 1:
                rw.form_phi(rw.locate(az(p.d, k, p)))

        for k in range(p.n - 1):
            rw.simplify_phi(rw.locate(Block(Kind.PHI, None, k)))
    except ReplayFailed:
        raise
    except SodCalcError as e:
        logger.error(f"replay over {p} failed: {e}")
        raise ReplayFailed(str(e), details={"code": e.code, **e.details})

    final = rw.sod
    _check_final_shape(final)
    counts = count_atoms(final)
    expected = AtomCount(p.n * p.M, p.n - 1)
    if counts != expected:
        raise ReplayFailed(f"atom count {tuple(counts)} differs from {tuple(expected)}")
    final = certify(final, window_oracle, explain, provenance="trace")
    logger.info(f"replay over {p} finished in {len(rw.trace)} steps")
    return ReplayResult(p, final, rw.trace, counts, inductions)


def _check_final_shape(final: Sod):
    p = final.params
    heads = final.blocks[:p.n - 1]
    for k, b in enumerate(heads):
        if not b.is_phi or b.k != k or b.word != simplified_phi_word(k, p):
            raise ReplayFailed(f"position {k} of the final decomposition holds {b}, expected a simplified PHI({k})")
    rest = make_sod(p, final.blocks[p.n - 1:])
    if not sod_equiv(rest, make_sod(p, grid(p, range(p.M), range(p.n))), window_oracle):
        raise ReplayFailed(f"the final blocks are not the grid B_X^[0,{p.n - 1}]([0,{p.M - 1}])")


# Word rewriting for the character relabelling of PHI words

CHI_THROUGH_LMUT = "CHI_THROUGH_LMUT"
CHI_INTO_PUSHJ = "CHI_INTO_PUSHJ"
CHI_ZERO_DROP = "CHI_ZERO_DROP"
CHI_PAST_TWIST = "CHI_PAST_TWIST"
CHI_PAST_SHIFT = "CHI_PAST_SHIFT"


def normalize_word(w: FunctorWord, p: Params) -> Tuple[FunctorWord, List[str]]:
    """
    Push every Chi generator to the right until it is absorbed

    Rules:
        Chi(c)·LMut(S) -> LMut(S ⊗ χ^c)·Chi(c)
        Chi(c)·PushJ(k) -> PushJ(k+c)·Chi(0)
        Chi(0) -> (dropped)
        Chi(c)·Twist(t) -> Twist(t)·Chi(c), and likewise past Shift

    Returns:
        (normal form, names of the rules applied in order)
    """
    gens = list(w.gens)
    applied: List[str] = []
    while True:
        for i, g in enumerate(gens):
            if g.name != CHI:
                continue
            c = p.weight(g.arg)
            if c == 0:
                del gens[i]
                applied.append(CHI_ZERO_DROP)
                break
            if i + 1 == len(gens):
                continue
            nxt = gens[i + 1]
            if nxt.name == LMUT:
                gens[i:i + 2] = [lmut([b.with_weight(b.k + c, p) for b in nxt.blocks]), g]
                applied.append(CHI_THROUGH_LMUT)
            elif nxt.name == PUSH_J:
                gens[i:i + 2] = [gen(PUSH_J, nxt.arg + c, p), Gen(CHI, 0)]
                applied.append(CHI_INTO_PUSHJ)
            elif nxt.name in (TWIST, SHIFT):
                gens[i:i + 2] = [nxt, g]
                applied.append(CHI_PAST_TWIST if nxt.name == TWIST else CHI_PAST_SHIFT)
            else:
                continue
            break
        else:
            return FunctorWord(tuple(gens)), applied


class RelabelEntry(NamedTuple):
    k: int
    word: str
    relabelled: str
    applications: int
    rules: Tuple[str, ...]


class RelabelReport(NamedTuple):
    params: Params
    entries: List[RelabelEntry]

    @property
    def ok(self) -> bool:
        return all(e.word == e.relabelled for e in self.entries)


def verify_phi_relabel(p: Params, phis: Optional[Sequence[Block]] = None) -> RelabelReport:
    """
    Check word(PHI(k)) = Chi(k)·word(PHI(0)) after normalisation, for every k

    Args:
        p: Parameters
        phis: Simplified PHI blocks from a replay; the closed-form words are
            used when omitted

    Raises:
        RelabelMismatch: on the first k whose normal forms differ
    """
    words: Dict[int, FunctorWord] = {k: simplified_phi_word(k, p) for k in range(p.n - 1)}
    for b in phis or ():
        words[b.k] = b.word
    base = words[0]
    entries = []
    for k in range(1, p.n - 1):
        relabelled, rules = normalize_word(word(Gen(CHI, k)) * base, p)
        expected, _ = normalize_word(words[k], p)
        if relabelled != expected:
            raise RelabelMismatch(
                f"Chi({k})·word(PHI(0)) normalises to {relabelled}, word(PHI({k})) is {expected}",
                {"k": k},
            )
        entries.append(RelabelEntry(k, str(expected), str(relabelled), len(rules), tuple(rules)))
    return RelabelReport(p, entries)


class SplittingReport(NamedTuple):
    params: Params
    checked: int
    failures: List[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_weight_splitting(p: Params) -> SplittingReport:
    """
    Complete orthogonality of the weight columns

    Same-twist blocks of different weight on [0, M-1], and every twist pair
    on [0, d-1], must vanish in both directions.
    """
    pairs = set()
    for t in range(p.M):
        for k in range(p.n):
            for l in range(p.n):
                if k != l:
                    pairs.add((bx(t, k, p), bx(t, l, p)))
    for r in range(p.d):
        for s in range(p.d):
            for k in range(p.n):
                for l in range(p.n):
                    if k != l:
                        pairs.add((bx(r, k, p), bx(s, l, p)))
    failures = []
    for x, y in sorted(pairs, key=lambda pair: (pair[0].key, pair[1].key)):
        for a, b in ((x, y), (y, x)):
            if not window_oracle(a, b, p):
                failures.append(f"Hom({a}, {b}): {diagnose(a, b, p)}")
    return SplittingReport(p, len(pairs), failures)


class ProjectionEntry(NamedTuple):
    t: int
    k: int
    l: int
    image: str
    verdict: str
    orthogonal: bool


def weight_projection_table(p: Params) -> List[ProjectionEntry]:
    """
    Projection/injection table on the twists [0, d-1]

    Entry (k, l) pushes the weight-l pullback of B(t) forward in weight k
    and records the engine verdict of Hom(BX(t,l), BX(t,k)); it must be
    non-zero exactly on the diagonal, and the off-diagonal entries must be
    completely orthogonal for the window oracle.
    """
    table = []
    for t in range(p.d):
        for k in range(p.n):
            for l in range(p.n):
                image = apply(word(gen(PUSH_F, k, p), gen(PULL_F, l, p)), formal(y_atom(t)), p)
                verdict = block_hom(bx(t, l, p), bx(t, k, p), p)
                orth = window_oracle(bx(t, l, p), bx(t, k, p), p) and window_oracle(bx(t, k, p), bx(t, l, p), p)
                table.append(ProjectionEntry(t, k, l, str(image), verdict.value, orth))
    return table


def projection_table_ok(table: Sequence[ProjectionEntry]) -> bool:
    for e in table:
        if e.k == e.l and (e.verdict != "Nonzero" or e.orthogonal):
            return False
        if e.k != e.l and (e.verdict != "Zero" or not e.orthogonal):
            return False
    return True


class AxeReport(NamedTuple):
    params: Params
    placements: int
    failures: List[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def axe_window(p: Params, k: int, t: int, base: int = 0) -> List[Block]:
    """<BX(c..c+t-1, k), AXE(c+t), BX(c+t..c+M-1, k)> with c = base."""
    return (column(p, range(base, base + t), k) + [axe(base + t)]
            + column(p, range(base + t, base + p.M), k))


def verify_axe_windows(p: Params, base: int = 0) -> AxeReport:
    """
    Certify every placement of AXE inside a weight column of length M

    Each pair is checked with the window oracle and confirmed Zero by the
    adjunction engine.
    """
    failures = []
    placements = 0
    for k in range(p.n):
        for t in range(p.M + 1):
            blocks = axe_window(p, k, t, base)
            placements += 1
            for i in range(len(blocks)):
                for j in range(i):
                    later, earlier = blocks[i], blocks[j]
                    if not window_oracle(later, earlier, p):
                        failures.append(f"k={k} t={t}: Hom({later}, {earlier}) {diagnose(later, earlier, p)}")
                    elif not block_hom(later, earlier, p).is_zero():
                        failures.append(f"k={k} t={t}: engine disagrees on Hom({later}, {earlier})")
    return AxeReport(p, placements, failures)


# Presets

@dataclass(frozen=True)
class PresetInfo:
    name: str
    params: Params
    phi_count: int
    grid_shape: Tuple[int, int]
    verified: bool = True
    components: int = 1
    note: str = ""

    def as_dict(self) -> Dict:
        return {
            "name": self.name,
            "params": self.params.as_dict(),
            "phi_count": self.phi_count,
            "grid": list(self.grid_shape),
            "verified": self.verified,
            "components": self.components,
            "note": self.note,
        }


def _shape(name: str, p: Params, note: str = "") -> PresetInfo:
    return PresetInfo(name, p, p.n - 1, (p.n, p.M), note=note)


def preset(name: str) -> PresetInfo:
    """
    Resolve a named parameter point

    Args:
        name: quartic (quartic_double_solid), gm:N (gm(N)), cubic:N
            (cyclic_cubic(N)) or double_cyclic_cubic

    Returns:
        PresetInfo with the parameters and the expected final shape

    Raises:
        InvalidPreset: for unknown names or dimensions outside the valid range
    """
    text = name.strip().lower().replace("(", ":").rstrip(")")
    head, _, arg = text.partition(":")

    if head in ("quartic", "quartic_double_solid"):
        return _shape("quartic_double_solid", mk_params(2, 2, 4), "A-part equivalent to D(Z)")

    if head == "double_cyclic_cubic":
        inner = mk_params(3, 1, 5)
        return PresetInfo("double_cyclic_cubic", inner, 4, (inner.n, inner.M), verified=False, components=2,
                          note="informational: two components shaped like the cyclic cubic A-part")

    if head not in ("gm", "cubic", "cyclic_cubic"):
        raise InvalidPreset(f"unknown preset {name!r}", {"preset": name})
    try:
        dim = int(arg)
    except ValueError:
        raise InvalidPreset(f"preset {name!r} needs an integer dimension", {"preset": name})

    if head == "gm":
        if not 3 <= dim <= 6:
            raise InvalidPreset(f"gm(N) needs 3 <= N <= 6, got {dim}", {"preset": name})
        return _shape(f"gm({dim})", mk_params(2, 1, dim - 1))

    if dim < 3:
        raise InvalidPreset(f"cyclic_cubic(N) needs N >= 3, got {dim}", {"preset": name})
    try:
        return _shape(f"cyclic_cubic({dim})", mk_params(3, 1, dim + 1))
    except InvalidParams as e:
        raise InvalidPreset(str(e), {"preset": name})


PRESET_NAMES = ["quartic", "gm:3", "gm:4", "gm:5", "gm:6", "cubic:4", "double_cyclic_cubic"]
