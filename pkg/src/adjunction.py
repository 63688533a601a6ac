# Adjunction engine: formal objects, functor application and Hom evaluation
#
# This module derives vanishing from the base Lefschetz windows on Y and Z
# only. It must not import the window oracle.

import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .calculus import (
    CHI, LMUT, PULL_F, PULL_I, PULL_J, PUSH_F, PUSH_I, PUSH_J, SHIFT, SHRIEK_F, SHRIEK_J, TWIST,
    Block, FunctorWord, Gen, Kind, Params, expansion, gen, word,
)
from .errors import BZUndefined, PhiBlockUnsupported, SpaceMismatch

logger = logging.getLogger(__name__)


class Space(str, Enum):
    Y = "Y"
    Z = "Z"
    X = "X"


@dataclass(frozen=True)
class Atom:
    """
    A generator of one of the base categories.

    On X the `source` records how the atom arose: Y for f_k^* images, Z for
    j_{k*} images and None for the equivariant A_X component. Atoms with
    exact=False stand for an unknown object of the window they name.
    """

    space: Space
    label: str
    twist: int
    weight: int = 0
    shift: int = 0
    source: Optional[Space] = None
    exact: bool = True

    def __post_init__(self):
        if self.label not in ("A", "B"):
            raise SpaceMismatch(f"unknown atom label {self.label!r}")
        if self.space == Space.Y and self.label == "A":
            raise SpaceMismatch("there is no A-component on Y")

    def __str__(self) -> str:
        text = f"{self.space.value}:{self.label}({self.twist})"
        if self.space == Space.X:
            text += f"⊗χ^{self.weight}"
        if self.shift:
            text += f"[{self.shift}]"
        if not self.exact:
            text += "~"
        return text


@dataclass(frozen=True)
class FormalObject:
    """A formal filtration; the empty filtration is the zero object."""

    factors: Tuple[Atom, ...] = ()

    @property
    def is_zero(self) -> bool:
        return not self.factors

    def __str__(self) -> str:
        if not self.factors:
            return "0"
        return "[" + ", ".join(str(a) for a in self.factors) + "]"


def formal(*atoms: Atom) -> FormalObject:
    return FormalObject(tuple(atoms))


def y_atom(t: int, shift: int = 0) -> Atom:
    return Atom(Space.Y, "B", t, 0, shift)


def z_atom(label: str, t: int, shift: int = 0) -> Atom:
    return Atom(Space.Z, label, t, 0, shift)


@dataclass(frozen=True)
class HomVerdict:
    """Three-valued answer to "is Hom(x, y) zero?"."""

    value: str

    ZERO = "Zero"
    NONZERO = "Nonzero"
    UNKNOWN = "Unknown"

    @staticmethod
    def zero() -> 'HomVerdict':
        return HomVerdict(HomVerdict.ZERO)

    @staticmethod
    def nonzero() -> 'HomVerdict':
        return HomVerdict(HomVerdict.NONZERO)

    @staticmethod
    def unknown() -> 'HomVerdict':
        return HomVerdict(HomVerdict.UNKNOWN)

    def is_zero(self) -> bool:
        return self.value == HomVerdict.ZERO

    def is_nonzero(self) -> bool:
        return self.value == HomVerdict.NONZERO

    def is_unknown(self) -> bool:
        return self.value == HomVerdict.UNKNOWN

    @staticmethod
    def filtration(verdicts: Iterable['HomVerdict']) -> 'HomVerdict':
        """Long-exact-sequence combination: one Nonzero among Zeros survives."""
        nonzero = 0
        for v in verdicts:
            if v.is_unknown():
                return HomVerdict.unknown()
            if v.is_nonzero():
                nonzero += 1
        if nonzero == 0:
            return HomVerdict.zero()
        if nonzero == 1:
            return HomVerdict.nonzero()
        return HomVerdict.unknown()

    @staticmethod
    def all_zero(verdicts: Iterable['HomVerdict']) -> 'HomVerdict':
        return HomVerdict.zero() if all(v.is_zero() for v in verdicts) else HomVerdict.unknown()

    def __str__(self) -> str:
        return self.value


def _require(atom: Atom, space: Space, g: Gen):
    if atom.space != space:
        raise SpaceMismatch(f"{g} expects an atom on {space.value}, got {atom}")


def _apply_gen(g: Gen, atom: Atom, p: Params) -> List[Atom]:
    n, d = p.n, p.d
    name = g.name

    if name == TWIST:
        return [replace(atom, twist=atom.twist + g.arg)]
    if name == CHI:
        return [replace(atom, weight=p.weight(atom.weight + g.arg))]
    if name == SHIFT:
        return [replace(atom, shift=atom.shift + g.arg)]

    if name == PULL_F:
        _require(atom, Space.Y, g)
        return [Atom(Space.X, "B", atom.twist, p.weight(g.arg + atom.weight), atom.shift, Space.Y, atom.exact)]

    if name == SHRIEK_F:
        pulled = _apply_gen(Gen(PULL_F, g.arg), atom, p)
        return [replace(a, twist=a.twist + (n - 1) * d) for a in pulled]

    if name == PUSH_F:
        _require(atom, Space.X, g)
        if atom.source == Space.Y:
            a = (g.arg - atom.weight) % n
            return [Atom(Space.Y, "B", atom.twist - a * d, 0, atom.shift, None, atom.exact)]
        if atom.source is None:
            # f_* A_X(t) lies in <B(t-(n-1)d), ..., B(t-1)> in every weight
            return [Atom(Space.Y, "B", atom.twist - (n - 1) * d + i, 0, atom.shift, None, False)
                    for i in range((n - 1) * d)]
        raise SpaceMismatch(f"{g} of an object supported on Z is not a B-atom: {atom}")

    if name == PUSH_J:
        _require(atom, Space.Z, g)
        return [Atom(Space.X, atom.label, atom.twist, p.weight(g.arg + atom.weight), atom.shift, Space.Z, atom.exact)]

    if name == PULL_J:
        _require(atom, Space.X, g)
        l, k = g.arg, atom.weight
        if atom.source == Space.Y:
            return [Atom(Space.Z, "B", atom.twist, 0, atom.shift, None, atom.exact)] if l == k else []
        if atom.source == Space.Z:
            if l == k:
                return [Atom(Space.Z, atom.label, atom.twist, 0, atom.shift, None, atom.exact)]
            if l == p.weight(k + 1):
                return [Atom(Space.Z, atom.label, atom.twist - d, 0, atom.shift + 1, None, atom.exact)]
            return []
        raise SpaceMismatch(f"{g} of the A_X component is not derivable")

    if name == SHRIEK_J:
        _require(atom, Space.X, g)
        l, k = g.arg, atom.weight
        if atom.source == Space.Y:
            if l == p.weight(k - 1):
                return [Atom(Space.Z, "B", atom.twist + d, 0, atom.shift - 1, None, atom.exact)]
            return []
        if atom.source == Space.Z:
            if l == k:
                return [Atom(Space.Z, atom.label, atom.twist, 0, atom.shift, None, atom.exact)]
            if l == p.weight(k - 1):
                return [Atom(Space.Z, atom.label, atom.twist + d, 0, atom.shift - 1, None, atom.exact)]
            return []
        raise SpaceMismatch(f"{g} of the A_X component is not derivable")

    if name == PULL_I:
        _require(atom, Space.Y, g)
        return [Atom(Space.Z, "B", atom.twist, atom.weight, atom.shift, None, atom.exact)]

    if name == PUSH_I:
        _require(atom, Space.Z, g)
        if atom.label != "B":
            raise SpaceMismatch(f"{g} of an A_Z atom is not a B-filtration")
        return [
            Atom(Space.Y, "B", atom.twist - p.e, atom.weight, atom.shift + 1, None, atom.exact),
            Atom(Space.Y, "B", atom.twist, atom.weight, atom.shift, None, atom.exact),
        ]

    if name == LMUT:
        raise SpaceMismatch("mutation functors are not evaluated on formal objects")

    raise SpaceMismatch(f"unknown generator {g}")


def apply(w: FunctorWord, x: FormalObject, p: Params) -> FormalObject:
    """
    Apply a functor word to a formal object, rightmost generator first

    Args:
        w: Functor word
        x: Formal filtration
        p: Parameters

    Returns:
        The image filtration (empty when the image is zero)

    Raises:
        SpaceMismatch: if a generator meets an atom on the wrong space
    """
    factors = list(x.factors)
    for g in reversed(w.gens):
        image: List[Atom] = []
        for atom in factors:
            image.extend(_apply_gen(g, atom, p))
        factors = image
    return FormalObject(tuple(factors))


def _in(lo: int, value: int, hi: int) -> bool:
    return lo <= value <= hi


def base_hom(a: Atom, b: Atom, p: Params) -> HomVerdict:
    """
    Hom vanishing between two atoms of the same base category

    Args:
        a: Source atom on Y or Z
        b: Target atom on the same space
        p: Parameters

    Returns:
        HomVerdict from the Lefschetz windows; Nonzero only for the identity

    Raises:
        SpaceMismatch: for X atoms or mixed spaces
        BZUndefined: for Z-side B atoms when m = nd
    """
    if a.space != b.space or a.space == Space.X:
        raise SpaceMismatch(f"base Hom needs two atoms on Y or on Z, got {a} and {b}")
    if a.space == Space.Z and "B" in (a.label, b.label) and not p.bz_defined:
        raise BZUndefined(f"B_Z is undefined when m = nd = {p.m}", {"a": str(a), "b": str(b)})
    if a.weight != b.weight:
        return HomVerdict.zero()

    verdict = HomVerdict.unknown()
    if a.space == Space.Y:
        delta = a.twist - b.twist
        if _in(1, delta, p.m - 1):
            verdict = HomVerdict.zero()
        elif delta == 0:
            verdict = HomVerdict.nonzero()
    else:
        width = p.bz_length
        if a.label == "B" and b.label == "B":
            delta = a.twist - b.twist
            if _in(1, delta, width - 1):
                verdict = HomVerdict.zero()
            elif delta == 0:
                verdict = HomVerdict.nonzero()
        elif a.label == "A" and b.label == "B":
            if _in(1, a.twist - b.twist, width):
                verdict = HomVerdict.zero()
        elif a.label == "B" and b.label == "A":
            if _in(0, a.twist - b.twist, width - 1):
                verdict = HomVerdict.zero()
        elif a.twist == b.twist:
            verdict = HomVerdict.nonzero()

    if verdict.is_nonzero() and not (a.exact and b.exact):
        return HomVerdict.unknown()
    return verdict


def hom_class(x: FormalObject, y: FormalObject, p: Params) -> HomVerdict:
    """Combine pairwise base verdicts over two filtrations; shifts are ignored."""
    for atom in x.factors + y.factors:
        if atom.space == Space.X:
            raise SpaceMismatch(f"atom {atom} has not been reduced to a base space")
    return HomVerdict.filtration(base_hom(a, b, p) for a in x.factors for b in y.factors)


def generator(b: Block, p: Params) -> Tuple[FormalObject, FunctorWord]:
    """Base object and embedding word of a non-composite block."""
    if b.kind == Kind.BX:
        return formal(y_atom(b.t)), word(gen(PULL_F, b.k, p))
    if b.kind == Kind.JZ:
        return formal(z_atom("B", b.t)), word(gen(PUSH_J, b.k, p))
    if b.kind == Kind.AZ:
        return formal(z_atom("A", b.t)), word(gen(PUSH_J, b.k, p))
    if b.kind == Kind.AXE:
        return formal(Atom(Space.X, "A", b.t)), word()
    raise PhiBlockUnsupported(f"block {b} has no generator object")


class Reduction(NamedTuple):
    source: FormalObject
    target: FormalObject
    derivation: str


def reduce_pair(pb: Block, qb: Block, p: Params) -> Optional[Reduction]:
    """
    Move Hom(pb, qb) to a base category through an adjunction

    Returns:
        Reduction, or None when no adjunction formula covers the pair
    """
    p_base, p_word = generator(pb, p)
    q_base, q_word = generator(qb, p)
    p_obj = apply(p_word, p_base, p)
    q_obj = apply(q_word, q_base, p)

    if pb.kind == Kind.BX:
        if qb.kind in (Kind.BX, Kind.AXE):
            push = word(gen(PUSH_F, pb.k, p))
            return Reduction(p_base, apply(push, q_obj, p), f"f_{pb.k}^* ⊣ f_{pb.k}*: Hom(B(t), {push}({qb}))")
        pull = word(gen(PULL_J, qb.k, p))
        return Reduction(apply(pull, p_obj, p), q_base, f"j_{qb.k}^* ⊣ j_{qb.k}*: Hom({pull}({pb}), {qb.kind.value}-atom)")

    if pb.kind in (Kind.JZ, Kind.AZ):
        if qb.kind == Kind.AXE:
            return None
        shriek = word(gen(SHRIEK_J, pb.k, p))
        return Reduction(p_base, apply(shriek, q_obj, p), f"j_{pb.k}* ⊣ j_{pb.k}^!: Hom(Z-atom, {shriek}({qb}))")

    if pb.kind == Kind.AXE and qb.kind == Kind.BX:
        left = word(gen(PUSH_F, qb.k, p), Gen(TWIST, (p.n - 1) * p.d))
        return Reduction(apply(left, p_obj, p), q_base, f"f_{qb.k}* ∘ (n-1)d-twist ⊣ f_{qb.k}^*: Hom({left}({pb}), B(s))")

    return None


def block_hom(pblock: Block, qblock: Block, p: Params) -> HomVerdict:
    """
    Decide Hom(pblock, qblock) = 0 from the adjunction formulas

    Args:
        pblock: Source block (not PHI)
        qblock: Target block (not PHI)
        p: Parameters

    Returns:
        HomVerdict; composite blocks are Zero iff every expansion pair is Zero
    """
    if pblock.is_phi or qblock.is_phi:
        raise PhiBlockUnsupported("PHI blocks are justified by trace provenance only")
    if not p.bz_defined and Kind.JZ in (pblock.kind, qblock.kind):
        raise BZUndefined(f"JZ blocks need B_Z, which is undefined when m = nd = {p.m}")
    return _block_hom(*relative_pair(pblock, qblock), p)


def relative_pair(pblock: Block, qblock: Block) -> Tuple[Block, Block]:
    """Shift two twisted blocks so the target sits at twist 0; verdicts only see the difference."""
    if pblock.t is None or qblock.t is None:
        return pblock, qblock
    return replace(pblock, t=pblock.t - qblock.t), replace(qblock, t=0)


@lru_cache(maxsize=1 << 16)
def _block_hom(pblock: Block, qblock: Block, p: Params) -> HomVerdict:
    if pblock.is_composite or qblock.is_composite:
        return HomVerdict.all_zero(
            block_hom(x, y, p) for x in expansion(pblock, p) for y in expansion(qblock, p)
        )

    if pblock.kind == Kind.AXE and qblock.kind == Kind.AXE:
        return HomVerdict.nonzero() if pblock.t == qblock.t else HomVerdict.unknown()

    reduction = reduce_pair(pblock, qblock, p)
    if reduction is None:
        return HomVerdict.unknown()
    return hom_class(reduction.source, reduction.target, p)


def engine_oracle(pblock: Block, qblock: Block, p: Params) -> bool:
    """Oracle adaptor: True when the engine derives Hom(pblock, qblock) = 0."""
    return block_hom(pblock, qblock, p).is_zero()


def reduction_report(pblock: Block, qblock: Block, p: Params) -> List[str]:
    """Human-readable derivation lines for an engine verdict."""
    lines = []
    pairs: Sequence[Tuple[Block, Block]]
    if pblock.is_composite or qblock.is_composite:
        pairs = [(x, y) for x in expansion(pblock, p) for y in expansion(qblock, p)]
    else:
        pairs = [(pblock, qblock)]
    for x, y in pairs:
        try:
            verdict = block_hom(x, y, p)
            if verdict.is_zero() and len(pairs) > 1:
                continue
            reduction = None if x.kind == Kind.AXE == y.kind else reduce_pair(x, y, p)
            if reduction is None:
                lines.append(f"Hom({x}, {y}): no adjunction formula applies -> {verdict}")
            else:
                lines.append(
                    f"Hom({x}, {y}) via {reduction.derivation}: "
                    f"{reduction.source} vs {reduction.target} -> {verdict}"
                )
        except BZUndefined as e:
            lines.append(f"Hom({x}, {y}): {e}")
    return lines
