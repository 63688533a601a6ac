# Test cases for the adjunction engine

import pytest
import os

import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from hypothesis import given, settings, strategies as st

from src.adjunction import (
    Atom, HomVerdict, Space, apply, base_hom, block_hom, engine_oracle, formal, hom_class, reduce_pair,
    reduction_report, y_atom, z_atom,
)
from src.calculus import (
    CHI, PULL_F, PULL_I, PULL_J, PUSH_F, PUSH_I, PUSH_J, SHIFT, SHRIEK_J, TWIST, Block, Gen, Kind, axe, az, bx, dz,
    fy, gen, jz, mk_params, word,
)
from src.errors import BZUndefined, PhiBlockUnsupported, SpaceMismatch


@pytest.fixture
def p():
    """n=2, d=1, m=4"""
    return mk_params(2, 1, 4)


class TestFormalObjects:
    """Atoms, formal objects and functor application"""

    def test_no_a_component_on_y(self):
        with pytest.raises(SpaceMismatch):
            Atom(Space.Y, "A", 0)

    def test_zero_object(self):
        assert formal().is_zero
        assert str(formal()) == "0"

    def test_push_after_pull_same_weight(self, p):
        image = apply(word(gen(PUSH_F, 0, p), gen(PULL_F, 0, p)), formal(y_atom(2)), p)
        assert image == formal(y_atom(2))

    def test_push_after_pull_other_weight_shifts_twist(self, p):
        image = apply(word(gen(PUSH_F, 1, p), gen(PULL_F, 0, p)), formal(y_atom(2)), p)
        assert image == formal(y_atom(1))

    def test_push_i_gives_two_factors(self, p):
        image = apply(word(Gen(PUSH_I)), formal(z_atom("B", 3)), p)
        assert [a.twist for a in image.factors] == [3 - p.e, 3]
        assert image.factors[0].shift == 1

    def test_wrong_space(self, p):
        with pytest.raises(SpaceMismatch):
            apply(word(gen(PUSH_J, 0, p)), formal(y_atom(0)), p)


class TestHomVerdict:
    """Three-valued combination"""

    def test_filtration(self):
        z, nz, u = HomVerdict.zero(), HomVerdict.nonzero(), HomVerdict.unknown()
        assert HomVerdict.filtration([]).is_zero()
        assert HomVerdict.filtration([z, nz]).is_nonzero()
        assert HomVerdict.filtration([nz, nz]).is_unknown()
        assert HomVerdict.filtration([z, u]).is_unknown()

    def test_all_zero(self):
        assert HomVerdict.all_zero([HomVerdict.zero()] * 3).is_zero()
        assert HomVerdict.all_zero([HomVerdict.zero(), HomVerdict.nonzero()]).is_unknown()


class TestHomClass:
    """Verdicts over filtrations"""

    def test_single_pair(self, p):
        assert hom_class(formal(y_atom(1)), formal(y_atom(0)), p).is_zero()
        assert hom_class(formal(y_atom(0)), formal(y_atom(0)), p).is_nonzero()

    def test_filtration_with_one_nonzero_piece(self, p):
        target = formal(y_atom(2 - p.n * p.d, shift=1), y_atom(2))
        assert hom_class(formal(y_atom(2)), target, p).is_nonzero()

    def test_unreduced_atom(self, p):
        with pytest.raises(SpaceMismatch):
            hom_class(formal(Atom(Space.X, "A", 0)), formal(y_atom(0)), p)


class TestBaseHom:
    """Lefschetz windows on Y and Z"""

    def test_y_window(self, p):
        assert base_hom(y_atom(1), y_atom(0), p).is_zero()
        assert base_hom(y_atom(3), y_atom(0), p).is_zero()
        assert base_hom(y_atom(0), y_atom(0), p).is_nonzero()
        assert base_hom(y_atom(4), y_atom(0), p).is_unknown()

    def test_z_windows(self, p):
        assert base_hom(z_atom("B", 2), z_atom("B", 1), p).is_zero()
        assert base_hom(z_atom("A", 2), z_atom("B", 1), p).is_zero()
        assert base_hom(z_atom("B", 1), z_atom("A", 1), p).is_zero()
        assert base_hom(z_atom("A", 1), z_atom("A", 1), p).is_nonzero()

    def test_bz_undefined(self):
        q = mk_params(2, 2, 4)
        with pytest.raises(BZUndefined):
            base_hom(z_atom("B", 2), z_atom("A", 2), q)

    def test_mixed_spaces(self, p):
        with pytest.raises(SpaceMismatch):
            base_hom(y_atom(0), z_atom("A", 0), p)


class TestBlockHom:
    """Block-level verdicts"""

    def test_bx_pairs(self, p):
        assert block_hom(bx(1, 0, p), bx(0, 0, p), p).is_zero()
        assert block_hom(bx(0, 0, p), bx(0, 0, p), p).is_nonzero()
        assert block_hom(bx(0, 0, p), bx(1, 0, p), p).is_unknown()
        assert block_hom(bx(0, 1, p), bx(0, 0, p), p).is_zero()

    def test_composite_zero_direction(self, p):
        assert block_hom(fy(0, p), dz(1, p), p).is_zero()

    def test_composite_nonvanishing_direction(self, p):
        assert block_hom(dz(1, p), fy(0, p), p).is_unknown()

    def test_phi_unsupported(self, p):
        with pytest.raises(PhiBlockUnsupported):
            block_hom(Block(Kind.PHI, None, 0), bx(0, 0, p), p)

    def test_jz_undefined_at_boundary(self):
        q = mk_params(2, 2, 4)
        with pytest.raises(BZUndefined):
            block_hom(bx(0, 0, q), jz(2, 0, q), q)

    def test_az_defined_at_boundary(self):
        q = mk_params(2, 2, 4)
        assert block_hom(bx(0, 1, q), az(2, 0, q), q).is_zero()

    def test_axe_with_itself(self, p):
        assert block_hom(axe(2), axe(2), p).is_nonzero()

    def test_engine_oracle(self, p):
        assert engine_oracle(bx(1, 0, p), bx(0, 0, p), p)
        assert not engine_oracle(bx(0, 0, p), bx(1, 0, p), p)


class TestReduction:
    """Derivation reports"""

    def test_reduce_bx_pair(self, p):
        reduction = reduce_pair(bx(1, 0, p), bx(0, 0, p), p)
        assert reduction.source == formal(y_atom(1))
        assert reduction.target == formal(y_atom(0))

    def test_report_lines(self, p):
        lines = reduction_report(bx(0, 0, p), bx(1, 0, p), p)
        assert len(lines) == 1
        assert lines[0].endswith("-> Unknown")

    def test_report_composite_lists_failing_pairs(self, p):
        lines = reduction_report(dz(1, p), fy(0, p), p)
        assert lines
        assert all("Zero" not in line.split("->")[-1] for line in lines)


# Generated atoms and words over n=3, d=1, m=5; twists cover [-2m, 2m]

CUBIC = mk_params(3, 1, 5)
twists = st.integers(min_value=-2 * CUBIC.m, max_value=2 * CUBIC.m)
weights = st.integers(min_value=0, max_value=CUBIC.n - 1)
characters = st.integers(min_value=-CUBIC.n, max_value=CUBIC.n)

base_atoms = st.one_of(
    st.builds(y_atom, twists),
    st.builds(z_atom, st.sampled_from(["A", "B"]), twists),
)
generators = st.one_of(
    st.builds(lambda name, k: gen(name, k, CUBIC),
              st.sampled_from([PULL_F, PUSH_F, PUSH_J, PULL_J, SHRIEK_J]), weights),
    st.builds(Gen, st.sampled_from([TWIST, CHI, SHIFT]), characters),
    st.builds(Gen, st.sampled_from([PUSH_I, PULL_I])),
)
words = st.lists(generators, max_size=4).map(lambda gens: word(*gens))


def image(w, x):
    try:
        return apply(w, x, CUBIC)
    except SpaceMismatch:
        return None


class TestAlgebraicLaws:
    """Laws of functor application and Hom verdicts"""

    @settings(max_examples=300, deadline=None)
    @given(words, words, base_atoms)
    def test_apply_is_compositional(self, w1, w2, atom):
        x = formal(atom)
        inner = image(w2, x)
        outer = None if inner is None else image(w1, inner)
        assert image(w1 * w2, x) == outer

    @settings(max_examples=200, deadline=None)
    @given(twists, weights, characters)
    def test_chi_through_pull_f(self, t, k, c):
        x = formal(y_atom(t))
        lhs = apply(word(Gen(CHI, c), gen(PULL_F, k, CUBIC)), x, CUBIC)
        assert lhs == apply(word(gen(PULL_F, k + c, CUBIC)), x, CUBIC)
        assert lhs == apply(word(gen(PULL_F, k, CUBIC), Gen(CHI, c)), x, CUBIC)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(["A", "B"]), twists, weights, characters)
    def test_chi_through_push_j(self, label, t, k, c):
        x = formal(z_atom(label, t))
        lhs = apply(word(Gen(CHI, c), gen(PUSH_J, k, CUBIC)), x, CUBIC)
        assert lhs == apply(word(gen(PUSH_J, k + c, CUBIC)), x, CUBIC)

    @settings(max_examples=200, deadline=None)
    @given(twists, weights, weights, characters)
    def test_chi_into_push_f(self, t, k, l, c):
        x = formal(y_atom(t))
        lhs = apply(word(gen(PUSH_F, k, CUBIC), Gen(CHI, c), gen(PULL_F, l, CUBIC)), x, CUBIC)
        assert lhs == apply(word(gen(PUSH_F, k - c, CUBIC), gen(PULL_F, l, CUBIC)), x, CUBIC)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(["A", "B"]), twists, weights, weights, characters)
    def test_chi_into_pull_j(self, label, t, k, l, c):
        x = formal(z_atom(label, t))
        lhs = apply(word(gen(PULL_J, l, CUBIC), Gen(CHI, c), gen(PUSH_J, k, CUBIC)), x, CUBIC)
        assert lhs == apply(word(gen(PULL_J, l - c, CUBIC), gen(PUSH_J, k, CUBIC)), x, CUBIC)

    @settings(max_examples=100, deadline=None)
    @given(base_atoms, characters, characters)
    def test_chi_commutes_with_twist_and_shift(self, atom, c, s):
        x = formal(atom)
        for other in (Gen(TWIST, s), Gen(SHIFT, s)):
            assert apply(word(Gen(CHI, c), other), x, CUBIC) == apply(word(other, Gen(CHI, c)), x, CUBIC)

    @settings(max_examples=300, deadline=None)
    @given(twists, twists)
    def test_zero_survives_refinement(self, s, t):
        refine = word(Gen(PUSH_I), Gen(PULL_I))
        a, b = y_atom(s), y_atom(t)
        for source, target in ((apply(refine, formal(a), CUBIC), formal(b)),
                               (formal(a), apply(refine, formal(b), CUBIC))):
            pieces = [hom_class(formal(x), formal(y), CUBIC) for x in source.factors for y in target.factors]
            verdict = hom_class(source, target, CUBIC)
            if all(v.is_zero() for v in pieces):
                assert verdict.is_zero()
            if any(v.is_unknown() for v in pieces):
                assert not verdict.is_nonzero()

    def test_refinement_pieces(self):
        pieces = apply(word(Gen(PUSH_I), Gen(PULL_I)), formal(y_atom(4)), CUBIC).factors
        assert [(a.twist, a.shift) for a in pieces] == [(4 - CUBIC.e, 1), (4, 0)]
