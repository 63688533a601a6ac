# Test cases for the core calculus

import pytest
import os

import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from hypothesis import given, settings, strategies as st

from src.calculus import (
    AtomCount, Block, Kind, apply_swaps, axe, bx, certify, column, count_atoms, dz, expansion, fy, grid,
    invert_witness, jz, az, make_sod, mk_params, phi, sod_equiv, word, Gen, TWIST,
)
from src.errors import CertificationFailed, DuplicateBlock, InvalidParams, ParamMismatch
from src.theorem_driver import replay_main
from src.windows import explain, window_oracle


QUARTIC = mk_params(2, 2, 4)
swap_walks = st.lists(st.integers(min_value=0, max_value=4), max_size=12)


def licensed_walk(s, positions):
    """Apply the adjacent swaps among positions that the window oracle licenses."""
    for i in positions:
        x, y = s.blocks[i], s.blocks[i + 1]
        if window_oracle(x, y, s.params) and window_oracle(y, x, s.params):
            s = apply_swaps(s, [i])
    return s


@pytest.fixture
def gm5():
    """n=2, d=1, m=4"""
    return mk_params(2, 1, 4)


@pytest.fixture
def quartic():
    """n=2, d=2, m=4"""
    return mk_params(2, 2, 4)


class TestParams:
    """Parameter validation and derived quantities"""

    def test_derived_values(self, quartic, gm5):
        assert quartic.M == 2
        assert quartic.bz_length == 0
        assert not quartic.bz_defined
        assert gm5.M == 3
        assert gm5.bz_length == 2
        assert gm5.bz_defined
        assert mk_params(3, 1, 5).M == 3

    @pytest.mark.parametrize("n,d,m,code", [
        (1, 1, 4, "NTooSmall"),
        (2, 0, 4, "DTooSmall"),
        (3, 2, 5, "NdExceedsM"),
    ])
    def test_invalid_params(self, n, d, m, code):
        with pytest.raises(InvalidParams) as excinfo:
            mk_params(n, d, m)
        assert excinfo.value.code == code

    def test_non_integer_rejected(self):
        with pytest.raises(InvalidParams):
            mk_params(True, 1, 4)

    def test_weight_reduced_mod_n(self):
        p = mk_params(3, 1, 5)
        assert p.weight(-1) == 2
        assert bx(0, 4, p) == bx(0, 1, p)
        assert p.as_dict() == {"n": 3, "d": 1, "m": 5, "M": 3}


class TestBlocks:
    """Block factories, expansion and grids"""

    def test_fy_expansion(self, gm5):
        assert expansion(fy(0, gm5), gm5) == [bx(t, 0, gm5) for t in range(4)]

    def test_dz_expansion(self, gm5):
        assert expansion(dz(1, gm5), gm5) == [az(1, 1, gm5), jz(1, 1, gm5), jz(2, 1, gm5)]

    def test_dz_expansion_when_bz_undefined(self, quartic):
        assert expansion(dz(0, quartic), quartic) == [az(2, 0, quartic)]

    def test_atomic_block_expands_to_itself(self, gm5):
        assert expansion(bx(2, 1, gm5), gm5) == [bx(2, 1, gm5)]

    def test_grid_is_twist_major(self, gm5):
        assert grid(gm5, range(2), range(2)) == [bx(0, 0, gm5), bx(0, 1, gm5), bx(1, 0, gm5), bx(1, 1, gm5)]
        assert column(gm5, range(2), 1) == [bx(0, 1, gm5), bx(1, 1, gm5)]

    def test_printing(self, gm5):
        assert str(bx(2, 1, gm5)) == "BX(2,1)"
        assert str(axe(3)) == "AXE(3)"
        assert str(dz(0, gm5)) == "DZ(0)"
        assert str(word()) == "id"
        assert str(word(Gen(TWIST, 2))) == "Twist(2)"

    def test_phi_origin_does_not_affect_equality(self, gm5):
        w = word(Gen(TWIST, 1))
        assert phi(0, w, 3, gm5) == phi(0, w, 9, gm5)

    def test_phi_needs_a_word(self, gm5):
        with pytest.raises(ValueError):
            phi(0, word(), None, gm5)


class TestSod:
    """Decomposition sequences"""

    def test_duplicates_rejected(self, gm5):
        with pytest.raises(DuplicateBlock):
            make_sod(gm5, [bx(0, 0, gm5), bx(0, 0, gm5)])

    def test_splice(self, gm5):
        s = make_sod(gm5, [fy(0, gm5), dz(0, gm5)])
        spliced = s.splice(0, 1, expansion(fy(0, gm5), gm5))
        assert len(spliced) == 5
        assert spliced.index(dz(0, gm5)) == 4

    def test_index_missing_block(self, gm5):
        with pytest.raises(ValueError):
            make_sod(gm5, [fy(0, gm5)]).index(dz(0, gm5))


class TestSodEquiv:
    """Licensed permutations"""

    def test_identical(self, gm5):
        s = make_sod(gm5, grid(gm5, range(3), range(2)))
        assert sod_equiv(s, s, window_oracle) == (True, ())

    def test_different_blocks(self, gm5):
        a = make_sod(gm5, [bx(0, 0, gm5)])
        b = make_sod(gm5, [bx(1, 0, gm5)])
        assert not sod_equiv(a, b, window_oracle)

    def test_licensed_swap(self, quartic):
        a = make_sod(quartic, [bx(1, 0, quartic), bx(0, 1, quartic)])
        b = make_sod(quartic, [bx(0, 1, quartic), bx(1, 0, quartic)])
        result = sod_equiv(a, b, window_oracle)
        assert result
        assert result.witness == (0,)
        assert apply_swaps(a, result.witness).blocks == b.blocks
        assert apply_swaps(b, invert_witness(result.witness)).blocks == a.blocks

    def test_unlicensed_swap(self, gm5):
        a = make_sod(gm5, [bx(0, 0, gm5), bx(1, 0, gm5)])
        b = make_sod(gm5, [bx(1, 0, gm5), bx(0, 0, gm5)])
        assert not sod_equiv(a, b, window_oracle, search_limit=100)

    def test_param_mismatch(self, gm5, quartic):
        with pytest.raises(ParamMismatch):
            sod_equiv(make_sod(gm5, []), make_sod(quartic, []), window_oracle)

    @settings(max_examples=200, deadline=None)
    @given(swap_walks, swap_walks)
    def test_symmetric_and_transitive(self, first, second):
        a = make_sod(QUARTIC, grid(QUARTIC, range(3), range(2)))
        b = licensed_walk(a, first)
        c = licensed_walk(b, second)

        forward = sod_equiv(a, b, window_oracle)
        backward = sod_equiv(b, a, window_oracle)
        assert forward and backward
        assert apply_swaps(b, invert_witness(forward.witness)).blocks == a.blocks

        onward = sod_equiv(b, c, window_oracle)
        assert onward
        assert apply_swaps(a, forward.witness + onward.witness).blocks == c.blocks
        assert sod_equiv(a, c, window_oracle)


class TestCountAtoms:
    """Atom counting"""

    @pytest.mark.parametrize("n,d,m", [(2, 1, 4), (2, 2, 4), (3, 1, 5), (3, 2, 9), (4, 1, 7)])
    def test_initial_decomposition_counts(self, n, d, m):
        p = mk_params(n, d, m)
        s = make_sod(p, [fy(0, p)] + [dz(k, p) for k in range(n - 1)])
        assert count_atoms(s) == AtomCount(n * p.M, n - 1)

    def test_axe_counts_as_n_minus_one(self):
        p = mk_params(3, 1, 5)
        assert count_atoms(make_sod(p, [axe(0), bx(0, 0, p)])) == AtomCount(1, 2)

    @pytest.mark.parametrize("n,d,m", [(2, 1, 4), (2, 2, 4), (3, 1, 5), (3, 2, 9), (4, 1, 7), (5, 1, 12)])
    def test_every_replay_step_conserves_counts(self, n, d, m):
        p = mk_params(n, d, m)
        trace = replay_main(p).trace
        state = make_sod(p, trace.initial)
        expected = count_atoms(state)
        for step in trace.steps:
            assert count_atoms(make_sod(p, step.before)) == count_atoms(make_sod(p, step.after)), str(step)
            state = state.splice(step.pos[0], step.pos[1], step.after)
            assert count_atoms(state) == expected, str(step)
        assert expected == AtomCount(n * p.M, n - 1)


class TestCertify:
    """Pairwise certification"""

    def test_cover_decomposition_certifies(self, gm5):
        s = certify(make_sod(gm5, [fy(0, gm5), dz(0, gm5)]), window_oracle, explain)
        assert s.verified
        assert len(s.witness) == 1

    def test_wrong_order_fails(self, gm5):
        with pytest.raises(CertificationFailed):
            certify(make_sod(gm5, [dz(0, gm5), fy(0, gm5)]), window_oracle)

    def test_phi_needs_provenance(self, gm5):
        block = phi(0, word(Gen(TWIST, 1)), 1, gm5)
        s = make_sod(gm5, [block, bx(0, 0, gm5)])
        with pytest.raises(CertificationFailed):
            certify(s, window_oracle)
        certified = certify(s, window_oracle, provenance="trace")
        assert certified.witness[0].cite == "trace"

    def test_phi_kind(self, gm5):
        assert Block(Kind.PHI, None, 0).is_phi
        assert fy(0, gm5).is_composite
