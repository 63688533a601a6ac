# Test cases for the theorem driver

import pytest
import os

import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.calculus import CHI, AtomCount, Gen, bx, dz, fy, grid, jz, make_sod, mk_params, phi, sod_equiv, word
from src.errors import InductionStepFailed, InvalidPreset, RelabelMismatch
from src.rules import RuleId, simplified_phi_word
from src.theorem_driver import (
    CHI_INTO_PUSHJ, CHI_THROUGH_LMUT, CHI_ZERO_DROP, PRESET_NAMES,
    axe_window, ck_start_blocks, enumerate_cover_sods, normalize_word, preset, projection_table_ok,
    replay_main, rotated_blocks, verify_axe_windows, verify_ck, verify_phi_relabel, verify_weight_splitting,
    weight_projection_table,
)
from src.trace_format import dump_trace
from src.windows import window_oracle

SWEEP_SAMPLE = [(2, 1, 2), (2, 1, 3), (2, 1, 4), (2, 2, 4), (2, 2, 5), (2, 3, 9), (3, 1, 3), (3, 1, 5),
                (3, 2, 7), (4, 1, 6), (4, 1, 8)]


@pytest.fixture
def gm5():
    return mk_params(2, 1, 4)


@pytest.fixture
def quartic():
    return mk_params(2, 2, 4)


@pytest.fixture
def cubic():
    return mk_params(3, 1, 5)


class TestReplay:
    """The main decomposition theorem"""

    def test_quartic(self, quartic):
        result = replay_main(quartic)
        assert len(result.phi_blocks) == 1
        assert len(result.grid_blocks) == 4
        assert result.counts == AtomCount(4, 1)
        assert result.final.verified
        assert len(result.trace) == 7
        assert result.trace.count(RuleId.RMUT_THROUGH_DZ) == 2
        assert result.trace.count(RuleId.SWAP_ORTH) == 1
        assert result.inductions[0].trivial

    def test_gm5(self, gm5):
        result = replay_main(gm5)
        assert len(result.trace) == 8
        assert result.trace.count(RuleId.LMUT_JZ_TRANSFORM) == 2
        assert result.trace.count(RuleId.LMUT_IDENTITY) == 1
        assert result.phi_blocks[0].word == simplified_phi_word(0, gm5)

    def test_cyclic_cubic(self, cubic):
        result = replay_main(cubic)
        assert [b.k for b in result.phi_blocks] == [0, 1]
        assert len(result.trace) == 19
        assert result.final.blocks[2:] == tuple(grid(cubic, range(3), range(3)))

    @pytest.mark.parametrize("n,d,m", SWEEP_SAMPLE)
    def test_final_shape_and_counts(self, n, d, m):
        p = mk_params(n, d, m)
        result = replay_main(p)
        assert len(result.phi_blocks) == n - 1
        assert result.counts == AtomCount(n * p.M, n - 1)
        assert n * m - n * (n - 1) * d == n * p.M
        rest = make_sod(p, result.grid_blocks)
        assert sod_equiv(rest, make_sod(p, grid(p, range(p.M), range(n))), window_oracle)

    def test_phi_origin_points_at_its_step(self, cubic):
        result = replay_main(cubic)
        for block in result.phi_blocks:
            assert result.trace.steps[block.origin - 1].rule == RuleId.PHI_SIMPLIFY

    def test_deterministic(self, cubic):
        assert dump_trace(replay_main(cubic).trace) == dump_trace(replay_main(cubic).trace)


class TestColumnInduction:
    """C_k identification"""

    def test_k_zero_is_trivial(self, gm5):
        report = verify_ck(gm5, 0)
        assert report.trivial
        assert report.steps == 0

    def test_boundary_is_trivial(self, quartic):
        report = verify_ck(quartic, 1)
        assert report.trivial
        assert report.transforms == 0

    @pytest.mark.parametrize("n,d,m", [(2, 1, 4), (3, 1, 5), (2, 2, 6), (3, 2, 8)])
    def test_transform_count(self, n, d, m):
        p = mk_params(n, d, m)
        for k in range(1, n):
            report = verify_ck(p, k)
            assert not report.trivial
            assert report.transforms == p.M - p.d
            assert sod_equiv(report.final, make_sod(p, grid(p, range(p.M), range(k + 1))), window_oracle)

    def test_out_of_range(self, gm5):
        with pytest.raises(InductionStepFailed):
            verify_ck(gm5, 2)

    def test_start_blocks(self, gm5):
        assert ck_start_blocks(gm5, 1) == [bx(0, 0, gm5), bx(1, 0, gm5), bx(2, 0, gm5),
                                           jz(1, 0, gm5), jz(2, 0, gm5), bx(2, 1, gm5)]


class TestCoverSods:
    """Rotated decompositions"""

    def test_rotation(self, cubic):
        assert rotated_blocks(cubic, 1) == [dz(2, cubic), fy(0, cubic), dz(0, cubic)]

    @pytest.mark.parametrize("n,d,m", [(2, 1, 4), (3, 1, 5), (2, 2, 4), (4, 1, 7)])
    def test_all_certified(self, n, d, m):
        p = mk_params(n, d, m)
        sods = enumerate_cover_sods(p)
        assert len(sods) == n
        assert all(s.verified for s in sods)


class TestRelabel:
    """Character relabelling of PHI words"""

    def test_normalize(self, cubic):
        normal, rules = normalize_word(word(Gen(CHI, 1)) * simplified_phi_word(0, cubic), cubic)
        assert normal == simplified_phi_word(1, cubic)
        assert rules == [CHI_THROUGH_LMUT, CHI_INTO_PUSHJ, CHI_ZERO_DROP]

    def test_report(self, cubic):
        report = verify_phi_relabel(cubic)
        assert report.ok
        assert [e.applications for e in report.entries] == [3]

    def test_uses_replayed_words(self, cubic):
        result = replay_main(cubic)
        assert verify_phi_relabel(cubic, result.phi_blocks).ok

    def test_mismatch(self, cubic):
        forged = phi(1, simplified_phi_word(0, cubic), None, cubic)
        with pytest.raises(RelabelMismatch):
            verify_phi_relabel(cubic, [forged])

    def test_two_fold_cover_has_nothing_to_relabel(self, gm5):
        assert verify_phi_relabel(gm5).entries == []


class TestSupplementalChecks:
    """Weight splitting, projection table and the A_X window family"""

    @pytest.mark.parametrize("n,d,m", [(2, 1, 4), (3, 1, 5), (3, 2, 6)])
    def test_weight_splitting(self, n, d, m):
        assert verify_weight_splitting(mk_params(n, d, m)).ok

    def test_projection_table(self, cubic):
        table = weight_projection_table(cubic)
        assert len(table) == cubic.d * cubic.n ** 2
        assert projection_table_ok(table)

    def test_axe_window_shape(self, gm5):
        blocks = axe_window(gm5, 0, 1)
        assert [str(b) for b in blocks] == ["BX(0,0)", "AXE(1)", "BX(1,0)", "BX(2,0)"]

    @pytest.mark.parametrize("n,d,m", [(2, 1, 4), (3, 1, 5), (2, 2, 6)])
    def test_axe_windows(self, n, d, m):
        p = mk_params(n, d, m)
        report = verify_axe_windows(p)
        assert report.ok, report.failures[:3]
        assert report.placements == n * (p.M + 1)


class TestPresets:
    """Named parameter points"""

    def test_quartic(self):
        info = preset("quartic")
        assert (info.params.n, info.params.d, info.params.m) == (2, 2, 4)
        assert info.phi_count == 1
        assert info.grid_shape == (2, 2)
        assert preset("quartic_double_solid") == info

    @pytest.mark.parametrize("dim", [3, 4, 5, 6])
    def test_gm(self, dim):
        info = preset(f"gm({dim})")
        assert info.phi_count == 1
        assert info.grid_shape == (2, dim - 2)
        result = replay_main(info.params)
        assert len(result.phi_blocks) == 1

    def test_cyclic_cubic(self):
        info = preset("cyclic_cubic(4)")
        assert (info.params.n, info.params.d, info.params.m) == (3, 1, 5)
        assert preset("cubic:4") == info
        assert len(replay_main(info.params).phi_blocks) == 2

    def test_double_cyclic_cubic(self):
        info = preset("double_cyclic_cubic")
        assert not info.verified
        assert info.phi_count == 4
        assert info.components == 2
        assert info.as_dict()["verified"] is False

    @pytest.mark.parametrize("name", ["gm:7", "gm:2", "cubic:1", "cubic:2", "cubic:x", "sextic"])
    def test_invalid(self, name):
        with pytest.raises(InvalidPreset):
            preset(name)

    def test_listed_names_resolve(self):
        for name in PRESET_NAMES:
            preset(name)
