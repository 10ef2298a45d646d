from fractions import Fraction
from itertools import product

import pytest

from leovn.constellation import ConfigError, ConstellationConfig, SatelliteId
from leovn.division import division_for, switching_epochs
from leovn.isl import (
    IslKind,
    IslMode,
    ShutoffRule,
    active_hisl_count,
    active_row_set,
    bh_isl_planes,
    boundaries_for,
    h_neighbor,
    hisl_count_analytic,
    phase_analysis,
    row_chains,
    row_spreads_deg,
    snapshot_edges,
    theorem1_bruteforce,
)


def make_config(n1=18, n2=36, F=0, polar=70.0):
    return ConstellationConfig(num_planes=n1, sats_per_plane=n2, phasing_factor=F,
                               altitude_km=780.0, polar_threshold_deg=polar)


class TestPhaseAnalysis:
    def test_zero_phasing_all_quantities_zero(self):
        pa = phase_analysis(18, 36, 0)
        assert pa.delta_f_deg == 0
        assert pa.max_spread_conventional_deg == 0
        assert pa.max_spread_optimized_deg == 0
        assert pa.k_ratio is None
        assert pa.bh_planes == frozenset()

    def test_f2_k9(self):
        pa = phase_analysis(18, 36, 2)
        assert pa.k_ratio == 9
        assert pa.delta_f_deg == Fraction(360 * 2, 648)
        assert pa.max_spread_optimized_deg == 8 * pa.delta_f_deg
        assert pa.max_spread_conventional_deg == 17 * pa.delta_f_deg

    def test_fractional_k_spread(self):
        # F=5: K=3.6, max of mod(h-1, 3.6) over h-1 in 0..17 is 3.4
        pa = phase_analysis(18, 36, 5)
        assert pa.k_ratio == Fraction(18, 5)
        assert pa.max_spread_optimized_deg == Fraction(17, 5) * pa.delta_f_deg

    @pytest.mark.parametrize("n1,n2,f", [(18, 36, 2), (18, 36, 5), (12, 24, 7), (6, 12, 4)])
    def test_link_counts_sum(self, n1, n2, f):
        pa = phase_analysis(n1, n2, f)
        for h in range(1, n1 + 1):
            assert pa.fh_count[h - 1] + pa.bh_count[h - 1] == h - 1
            assert pa.bh_count[h - 1] == ((h - 1) * f) // n1

    def test_backward_count_telescopes(self):
        pa = phase_analysis(18, 36, 6)
        total = sum(pa.bh_count[h] - pa.bh_count[h - 1] for h in range(1, 18))
        assert total == pa.bh_count[17] == (17 * 6) // 18

    def test_wrapped_diagnostic_caps_at_circle_span(self):
        pa = phase_analysis(18, 36, 20)  # delta_f > step: row wraps widely
        assert pa.max_spread_conventional_wrapped_deg <= pa.max_spread_conventional_deg
        assert pa.max_spread_conventional_wrapped_deg < 360


class TestBhPlanes:
    def test_k3(self):
        assert sorted(bh_isl_planes(18, Fraction(3))) == [3, 6, 9, 12, 15]

    def test_k9(self):
        assert sorted(bh_isl_planes(18, Fraction(9))) == [9]

    def test_k18_pure_conventional(self):
        assert bh_isl_planes(18, Fraction(18)) == frozenset()

    def test_k1_every_boundary(self):
        assert bh_isl_planes(6, Fraction(1)) == frozenset({1, 2, 3, 4, 5})

    def test_fractional_k(self):
        assert sorted(bh_isl_planes(6, Fraction(3, 2))) == [2, 3, 5]

    def test_k_below_one_rejected(self):
        with pytest.raises(ConfigError):
            bh_isl_planes(6, Fraction(1, 2))


class TestHNeighbor:
    def test_seam_has_no_link(self):
        pa = phase_analysis(18, 36, 0)
        assert h_neighbor(SatelliteId(1, 5), "west", IslMode.CONVENTIONAL, pa) is None
        assert h_neighbor(SatelliteId(18, 5), "east", IslMode.OPTIMIZED, pa) is None

    def test_conventional_same_slot(self):
        pa = phase_analysis(18, 36, 2)
        assert h_neighbor(SatelliteId(5, 7), "east", IslMode.CONVENTIONAL, pa) \
            == SatelliteId(6, 7)

    def test_backward_boundary_steps_one_slot_down(self):
        # K=3 (F=6): boundary 3 is backward; the partner one slot down is the
        # neighbor sitting step - delta_f behind, which zeroes the row spread
        cfg = make_config(F=6)
        pa = phase_analysis(18, 36, 6)
        partner = h_neighbor(SatelliteId(3, 7), "east", IslMode.OPTIMIZED, pa)
        assert partner == SatelliteId(4, 6)
        u3 = cfg.initial_phase_deg(SatelliteId(3, 7))
        u4 = cfg.initial_phase_deg(partner)
        u1 = cfg.initial_phase_deg(SatelliteId(1, 7))
        assert u4 - u3 == pa.delta_f_deg - Fraction(10)   # behind by step - delta_f
        assert u4 - u1 == 0                               # row spread resets to zero

    def test_west_mirrors_east(self):
        pa = phase_analysis(18, 36, 6)
        for sat in (SatelliteId(3, 7), SatelliteId(9, 1), SatelliteId(10, 36)):
            east = h_neighbor(sat, "east", IslMode.OPTIMIZED, pa)
            assert h_neighbor(east, "west", IslMode.OPTIMIZED, pa) == sat


class TestRowChains:
    def test_rows_partition_all_satellites(self):
        cfg = make_config(F=6)
        rows = row_chains(cfg, IslMode.OPTIMIZED)
        seen = [sat for row in rows for sat in row]
        assert len(seen) == len(set(seen)) == 648

    def test_spreads_match_chain_phases(self):
        cfg = make_config(F=5)
        for mode in (IslMode.CONVENTIONAL, IslMode.OPTIMIZED):
            rows = row_chains(cfg, mode)
            spreads = row_spreads_deg(cfg, mode)
            base = cfg.initial_phase_deg(rows[0][0])
            for h, member in enumerate(rows[0]):
                assert (cfg.initial_phase_deg(member) - base) % 360 == spreads[h] % 360

    def test_optimized_spread_caps_at_analysis_value(self):
        cfg = make_config(F=5)
        pa = phase_analysis(18, 36, 5)
        assert max(row_spreads_deg(cfg, IslMode.OPTIMIZED)) == pa.max_spread_optimized_deg


class TestSnapshotEdges:
    def test_visl_count_and_always_active(self):
        cfg = make_config()
        edges = snapshot_edges(cfg, IslMode.CONVENTIONAL, division_for(cfg), 500.0)
        v_edges = [e for e in edges if e.kind is IslKind.V_ISL]
        assert len(v_edges) == 648
        assert all(e.active for e in v_edges)

    def test_no_edge_crosses_the_seam(self):
        cfg = make_config(F=3)
        for mode in (IslMode.CONVENTIONAL, IslMode.OPTIMIZED):
            for e in snapshot_edges(cfg, mode, division_for(cfg), 123.0):
                if e.kind is IslKind.H_ISL:
                    assert {e.a.plane, e.b.plane} != {1, 18}
                    assert abs(e.a.plane - e.b.plane) == 1

    def test_equator_row_active(self):
        cfg = make_config()
        div = division_for(cfg)
        edges = snapshot_edges(cfg, IslMode.CONVENTIONAL, div, 0.0)
        # slot 8 starts at phase 0 (the equator) at t=0: its row must be on
        row8 = [e for e in edges
                if e.kind is IslKind.H_ISL and e.a.slot == 8 and e.a.plane == 1]
        assert row8 and all(e.active for e in row8)

    def test_epoch_counts_f0(self):
        cfg = make_config()
        edges = snapshot_edges(cfg, IslMode.CONVENTIONAL, division_for(cfg), 0.0)
        assert active_hisl_count(edges) == 476

    def test_epoch_counts_f2_optimized(self):
        cfg = make_config(F=2)
        edges = snapshot_edges(cfg, IslMode.OPTIMIZED, division_for(cfg), 0.0)
        assert active_hisl_count(edges) == 442

    def test_counts_constant_between_epochs(self):
        cfg = make_config(F=2)
        div = division_for(cfg)
        counts = {active_hisl_count(snapshot_edges(cfg, IslMode.OPTIMIZED, div, t))
                  for t in (0.0, 37.0, 101.0, cfg.period / 2, cfg.period * 0.93)}
        assert counts == {442}

    def test_optimized_with_f0_degenerates_to_conventional(self):
        cfg = make_config(F=0)
        div = division_for(cfg)
        for t in (0.0, 333.0, cfg.period * 0.71):
            conv = snapshot_edges(cfg, IslMode.CONVENTIONAL, div, t)
            opt = snapshot_edges(cfg, IslMode.OPTIMIZED, div, t)
            assert conv == opt

    def test_per_satellite_rule_differs_mid_dwell(self):
        # per-satellite switching flips links inside a dwell when phased
        cfg = make_config(F=2)
        div = division_for(cfg)
        epochs = switching_epochs(cfg, div, 2)
        mid = (epochs[0] + epochs[1]) / 2
        row_rule = {e for e in snapshot_edges(cfg, IslMode.CONVENTIONAL, div, mid) if e.active}
        per_sat = {e for e in snapshot_edges(cfg, IslMode.CONVENTIONAL, div, mid,
                                             ShutoffRule.PER_SATELLITE) if e.active}
        assert row_rule != per_sat

    def test_active_rows_match_region_table(self):
        for f, mode in ((0, IslMode.CONVENTIONAL), (2, IslMode.OPTIMIZED),
                        (5, IslMode.OPTIMIZED), (3, IslMode.CONVENTIONAL)):
            cfg = make_config(F=f)
            b = boundaries_for(cfg, mode)
            assert active_row_set(cfg, mode, division_for(cfg)) == b.active_rows()


class TestAnalyticCounts:
    @pytest.mark.parametrize("boundaries,expect", [
        ((14, 19, 32), 476),
        ((13, 19, 31), 442),
    ])
    def test_known_counts(self, boundaries, expect):
        from leovn.division import RegionBoundaries
        n_h, n_v = hisl_count_analytic(18, 36, RegionBoundaries(*boundaries))
        assert (n_h, n_v) == (expect, 648)

    def test_empty_equatorial_bands(self):
        from leovn.division import RegionBoundaries
        assert hisl_count_analytic(2, 8, RegionBoundaries(0, 5, 4))[0] == 0

    def test_snapshot_equals_analytic_full_grid(self):
        # exhaustive: every grid point, both modes, two separate epochs
        for n1, n2, polar, f, mode in product(
                (6, 12, 18), (12, 24, 36), (60, 64, 70, 80), range(6),
                (IslMode.CONVENTIONAL, IslMode.OPTIMIZED)):
            cfg = make_config(n1=n1, n2=n2, F=f, polar=polar)
            div = division_for(cfg)
            want = hisl_count_analytic(n1, n2, boundaries_for(cfg, mode))[0]
            for t in switching_epochs(cfg, div, 2):
                got = active_hisl_count(snapshot_edges(cfg, mode, div, t))
                assert got == want, (n1, n2, polar, f, mode, t)


class TestTheorem1:
    def test_small_case_unique_layout(self):
        spread, layout = theorem1_bruteforce(6, 12, 2)
        assert spread == 2 * Fraction(360 * 2, 72)
        assert layout == frozenset({3})

    def test_zero_phasing(self):
        assert theorem1_bruteforce(4, 12, 0) == (Fraction(0), frozenset())

    def test_integer_k_matches_closed_form(self):
        spread, layout = theorem1_bruteforce(9, 18, 3)
        pa = phase_analysis(9, 18, 3)
        assert spread == (pa.k_ratio - 1) * pa.delta_f_deg
        assert layout == pa.bh_planes

    def test_agreement_over_full_domain(self):
        for n1 in (4, 6, 9, 12):
            for n2 in (24, 36):
                for f in range(1, min(n1, n2 - 1) + 1):
                    pa = phase_analysis(n1, n2, f)
                    brute_min, brute_set = theorem1_bruteforce(n1, n2, f)
                    assert brute_min == pa.max_spread_optimized_deg, (n1, n2, f)
                    assert brute_set == pa.bh_planes, (n1, n2, f)
                    assert pa.max_spread_optimized_deg <= pa.max_spread_conventional_deg

    def test_spreads_are_multiples_of_base_unit(self):
        for n1, n2, f in ((6, 12, 4), (9, 18, 5), (12, 24, 7)):
            pa = phase_analysis(n1, n2, f)
            unit = pa.delta_f_deg / f
            for s in pa.spread_deg:
                assert s >= 0 and (s / unit).denominator == 1

    def test_size_guard(self):
        with pytest.raises(ConfigError):
            theorem1_bruteforce(13, 36, 2)

    def test_k_below_one_refused(self):
        with pytest.raises(ConfigError):
            theorem1_bruteforce(6, 36, 7)
