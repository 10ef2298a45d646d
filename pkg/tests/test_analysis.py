import math

import numpy as np
import pytest

from leovn.analysis import (
    SPEED_OF_LIGHT,
    FlowScenario,
    LatLonBox,
    avg_latency,
    delay_matrix,
    draw_pairs,
    max_flow_throughput,
    mean_throughput,
    shortest_path_delays,
    snapshot_at,
    sweep,
    weight_snapshot,
)
from leovn.constellation import ConfigError, ConstellationConfig
from leovn.division import division_for
from leovn.isl import IslKind, IslMode, snapshot_edges


def make_config(F=0, n1=18, n2=36, altitude_km=629.0):
    # altitude 629 km puts the orbit radius at exactly 7000 km
    return ConstellationConfig(num_planes=n1, sats_per_plane=n2, phasing_factor=F,
                               altitude_km=altitude_km, polar_threshold_deg=70.0)


class TestWeightSnapshot:
    def test_v_isl_chord_length(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        expect = 2 * 7000e3 * math.sin(math.pi / 36)   # 1220.18 km
        v_lengths = {e.length_m for e in snap.edges if e.kind is IslKind.V_ISL}
        assert all(length == pytest.approx(expect, rel=1e-9) for length in v_lengths)
        assert expect == pytest.approx(1220.18e3, rel=1e-4)

    def test_equatorial_h_isl_matches_v_chord(self):
        # F=0: slot 8 sits on the equator at t=0; same-chord geometry
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        expect = 2 * 7000e3 * math.sin(math.radians(5.0))
        eq_edges = [e for e in snap.edges
                    if e.kind is IslKind.H_ISL and e.a_index % 36 == 7]
        assert eq_edges
        for e in eq_edges:
            assert e.length_m == pytest.approx(expect, rel=1e-9)

    def test_h_isl_shrinks_toward_polar_threshold(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        by_slot = {}
        for e in snap.edges:
            if e.kind is IslKind.H_ISL and e.a_index // 36 == 0:
                by_slot[e.a_index % 36] = e.length_m
        assert by_slot[13] < by_slot[9] < by_slot[7]  # lat 60 < lat 20 < equator

    def test_delay_is_length_over_c(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 100.0)
        for e in snap.edges[:20]:
            assert e.delay_s == pytest.approx(e.length_m / SPEED_OF_LIGHT)
        assert all(e.delay_s > 0 for e in snap.edges)

    def test_only_active_edges_kept(self):
        cfg = make_config()
        division = division_for(cfg)
        edges = snapshot_edges(cfg, IslMode.CONVENTIONAL, division, 0.0)
        snap = weight_snapshot(cfg, edges, 0.0)
        assert len(snap.edges) == sum(1 for e in edges if e.active) == 648 + 476


class TestFlowScenario:
    def test_default_regions_disjoint(self):
        FlowScenario()  # must not raise

    def test_overlapping_regions_rejected(self):
        with pytest.raises(ConfigError):
            FlowScenario(source_region=LatLonBox(10, 40, -30, 30),
                         sink_region=LatLonBox(20, 50, 0, 70))

    def test_nonpositive_capacity_rejected(self):
        with pytest.raises(ConfigError):
            FlowScenario(isl_capacity_gbps=0.0)


class TestThroughput:
    def test_uncovered_region_yields_zero(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        empty = FlowScenario(source_region=LatLonBox(-2, 2, -2, 2),
                             sink_region=LatLonBox(85, 90, -180, -179))
        assert max_flow_throughput(snap, empty) == 0.0

    def test_positive_for_default_scenario(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        assert max_flow_throughput(snap, FlowScenario()) > 0

    def test_capacity_scales_linearly(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0, capacity_gbps=2.5)
        base = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        assert max_flow_throughput(snap, FlowScenario(isl_capacity_gbps=2.5)) \
            == pytest.approx(2.5 * max_flow_throughput(base, FlowScenario()))

    def test_optimized_not_worse_than_conventional(self):
        for f in (2, 5, 9):
            cfg = make_config(F=f)
            conv = mean_throughput(cfg, IslMode.CONVENTIONAL, snapshots=4)
            opt = mean_throughput(cfg, IslMode.OPTIMIZED, snapshots=4)
            assert opt >= conv


class TestLatency:
    def test_pair_stream_is_seed_deterministic(self):
        a = draw_pairs(648, 100, 42)
        b = draw_pairs(648, 100, 42)
        c = draw_pairs(648, 100, 43)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_self_pair_zero_delay(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        dist = shortest_path_delays(snap, np.array([5]))
        assert dist[0][5] == 0.0

    def test_adjacent_same_plane_pair_is_single_hop(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 0.0)
        chord = 2 * 7000e3 * math.sin(math.pi / 36)
        dist = shortest_path_delays(snap, np.array([0]))
        assert dist[0][1] == pytest.approx(chord / SPEED_OF_LIGHT, rel=1e-9)

    def test_deterministic_under_seed(self):
        cfg = make_config()
        r1 = avg_latency(cfg, IslMode.CONVENTIONAL, pairs=500, seed=7, snapshots=2)
        r2 = avg_latency(cfg, IslMode.CONVENTIONAL, pairs=500, seed=7, snapshots=2)
        assert r1 == r2

    def test_unreachable_fraction_reported(self):
        # conventional F=14 has no inter-plane links: cross-plane pairs drop
        cfg = make_config(F=14)
        res = avg_latency(cfg, IslMode.CONVENTIONAL, pairs=800, seed=3, snapshots=2)
        assert res.unreachable_fraction > 0.8
        assert math.isfinite(res.mean_ms)

    def test_delay_matrix_is_symmetric(self):
        cfg = make_config()
        snap = snapshot_at(cfg, IslMode.CONVENTIONAL, 50.0)
        mat = delay_matrix(snap)
        assert (mat != mat.T).nnz == 0


class TestSweep:
    def test_hisl_columns_match_reference_counts(self):
        cfg = make_config(altitude_km=780.0)
        rows = sweep(cfg, f_values=(0, 2, 14), polar_values=(70.0,),
                     modes=(IslMode.CONVENTIONAL,))
        by_f = {r.phasing_factor: r.n_hisl for r in rows}
        assert by_f == {0: 476, 2: 408, 14: 0}

    def test_optimized_flat_at_442(self):
        cfg = make_config(altitude_km=780.0)
        rows = sweep(cfg, f_values=range(1, 18), polar_values=(70.0,),
                     modes=(IslMode.OPTIMIZED,))
        assert {r.n_hisl for r in rows} == {442}

    def test_optimized_count_never_below_conventional(self):
        cfg = make_config(altitude_km=780.0)
        for polar in (60.0, 64.0, 70.0, 80.0):
            rows = sweep(cfg, f_values=range(1, 18), polar_values=(polar,),
                         modes=(IslMode.CONVENTIONAL, IslMode.OPTIMIZED))
            by_mode = {}
            for r in rows:
                by_mode.setdefault(r.phasing_factor, {})[r.mode] = r.n_hisl
            for f, counts in by_mode.items():
                assert counts["optimized"] >= counts["conventional"], (polar, f)

    def test_latency_requires_seed(self):
        cfg = make_config()
        with pytest.raises(ConfigError):
            sweep(cfg, (0,), (70.0,), (IslMode.CONVENTIONAL,), include_latency=True)

    def test_failing_point_becomes_error_row(self):
        cfg = make_config()
        rows = sweep(cfg, f_values=(0, 99), polar_values=(70.0,),
                     modes=(IslMode.CONVENTIONAL,))
        errors = [r for r in rows if r.error]
        assert len(errors) == 1 and errors[0].phasing_factor == 99
        assert len(rows) == 2
