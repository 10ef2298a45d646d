import math
import random

import pytest

from leovn.flow import INF_CAPACITY, MinCostMaxFlow
from leovn.verify import (
    all_paths_min_delay,
    min_cut_exhaustive,
    random_flow_graph,
)


def solve(n, arcs, source, sink):
    net = MinCostMaxFlow(n)
    for a, b, cap, cost in arcs:
        net.add_arc(a, b, cap, cost)
    value, cost = net.solve(source, sink)
    assert net.check_feasible(source, sink)
    return value, cost


class TestMinCostMaxFlow:
    def test_single_path(self):
        value, cost = solve(3, [(0, 1, 5, 1.0), (1, 2, 3, 2.0)], 0, 2)
        assert value == 3
        assert cost == pytest.approx(9.0)

    def test_parallel_paths_prefer_cheap_first(self):
        arcs = [(0, 1, 2, 1.0), (1, 3, 2, 1.0),   # cheap path, cap 2
                (0, 2, 2, 5.0), (2, 3, 2, 5.0)]   # expensive path, cap 2
        value, cost = solve(4, arcs, 0, 3)
        assert value == 4
        assert cost == pytest.approx(2 * 2.0 + 2 * 10.0)

    def test_bottleneck(self):
        arcs = [(0, 1, 10, 0.0), (1, 2, 1, 0.0), (2, 3, 10, 0.0)]
        assert solve(4, arcs, 0, 3)[0] == 1

    def test_disconnected(self):
        assert solve(4, [(0, 1, 5, 1.0), (2, 3, 5, 1.0)], 0, 3)[0] == 0

    def test_min_cost_uses_detour_only_when_needed(self):
        # classic: direct arc cap 1 cost 1; detour cost 3; max flow 2 must
        # pay 1 + 3
        arcs = [(0, 1, 1, 1.0), (0, 2, 1, 1.0), (2, 1, 1, 1.0), (1, 3, 2, 1.0)]
        value, cost = solve(4, arcs, 0, 3)
        assert value == 2
        assert cost == pytest.approx(1.0 + 1.0 + 1.0 + 1.0 + 1.0)

    def test_undirected_edge_carries_both_directions(self):
        net = MinCostMaxFlow(3)
        net.add_edge(0, 1, 2, 1.0)
        net.add_edge(1, 2, 2, 1.0)
        value, _ = net.solve(0, 2)
        assert value == 2

    def test_source_equals_sink_rejected(self):
        with pytest.raises(ValueError):
            MinCostMaxFlow(2).solve(0, 0)

    def test_negative_cost_rejected(self):
        with pytest.raises(ValueError):
            MinCostMaxFlow(2).add_arc(0, 1, 1, -1.0)

    def test_matches_exhaustive_min_cut_on_20_graphs(self):
        for seed in range(20):
            n, arcs = random_flow_graph(seed)
            value, _ = solve(n, arcs, 0, n - 1)
            assert value == min_cut_exhaustive(n, arcs, 0, n - 1), seed

    def test_unbounded_arcs_do_not_overflow(self):
        arcs = [(0, 1, INF_CAPACITY, 0.0), (1, 2, 7, 0.25), (2, 3, INF_CAPACITY, 0.0)]
        value, cost = solve(4, arcs, 0, 3)
        assert value == 7
        assert cost == pytest.approx(7 * 0.25)


class TestShortestPathKernel:
    def build_snapshot_like(self, n, edges):
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import dijkstra
        rows, cols, vals = [], [], []
        for a, b, w in edges:
            rows += [a, b]
            cols += [b, a]
            vals += [w, w]
        return dijkstra(csr_matrix((vals, (rows, cols)), shape=(n, n)),
                        directed=False, indices=list(range(n)))

    def test_matches_enumeration_on_20_graphs(self):
        for seed in range(100, 120):
            rng = random.Random(seed)
            n = rng.randrange(4, 11)
            edges = [(a, b, rng.uniform(0.1, 5.0))
                     for a in range(n) for b in range(a + 1, n) if rng.random() < 0.5]
            if not edges:
                edges = [(0, n - 1, 1.0)]
            dist = self.build_snapshot_like(n, edges)
            for dst in range(1, n):
                want = all_paths_min_delay(n, edges, 0, dst)
                got = float(dist[0][dst])
                if math.isinf(want):
                    assert math.isinf(got)
                else:
                    assert got == pytest.approx(want, abs=1e-9)

    def test_triangle_inequality_shortcut(self):
        dist = self.build_snapshot_like(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)])
        assert dist[0][2] == pytest.approx(2.0)
