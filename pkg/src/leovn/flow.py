"""Min-cost max-flow on small directed graphs.

Successive shortest augmenting paths with Johnson potentials: every
augmentation runs Dijkstra on reduced costs, pushes the bottleneck residual
capacity, and updates potentials.  Capacities are integers (flow arrives in
whole units); costs are non-negative floats.  Sized for the constellation
graphs used here (hundreds of nodes, thousands of arcs).
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

INF_CAPACITY = 10 ** 9


@dataclass
class _Arc:
    dst: int
    cap: int
    cost: float
    flow: int = 0


class MinCostMaxFlow:
    """Directed flow network; add arcs, then solve(source, sink)."""

    def __init__(self, num_nodes: int):
        self.num_nodes = num_nodes
        self.arcs: list[_Arc] = []
        self.adj: list[list[int]] = [[] for _ in range(num_nodes)]

    def add_arc(self, src: int, dst: int, cap: int, cost: float = 0.0) -> int:
        """Add a directed arc and its zero-capacity reverse; returns arc index."""
        if cost < 0:
            raise ValueError("arc costs must be non-negative")
        idx = len(self.arcs)
        self.arcs.append(_Arc(dst=dst, cap=cap, cost=cost))
        self.arcs.append(_Arc(dst=src, cap=0, cost=-cost))
        self.adj[src].append(idx)
        self.adj[dst].append(idx + 1)
        return idx

    def add_edge(self, a: int, b: int, cap: int, cost: float = 0.0) -> None:
        """Undirected capacity: antiparallel arcs of ``cap`` each."""
        self.add_arc(a, b, cap, cost)
        self.add_arc(b, a, cap, cost)

    def solve(self, source: int, sink: int) -> tuple[int, float]:
        """Return (max flow value, cost of the min-cost max flow)."""
        if source == sink:
            raise ValueError("source and sink must differ")
        n = self.num_nodes
        potential = [0.0] * n
        total_flow, total_cost = 0, 0.0
        while True:
            dist = [float("inf")] * n
            dist[source] = 0.0
            parent_arc = [-1] * n
            heap = [(0.0, source)]
            while heap:
                d, node = heapq.heappop(heap)
                if d > dist[node] + 1e-12:
                    continue
                for ai in self.adj[node]:
                    arc = self.arcs[ai]
                    if arc.flow >= arc.cap:
                        continue
                    reduced = arc.cost + potential[node] - potential[arc.dst]
                    if reduced < 0.0:  # float dust only; exact costs are >= 0
                        reduced = 0.0
                    nd = d + reduced
                    if nd < dist[arc.dst] - 1e-12:
                        dist[arc.dst] = nd
                        parent_arc[arc.dst] = ai
                        heapq.heappush(heap, (nd, arc.dst))
            if dist[sink] == float("inf"):
                return total_flow, total_cost
            for i in range(n):
                if dist[i] < float("inf"):
                    potential[i] += dist[i]
            bottleneck = INF_CAPACITY
            node = sink
            while node != source:
                arc = self.arcs[parent_arc[node]]
                bottleneck = min(bottleneck, arc.cap - arc.flow)
                node = self.arcs[parent_arc[node] ^ 1].dst
            node = sink
            while node != source:
                ai = parent_arc[node]
                self.arcs[ai].flow += bottleneck
                self.arcs[ai ^ 1].flow -= bottleneck
                total_cost += bottleneck * self.arcs[ai].cost
                node = self.arcs[ai ^ 1].dst
            total_flow += bottleneck

    def check_feasible(self, source: int, sink: int) -> bool:
        """Capacity bounds and per-node conservation of the current flow."""
        for arc in self.arcs[::2]:
            if not 0 <= arc.flow <= arc.cap:
                return False
        net = [0] * self.num_nodes
        for src in range(self.num_nodes):
            for ai in self.adj[src]:
                if ai % 2 == 0:
                    arc = self.arcs[ai]
                    net[src] -= arc.flow
                    net[arc.dst] += arc.flow
        return all(net[i] == 0 for i in range(self.num_nodes)
                   if i not in (source, sink))
