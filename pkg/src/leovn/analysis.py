"""Network performance metrics over physical snapshots.

Throughput: satellites over a source box feed a super-source, satellites
over a sink box drain to a super-sink, every active ISL carries the
configured capacity at a cost equal to its propagation delay, and the
min-cost max-flow value is the system throughput.  Latency: mean shortest
propagation delay over seeded random satellite pairs.  Sweeps tabulate both,
plus the analytic H-ISL counts, across phasing factors and polar thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from .constellation import ConfigError, ConstellationConfig, propagate_all
from .division import division_for
from .flow import INF_CAPACITY, MinCostMaxFlow
from .isl import IslKind, IslMode, boundaries_for, hisl_count_analytic, snapshot_edges

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class WeightedIslEdge:
    a_index: int           # flat satellite index (plane-1)*n2 + slot-1
    b_index: int
    kind: IslKind
    length_m: float
    delay_s: float
    capacity_gbps: float


@dataclass(frozen=True)
class WeightedNetSnapshot:
    """Active edges at one instant, annotated with length, delay, capacity."""
    t: float
    num_sats: int
    edges: tuple[WeightedIslEdge, ...]
    positions: np.ndarray = field(repr=False)       # (N, 3) inertial, m
    lats: np.ndarray = field(repr=False)            # rad
    lons: np.ndarray = field(repr=False)            # rad, rotating frame


@dataclass(frozen=True)
class LatLonBox:
    """Closed latitude/longitude box in degrees; lon range must not wrap."""
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def contains(self, lat_deg: np.ndarray, lon_deg: np.ndarray) -> np.ndarray:
        return ((lat_deg >= self.lat_min) & (lat_deg <= self.lat_max)
                & (lon_deg >= self.lon_min) & (lon_deg <= self.lon_max))

    def overlaps(self, other: "LatLonBox") -> bool:
        return not (self.lat_max < other.lat_min or other.lat_max < self.lat_min
                    or self.lon_max < other.lon_min or other.lon_max < self.lon_min)


@dataclass(frozen=True)
class FlowScenario:
    """Ground regions and capacities for the throughput experiment.

    Default boxes: an east-west hemispheric pair (roughly North America to
    Europe/Africa).  ISLs carry ``isl_capacity_gbps`` per direction; the
    satellite-ground hops are uncapacitated.
    """
    source_region: LatLonBox = LatLonBox(20.0, 50.0, -130.0, -60.0)
    sink_region: LatLonBox = LatLonBox(20.0, 50.0, 0.0, 70.0)
    isl_capacity_gbps: float = 1.0

    def __post_init__(self) -> None:
        if self.source_region.overlaps(self.sink_region):
            raise ConfigError("source and sink regions must be disjoint")
        if self.isl_capacity_gbps <= 0:
            raise ConfigError("ISL capacity must be positive")


def weight_snapshot(config: ConstellationConfig, edges, t: float,
                    capacity_gbps: float = 1.0) -> WeightedNetSnapshot:
    """Annotate the active edges of a snapshot with chord length and delay."""
    n2 = config.sats_per_plane
    _, _, positions, lats, lons = propagate_all(config, t)
    weighted = []
    for e in edges:
        if not e.active:
            continue
        ia = (e.a.plane - 1) * n2 + (e.a.slot - 1)
        ib = (e.b.plane - 1) * n2 + (e.b.slot - 1)
        length = float(np.linalg.norm(positions[ia] - positions[ib]))
        weighted.append(WeightedIslEdge(
            a_index=ia, b_index=ib, kind=e.kind, length_m=length,
            delay_s=length / SPEED_OF_LIGHT, capacity_gbps=capacity_gbps))
    return WeightedNetSnapshot(t=t, num_sats=config.total_sats,
                               edges=tuple(weighted), positions=positions,
                               lats=lats, lons=lons)


def snapshot_at(config: ConstellationConfig, mode: IslMode, t: float,
                capacity_gbps: float = 1.0) -> WeightedNetSnapshot:
    division = division_for(config)
    return weight_snapshot(config, snapshot_edges(config, mode, division, t),
                           t, capacity_gbps)


def max_flow_throughput(snapshot: WeightedNetSnapshot,
                        scenario: FlowScenario) -> float:
    """System throughput in Gbps for one snapshot.

    Coverage is sub-point membership in a region box.  A satellite whose
    sub-point fell in both boxes would attach to the source only, but the
    boxes are disjoint so this cannot occur.  Returns 0 when either region
    is uncovered.
    """
    lat_deg = np.degrees(snapshot.lats)
    lon_deg = np.degrees(snapshot.lons)
    over_source = scenario.source_region.contains(lat_deg, lon_deg)
    over_sink = scenario.sink_region.contains(lat_deg, lon_deg) & ~over_source
    if not over_source.any() or not over_sink.any():
        return 0.0
    n = snapshot.num_sats
    source, sink = n, n + 1
    net = MinCostMaxFlow(n + 2)
    for i in np.flatnonzero(over_source):
        net.add_arc(source, int(i), INF_CAPACITY)
    for i in np.flatnonzero(over_sink):
        net.add_arc(int(i), sink, INF_CAPACITY)
    # one capacity unit == one ISL; per-direction capacity on each link
    for e in snapshot.edges:
        net.add_edge(e.a_index, e.b_index, 1, e.delay_s)
    flow_units, _cost = net.solve(source, sink)
    return flow_units * scenario.isl_capacity_gbps


def mean_throughput(config: ConstellationConfig, mode: IslMode,
                    scenario: FlowScenario | None = None,
                    snapshots: int = 16) -> float:
    """Mean throughput over evenly spaced snapshot times across one period."""
    scenario = scenario or FlowScenario()
    times = [k * config.period / snapshots for k in range(snapshots)]
    values = [max_flow_throughput(snapshot_at(config, mode, t,
                                              scenario.isl_capacity_gbps), scenario)
              for t in times]
    return float(np.mean(values))


# -- shortest-path latency ----------------------------------------------------

def delay_matrix(snapshot: WeightedNetSnapshot) -> csr_matrix:
    """Symmetric sparse matrix of per-edge propagation delays (seconds)."""
    n = snapshot.num_sats
    rows, cols, vals = [], [], []
    for e in snapshot.edges:
        rows += [e.a_index, e.b_index]
        cols += [e.b_index, e.a_index]
        vals += [e.delay_s, e.delay_s]
    return csr_matrix((vals, (rows, cols)), shape=(n, n))


def shortest_path_delays(snapshot: WeightedNetSnapshot,
                         sources: np.ndarray) -> np.ndarray:
    """Min propagation delay from each source to every satellite (seconds).

    Unreachable entries are +inf.
    """
    return csgraph_dijkstra(delay_matrix(snapshot), directed=False,
                            indices=sources)


def draw_pairs(total_sats: int, pairs: int, seed: int) -> np.ndarray:
    """Seeded ordered satellite pairs, shape (pairs, 2).

    Stream contract: numpy PCG64 via default_rng(seed), a single
    integers(0, N, size=(pairs, 2)) call; identical across platforms.
    Self-pairs can occur and contribute zero delay.
    """
    rng = np.random.default_rng(seed)
    return rng.integers(0, total_sats, size=(pairs, 2))


@dataclass(frozen=True)
class LatencyResult:
    mean_ms: float
    unreachable_fraction: float
    pairs: int
    snapshots: int


def avg_latency(config: ConstellationConfig, mode: IslMode, pairs: int,
                seed: int, snapshots: int = 16) -> LatencyResult:
    """Mean shortest-path delay over seeded pairs and snapshot times.

    Pools all (pair, snapshot) samples; unreachable ones are excluded from
    the mean and reported as a fraction.  Pair draws depend only on the seed,
    so runs across modes or phasing factors compare identical pair sets.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    pair_arr = draw_pairs(config.total_sats, pairs, seed)
    sources = np.unique(pair_arr[:, 0])
    source_pos = {int(s): k for k, s in enumerate(sources)}
    src_rows = np.array([source_pos[int(s)] for s in pair_arr[:, 0]])
    total, count, unreachable = 0.0, 0, 0
    times = [k * config.period / snapshots for k in range(snapshots)]
    for t in times:
        snap = snapshot_at(config, mode, t)
        dist = shortest_path_delays(snap, sources)
        delays = dist[src_rows, pair_arr[:, 1]]
        finite = np.isfinite(delays)
        total += float(delays[finite].sum())
        count += int(finite.sum())
        unreachable += int((~finite).sum())
    mean_ms = (total / count) * 1e3 if count else float("inf")
    return LatencyResult(mean_ms=mean_ms,
                         unreachable_fraction=unreachable / (len(times) * pairs),
                         pairs=pairs, snapshots=snapshots)


# -- sweeps --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    phasing_factor: int
    polar_threshold_deg: float
    mode: str
    n_hisl: int
    throughput_gbps: float | None
    avg_latency_ms: float | None
    error: str = ""


def sweep(config_template: ConstellationConfig, f_values, polar_values, modes,
          include_throughput: bool = False, include_latency: bool = False,
          pairs: int = 10_000, seed: int | None = None,
          snapshots: int = 16) -> list[SweepRow]:
    """One row per (F, polar threshold, mode) with the chosen metrics.

    Failing grid points are recorded as error rows and the sweep continues.
    Latency requires an explicit seed.
    """
    if include_latency and seed is None:
        raise ConfigError("latency sweeps require an explicit seed")
    rows = []
    for polar in polar_values:
        for f in f_values:
            for mode in modes:
                try:
                    cfg = ConstellationConfig(
                        num_planes=config_template.num_planes,
                        sats_per_plane=config_template.sats_per_plane,
                        phasing_factor=int(f),
                        altitude_km=config_template.altitude_km,
                        inclination_deg=config_template.inclination_deg,
                        polar_threshold_deg=float(polar),
                        raan0_deg=config_template.raan0_deg,
                        period_s=config_template.period_s,
                    )
                    n_hisl = hisl_count_analytic(
                        cfg.num_planes, cfg.sats_per_plane,
                        boundaries_for(cfg, mode))[0]
                    throughput = (mean_throughput(cfg, mode, snapshots=snapshots)
                                  if include_throughput else None)
                    latency = (avg_latency(cfg, mode, pairs, seed, snapshots).mean_ms
                               if include_latency else None)
                    rows.append(SweepRow(
                        phasing_factor=int(f), polar_threshold_deg=float(polar),
                        mode=mode.value, n_hisl=n_hisl,
                        throughput_gbps=throughput, avg_latency_ms=latency))
                except Exception as exc:  # keep sweeping, record the point
                    rows.append(SweepRow(
                        phasing_factor=int(f), polar_threshold_deg=float(polar),
                        mode=mode.value, n_hisl=-1, throughput_gbps=None,
                        avg_latency_ms=None, error=str(exc)))
    return rows
