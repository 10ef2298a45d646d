"""Inter-satellite link topology under both connecting modes.

A satellite carries two intra-plane links (V-ISLs, always on) and two
inter-plane links (H-ISLs).  H-ISLs never cross the seam between the first
and last plane, and a whole row of H-ISL-chained satellites shuts off while
any member rides through a polar cap.  The conventional mode chains
same-slot satellites; the optimized mode inserts backward links (to the
trailing neighbor, one slot down) at every K-th plane boundary, which caps
the in-row phase spread at mod(h-1, K) * delta_f instead of (n1-1) * delta_f.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .angles import CELL_SNAP, circular_interval_hits_open
from .constellation import ConfigError, ConstellationConfig, SatelliteId
from .division import (
    DivisionConfig,
    RegionBoundaries,
    region_boundaries,
    region_boundaries_phased,
    region_boundaries_spread,
)


class IslMode(enum.Enum):
    CONVENTIONAL = "conventional"
    OPTIMIZED = "optimized"


class IslKind(enum.Enum):
    V_ISL = "V"
    H_ISL = "H"


class HDirection(enum.Enum):
    FH = "FH"       # forward: smallest positive phase offset (same slot)
    BH = "BH"       # backward: nearest trailing neighbor (slot - 1)
    NONE = "NONE"   # intra-plane links


class ShutoffRule(enum.Enum):
    """How polar shut-off is applied to H-ISLs.

    ROW_SYNCHRONIZED holds each row's state constant over a full cell dwell:
    the row is off for the entire handover interval whenever any member would
    enter a polar cap during it.  PER_SATELLITE switches each link the
    instant either endpoint's latitude crosses the threshold (the
    asynchronous behavior of the geographic baseline).
    """
    ROW_SYNCHRONIZED = "row"
    PER_SATELLITE = "per_satellite"


class IslEdge(NamedTuple):
    a: SatelliteId
    b: SatelliteId
    kind: IslKind
    h_direction: HDirection
    active: bool


@dataclass(frozen=True)
class PhaseAnalysis:
    """Phase-difference quantities of a Walker layout, exact degrees.

    ``bh_count[h]``/``fh_count[h]`` are the backward/forward link counts
    between plane 1 and plane h along a row under the optimized mode;
    ``spread_deg[h]`` the resulting phase difference mod(h-1, K) * delta_f.
    ``max_spread_conventional_wrapped_deg`` is a diagnostic: the circular
    span of the conventional row phases, which differs from the literal
    (n1-1)*delta_f once the row wraps most of the circle.
    """
    num_planes: int
    sats_per_plane: int
    phasing_factor: int
    delta_f_deg: Fraction
    k_ratio: Fraction | None
    max_spread_conventional_deg: Fraction
    max_spread_optimized_deg: Fraction
    max_spread_conventional_wrapped_deg: Fraction
    bh_count: tuple[int, ...]          # index h-1 -> N(h)
    fh_count: tuple[int, ...]          # index h-1 -> M(h)
    spread_deg: tuple[Fraction, ...]   # index h-1 -> optimized-row spread
    bh_planes: frozenset[int] | None   # BH boundaries; None when F > n1

    @property
    def delta_f_rad(self) -> float:
        return math.radians(float(self.delta_f_deg))

    @property
    def max_spread_conventional_rad(self) -> float:
        return math.radians(float(self.max_spread_conventional_deg))

    @property
    def max_spread_optimized_rad(self) -> float:
        return math.radians(float(self.max_spread_optimized_deg))


def _mod_fraction(value: int, modulus: Fraction) -> Fraction:
    return value - math.floor(value / modulus) * modulus


def phase_analysis(num_planes: int, sats_per_plane: int, phasing_factor: int) -> PhaseAnalysis:
    """Phase spread of conventional vs optimized rows for a Walker layout."""
    n1, n2, f = num_planes, sats_per_plane, phasing_factor
    if f < 0:
        raise ConfigError(f"phasing factor must be >= 0, got {f}")
    delta_f = Fraction(360 * f, n1 * n2)
    if f == 0:
        zero = Fraction(0)
        return PhaseAnalysis(
            num_planes=n1, sats_per_plane=n2, phasing_factor=0,
            delta_f_deg=zero, k_ratio=None,
            max_spread_conventional_deg=zero,
            max_spread_optimized_deg=zero,
            max_spread_conventional_wrapped_deg=zero,
            bh_count=tuple(0 for _ in range(n1)),
            fh_count=tuple(h for h in range(n1)),
            spread_deg=tuple(zero for _ in range(n1)),
            bh_planes=frozenset(),
        )
    k = Fraction(n1, f)
    bh_count = tuple(((h - 1) * f) // n1 for h in range(1, n1 + 1))
    fh_count = tuple((h - 1) - bh_count[h - 1] for h in range(1, n1 + 1))
    spread = tuple(_mod_fraction(h - 1, k) * delta_f for h in range(1, n1 + 1))
    conventional = (n1 - 1) * delta_f
    # circular span of the conventional row: 360 minus the largest gap
    phases = sorted(((h - 1) * delta_f) % 360 for h in range(1, n1 + 1))
    gaps = [phases[i + 1] - phases[i] for i in range(len(phases) - 1)]
    gaps.append(phases[0] + 360 - phases[-1])
    wrapped = min(conventional, 360 - max(gaps))
    bh_planes = bh_isl_planes(n1, k) if k >= 1 else None
    return PhaseAnalysis(
        num_planes=n1, sats_per_plane=n2, phasing_factor=f,
        delta_f_deg=delta_f, k_ratio=k,
        max_spread_conventional_deg=conventional,
        max_spread_optimized_deg=max(spread),
        max_spread_conventional_wrapped_deg=wrapped,
        bh_count=bh_count, fh_count=fh_count, spread_deg=spread,
        bh_planes=bh_planes,
    )


def bh_isl_planes(num_planes: int, k_ratio: Fraction) -> frozenset[int]:
    """Plane boundaries h (1..n1-1) that carry backward links.

    These are the boundaries where floor(h/K) - floor((h-1)/K) = 1; for
    integer K that is exactly the multiples of K up to n1-1.  Requires
    K >= 1 (F <= n1): below that a single backward link per boundary can no
    longer absorb the phase step and the layout is undefined.
    """
    k = Fraction(k_ratio)
    if k < 1:
        raise ConfigError(f"backward-link layout requires K >= 1, got K = {k}")
    out = set()
    for h in range(1, num_planes):
        if math.floor(h / k) - math.floor((h - 1) / k) == 1:
            out.add(h)
    return frozenset(out)


def h_neighbor(sat: SatelliteId, side: str, mode: IslMode,
               analysis: PhaseAnalysis) -> SatelliteId | None:
    """Inter-plane neighbor of a satellite, or None across the seam.

    Conventional chains keep the slot; at a backward boundary the eastern
    partner is one slot down (the trailing neighbor whose phase is behind by
    step - delta_f), and the western mirror is one slot up.
    """
    if side not in ("east", "west"):
        raise ValueError(f"side must be 'east' or 'west', got {side!r}")
    n1, n2 = analysis.num_planes, analysis.sats_per_plane
    if side == "east":
        if sat.plane >= n1:
            return None
        boundary, plane = sat.plane, sat.plane + 1
        shift = -1
    else:
        if sat.plane <= 1:
            return None
        boundary, plane = sat.plane - 1, sat.plane - 1
        shift = +1
    slot = sat.slot
    if mode is IslMode.OPTIMIZED and analysis.phasing_factor > 0:
        if analysis.bh_planes is None:
            raise ConfigError("optimized layout requires F <= n1")
        if boundary in analysis.bh_planes:
            slot = (sat.slot - 1 + shift) % n2 + 1
    return SatelliteId(plane=plane, slot=slot)


@lru_cache(maxsize=None)
def row_chains(config: ConstellationConfig, mode: IslMode) -> tuple[tuple[SatelliteId, ...], ...]:
    """The n2 rows of H-ISL-chained satellites, one member per plane.

    Row r (0-based) starts at (plane 1, slot r+1); the member in plane h is
    slot r+1 minus the number of backward boundaries crossed.
    """
    analysis = phase_analysis(config.num_planes, config.sats_per_plane, config.phasing_factor)
    n1, n2 = config.num_planes, config.sats_per_plane
    if mode is IslMode.OPTIMIZED and config.phasing_factor > 0 and analysis.bh_planes is None:
        raise ConfigError("optimized layout requires F <= n1")
    rows = []
    for j in range(1, n2 + 1):
        members = [SatelliteId(plane=1, slot=j)]
        for h in range(2, n1 + 1):
            members.append(h_neighbor(members[-1], "east", mode, analysis))
        rows.append(tuple(members))
    return tuple(rows)


def row_spreads_deg(config: ConstellationConfig, mode: IslMode) -> tuple[Fraction, ...]:
    """Exact phase offset of each row member relative to the plane-1 member."""
    analysis = phase_analysis(config.num_planes, config.sats_per_plane, config.phasing_factor)
    if mode is IslMode.OPTIMIZED:
        return analysis.spread_deg
    return tuple((h - 1) * analysis.delta_f_deg for h in range(1, config.num_planes + 1))


def polar_cap_phase_spans(config: ConstellationConfig) -> list[tuple[Fraction, Fraction]]:
    """Open spans of along-track phase (degrees) where |latitude| > threshold.

    Exact for the default 90 deg inclination; for other inclinations the cap
    edges come from asin(sin(threshold)/sin(inclination)) in floats.  Empty
    when the orbit never reaches the threshold latitude.
    """
    if config.inclination_deg == 90.0:
        p = Fraction(config.polar_threshold_deg)
    else:
        q = math.sin(config.polar_threshold) / math.sin(config.inclination)
        if q >= 1.0:
            return []
        p = Fraction(math.degrees(math.asin(q)))
    if p >= 90:
        return []
    return [(p, 180 - p), (180 + p, 360 - p)]


@lru_cache(maxsize=None)
def active_row_set(config: ConstellationConfig, mode: IslMode,
                   division: DivisionConfig) -> frozenset[int]:
    """Dwell rows v whose full handover interval keeps every member clear of
    the polar caps.

    Member h of a row anchored at dwell row v sweeps the half-open window
    [origin + (v-1)*step + spread_h, ... + step) of along-track phase during
    the dwell; the row is active for that dwell iff no window meets a cap.
    """
    spans = polar_cap_phase_spans(config)
    spreads = row_spreads_deg(config, mode)
    step = division.phase_step_deg
    active = set()
    for v in range(1, config.sats_per_plane + 1):
        base = division.lat_origin_deg + (v - 1) * step
        if not any(circular_interval_hits_open(base + s, step, spans) for s in spreads):
            active.add(v)
    return frozenset(active)


@lru_cache(maxsize=None)
def _static_pairs(config: ConstellationConfig, mode: IslMode):
    """Time-invariant structure: rows, flat H index pairs, boundary directions.

    Flat satellite index is (plane-1)*n2 + slot-1.  H pairs come out as an
    array shaped (n2 rows, n1-1 boundaries, 2).
    """
    n1, n2 = config.num_planes, config.sats_per_plane
    rows = row_chains(config, mode)
    h_pairs = np.array([[[(a.plane - 1) * n2 + a.slot - 1,
                          (b.plane - 1) * n2 + b.slot - 1]
                         for a, b in zip(row, row[1:])] for row in rows])
    analysis = phase_analysis(n1, n2, config.phasing_factor)
    bh = analysis.bh_planes if (mode is IslMode.OPTIMIZED and analysis.bh_planes) else frozenset()
    directions = tuple(HDirection.BH if h in bh else HDirection.FH for h in range(1, n1))
    return rows, h_pairs, directions


def phases_deg_all(config: ConstellationConfig, t: float) -> np.ndarray:
    """Wrapped phase (degrees) of every satellite, flat-indexed."""
    n1, n2 = config.num_planes, config.sats_per_plane
    planes = np.repeat(np.arange(n1), n2)
    slots = np.tile(np.arange(n2), n1)
    phase = (config.phase0_deg + slots * (360.0 / n2)
             + planes * float(config.phase_offset_deg)
             + 360.0 * t / config.period)
    return np.mod(phase, 360.0)


def row_activity(config: ConstellationConfig, mode: IslMode, division: DivisionConfig,
                 t: float, shutoff: ShutoffRule) -> np.ndarray:
    """Active flag of every H boundary, shaped (n2 rows, n1-1).

    Row rule: one flag per row, held for the whole dwell of its plane-1
    member.  Per-satellite rule: a boundary is on iff neither endpoint's
    instantaneous latitude is strictly beyond the threshold.
    """
    rows, h_pairs, _ = _static_pairs(config, mode)
    n1, n2 = config.num_planes, config.sats_per_plane
    phases = phases_deg_all(config, t)
    if shutoff is ShutoffRule.ROW_SYNCHRONIZED:
        active = active_row_set(config, mode, division)
        origin = float(division.row_start_deg(1, 1))
        base = phases[[row[0].slot - 1 for row in rows]]
        dwell = 1 + (np.floor((base - origin) % 360.0 / (360.0 / n2)
                              + CELL_SNAP).astype(int) % n2)
        flags = np.array([v in active for v in dwell])
        return np.repeat(flags[:, None], n1 - 1, axis=1)
    limit = math.sin(config.polar_threshold)
    polar = np.abs(math.sin(config.inclination)
                   * np.sin(np.radians(phases))) > limit
    return ~(polar[h_pairs[:, :, 0]] | polar[h_pairs[:, :, 1]])


def snapshot_edges(config: ConstellationConfig, mode: IslMode, division: DivisionConfig,
                   t: float, shutoff: ShutoffRule = ShutoffRule.ROW_SYNCHRONIZED) -> list[IslEdge]:
    """Physical edge set at time t: V-ISLs always active, H-ISLs per shutoff rule.

    Under the row rule a row's state is anchored to the dwell of its plane-1
    member and is constant between handovers; under the per-satellite rule
    each link follows its endpoints' instantaneous latitudes.
    """
    n1, n2 = config.num_planes, config.sats_per_plane
    rows, _, directions = _static_pairs(config, mode)
    edges: list[IslEdge] = []
    for h in range(1, n1 + 1):
        for j in range(1, n2 + 1):
            edges.append(IslEdge(
                a=SatelliteId(plane=h, slot=j),
                b=SatelliteId(plane=h, slot=j % n2 + 1),
                kind=IslKind.V_ISL, h_direction=HDirection.NONE, active=True))
    activity = row_activity(config, mode, division, t, shutoff)
    for r, row in enumerate(rows):
        for h in range(n1 - 1):
            edges.append(IslEdge(
                a=row[h], b=row[h + 1], kind=IslKind.H_ISL,
                h_direction=directions[h], active=bool(activity[r, h])))
    return edges


def active_hisl_count(edges: list[IslEdge]) -> int:
    return sum(1 for e in edges if e.kind is IslKind.H_ISL and e.active)


def hisl_count_analytic(num_planes: int, sats_per_plane: int,
                        b: RegionBoundaries) -> tuple[int, int]:
    """Closed-form (H-ISL, V-ISL) counts: (n1-1) * active rows, n1 * n2."""
    return (num_planes - 1) * b.active_row_count(), num_planes * sats_per_plane


def boundaries_for(config: ConstellationConfig, mode: IslMode) -> RegionBoundaries:
    """Region rows matching a connecting mode's realized row spread.

    F = 0 uses the spread-free closed form; the optimized mode uses the
    phased closed form (integer K) or the constraint form with the realized
    spread; the conventional mode uses the constraint form with the full
    (n1-1)*delta_f spread.  Assumes non-empty polar caps whenever the spread
    is non-zero (threshold below 90 deg).
    """
    n2 = config.sats_per_plane
    polar = Fraction(config.polar_threshold_deg)
    if config.phasing_factor == 0:
        return region_boundaries(n2, polar)
    analysis = phase_analysis(config.num_planes, n2, config.phasing_factor)
    if mode is IslMode.OPTIMIZED:
        return region_boundaries_phased(n2, polar, analysis.k_ratio,
                                        analysis.max_spread_optimized_deg)
    return region_boundaries_spread(n2, polar, analysis.max_spread_conventional_deg)


def theorem1_bruteforce(num_planes: int, sats_per_plane: int,
                        phasing_factor: int) -> tuple[Fraction, frozenset[int]]:
    """Exhaustive minimum of the in-row phase spread over link layouts.

    Tries every forward/backward assignment of the n1-1 plane boundaries,
    keeps those with non-negative cumulative phase difference at every plane,
    and returns (min over assignments of max spread, in exact degrees;
    the backward boundary set achieving it).  Restricted to n1 <= 12 (2^(n1-1)
    assignments) and F <= n1; the optimum is unique in that domain.
    """
    n1, n2, f = num_planes, sats_per_plane, phasing_factor
    if n1 > 12:
        raise ConfigError(f"brute-force oracle limited to num_planes <= 12, got {n1}")
    if f == 0:
        return Fraction(0), frozenset()
    if f > n1:
        raise ConfigError(f"oracle requires F <= n1 (K >= 1), got F = {f}")
    # integer walk in units of delta_f / F = 360/(n1*n2) degrees
    fh_step, bh_step = f, f - n1
    best_max = None
    best_masks: list[int] = []
    for mask in range(1 << (n1 - 1)):
        level = 0
        peak = 0
        feasible = True
        for boundary in range(n1 - 1):
            level += bh_step if mask >> boundary & 1 else fh_step
            if level < 0:
                feasible = False
                break
            peak = max(peak, level)
        if not feasible:
            continue
        if best_max is None or peak < best_max:
            best_max, best_masks = peak, [mask]
        elif peak == best_max:
            best_masks.append(mask)
    assert best_max is not None  # all-forward is always feasible
    mask = best_masks[0]
    bh_set = frozenset(b + 1 for b in range(n1 - 1) if mask >> b & 1)
    if len(best_masks) > 1:
        raise AssertionError(
            f"expected a unique optimal layout, found {len(best_masks)} for "
            f"n1={n1}, F={f}")
    return Fraction(360 * best_max, n1 * n2), bh_set
