"""Virtual-node division: celestial-sphere cells and the geographic baseline.

The celestial division (CSD) assigns each satellite a virtual address (v, h):
h is its plane, v the index of the along-track phase band it currently
occupies.  Bands are half-open [start, start + 360/n2) so a satellite exactly
on a boundary belongs to the upper cell.  The geographic division (GRD)
freezes the t=0 ground projection of those cells and serves each frozen cell
with whichever satellite covers it, either from the original plane only
(variant 1) or from any plane (variant 2).

Row-boundary arithmetic is exact (Fraction degrees); see angles.py.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .angles import CELL_SNAP, fold_lat_deg, normalize_lon_deg, snapped_floor
from .constellation import (
    R_EARTH,
    ConfigError,
    ConstellationConfig,
    SatelliteState,
    propagate_all,
)


class VirtualAddress(NamedTuple):
    """Virtual node address: row v (1..n2, along track), plane h (1..n1)."""
    row: int
    plane: int


class RegionLabel(enum.Enum):
    R1 = "R1"   # ascending equatorial band, inter-plane links on
    P1 = "P1"   # first polar band, inter-plane links off
    R2 = "R2"   # descending equatorial band, links on
    P2 = "P2"   # second polar band, links off


@dataclass(frozen=True)
class RegionBoundaries:
    """Row indices splitting 1..n2 into R1 / P1 / R2 / P2.

    r1_end is the last row of R1, r2_start/r2_end delimit R2.  R2 is empty
    when r2_end == r2_start - 1; r1_end == 0 means R1 is empty (possible for
    large row phase spreads).
    """
    r1_end: int
    r2_start: int
    r2_end: int

    def active_row_count(self) -> int:
        return self.r1_end + max(0, self.r2_end - self.r2_start + 1)

    def active_rows(self) -> set[int]:
        return set(range(1, self.r1_end + 1)) | set(range(self.r2_start, self.r2_end + 1))


@dataclass(frozen=True)
class VnCellBounds:
    """Raw cell bounds in degrees.

    Longitudes are normalized to [-180, 180); latitudes are the folds of the
    band's start/end phase, so descending bands have lat_low > lat_high.
    pole_wrap marks cells whose half-open phase band [start, start+step)
    contains a pole crossing.
    """
    lon_low: float
    lon_high: float
    lat_low: float
    lat_high: float
    pole_wrap: bool


@dataclass(frozen=True)
class DivisionConfig:
    """Division descriptor: origin of cell (1,1) plus the phased-offset rule.

    When ``phased`` is set, the cell grid of plane h is shifted along track
    by mod(h-1, K) * delta_f, which cancels the in-row phase spread of the
    optimized link layout (K = n1/F, kept as an exact rational).
    """
    num_planes: int
    sats_per_plane: int
    lat_origin_deg: Fraction      # along-track start of row 1 (phase angle)
    lon_origin_deg: Fraction      # inertial longitude of column 1's west edge
    phase_offset_deg: Fraction    # adjacent-plane phase offset (360F/(n1 n2))
    phased: bool = False
    k_ratio: Fraction | None = None

    def __post_init__(self) -> None:
        if self.phased and (self.k_ratio is None or self.phase_offset_deg == 0):
            raise ConfigError("phased division requires F > 0 (K = n1/F undefined at F = 0)")

    @property
    def phase_step_deg(self) -> Fraction:
        return Fraction(360, self.sats_per_plane)

    @property
    def raan_step_deg(self) -> Fraction:
        return Fraction(180, self.num_planes)

    def plane_shift_deg(self, plane: int) -> Fraction:
        """Along-track grid shift of a plane: mod(h-1, K) * delta_f (phased)."""
        if not self.phased:
            return Fraction(0)
        k = self.k_ratio
        r = (plane - 1) - math.floor((plane - 1) / k) * k
        return r * self.phase_offset_deg

    def row_start_deg(self, row: int, plane: int) -> Fraction:
        """Unfolded start angle of cell (row, plane), exact degrees."""
        return (self.lat_origin_deg + self.plane_shift_deg(plane)
                + (row - 1) * self.phase_step_deg)


def division_for(config: ConstellationConfig, phased: bool | None = None,
                 lat_origin_deg=None) -> DivisionConfig:
    """Division matching a constellation: row 1 starts at -polar threshold,
    column 1 at raan0.

    ``phased`` defaults to F > 0; pass False to force the unshifted grid.
    ``lat_origin_deg`` overrides the default row origin for sensitivity
    studies.
    """
    if phased is None:
        phased = config.phasing_factor > 0
    phased = phased and config.phasing_factor > 0
    k = (Fraction(config.num_planes, config.phasing_factor)
         if config.phasing_factor > 0 else None)
    origin = (-Fraction(config.polar_threshold_deg) if lat_origin_deg is None
              else Fraction(lat_origin_deg))
    return DivisionConfig(
        num_planes=config.num_planes,
        sats_per_plane=config.sats_per_plane,
        lat_origin_deg=origin,
        lon_origin_deg=Fraction(config.raan0_deg),
        phase_offset_deg=config.phase_offset_deg,
        phased=phased,
        k_ratio=k if phased else None,
    )


# -- cell bounds -------------------------------------------------------------

def vn_longitude_range(plane: int, lon_origin_deg, raan_step_deg) -> tuple[float, float]:
    """Longitude bounds of column ``plane``: origin + (h-1)/h * step, wrapped."""
    lo = normalize_lon_deg(Fraction(lon_origin_deg) + (plane - 1) * Fraction(raan_step_deg))
    hi = normalize_lon_deg(Fraction(lon_origin_deg) + plane * Fraction(raan_step_deg))
    return float(lo), float(hi)


def vn_latitude_range(row: int, plane: int, division: DivisionConfig) -> tuple[float, float, bool]:
    """Latitude bounds of cell (row, plane) plus the pole_wrap flag.

    Bounds are the folds of the band's start and end angle; on descending
    bands the first value exceeds the second.  pole_wrap is set when the
    half-open band [start, start + step) contains +90 or 270 deg of unfolded
    phase (i.e. the cell rides over a pole).
    """
    start = division.row_start_deg(row, plane)
    step = division.phase_step_deg
    low = fold_lat_deg(start)
    high = fold_lat_deg(start + step)
    rel_north = (90 - start) % 360
    rel_south = (270 - start) % 360
    pole_wrap = rel_north < step or rel_south < step
    return float(low), float(high), pole_wrap


def cell_bounds(row: int, plane: int, division: DivisionConfig) -> VnCellBounds:
    lon_low, lon_high = vn_longitude_range(
        plane, division.lon_origin_deg, division.raan_step_deg)
    lat_low, lat_high, pole_wrap = vn_latitude_range(row, plane, division)
    return VnCellBounds(lon_low=lon_low, lon_high=lon_high,
                        lat_low=lat_low, lat_high=lat_high, pole_wrap=pole_wrap)


# -- region boundaries -------------------------------------------------------

def _as_deg_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def region_boundaries(sats_per_plane: int, polar_deg) -> RegionBoundaries:
    """Closed-form region rows for the zero-spread division.

    r1_end = floor(n2 * polar / 180), r2_start = ceil(n2/2 + 1),
    r2_end = floor(n2 * polar / 180 + n2 / 2).  ``polar_deg`` may be an int,
    float or Fraction; the arithmetic is exact.
    """
    n2 = sats_per_plane
    polar = _as_deg_fraction(polar_deg)
    if not 0 < polar <= 90:
        raise ConfigError(f"polar threshold must be in (0, 90] deg, got {polar}")
    r1_end = math.floor(Fraction(n2) * polar / 180)
    r2_start = math.ceil(Fraction(n2, 2) + 1)
    r2_end = math.floor(Fraction(n2) * polar / 180 + Fraction(n2, 2))
    return RegionBoundaries(r1_end=r1_end, r2_start=r2_start, r2_end=min(r2_end, n2))


def region_boundaries_spread(sats_per_plane: int, polar_deg, max_spread_deg) -> RegionBoundaries:
    """Constraint-form region rows for a row phase spread ``max_spread_deg``.

    Largest v with v*step + spread <= 2*polar (R1), smallest v with
    (v-1)*step >= 180 (R2 start), largest v with v*step + spread <= 180 +
    2*polar (R2 end).  Degenerate spreads clamp R1 to empty and R2 to
    r2_start - 1.
    """
    n2 = sats_per_plane
    polar = _as_deg_fraction(polar_deg)
    spread = _as_deg_fraction(max_spread_deg)
    if spread < 0:
        raise ConfigError(f"phase spread must be >= 0, got {spread}")
    step = Fraction(360, n2)
    r1_end = math.floor((2 * polar - spread) / step)
    r2_start = math.ceil(Fraction(n2, 2) + 1)
    r2_end = math.floor((180 + 2 * polar - spread) / step)
    return RegionBoundaries(
        r1_end=max(0, r1_end),
        r2_start=r2_start,
        r2_end=min(max(r2_end, r2_start - 1), n2),
    )


def region_boundaries_phased(sats_per_plane: int, polar_deg, k_ratio: Fraction,
                             max_spread_deg=None) -> RegionBoundaries:
    """Region rows for the phased division.

    For integer K the closed form floor(n2*polar/180 - (K-1)/K) applies (and
    equals the constraint form with spread (K-1)*delta_f).  For fractional K
    the caller must supply the realized row spread ``max_spread_deg``
    (max over planes of mod(h-1, K) * delta_f).
    """
    n2 = sats_per_plane
    polar = _as_deg_fraction(polar_deg)
    k = Fraction(k_ratio)
    if k <= 0:
        raise ConfigError(f"K = n1/F must be positive, got {k}")
    if k.denominator == 1:
        off = Fraction(k - 1, k)
        r1_end = math.floor(Fraction(n2) * polar / 180 - off)
        r2_start = math.ceil(Fraction(n2, 2) + 1)
        r2_end = math.floor(Fraction(n2) * polar / 180 + Fraction(n2, 2) - off)
        return RegionBoundaries(
            r1_end=max(0, r1_end),
            r2_start=r2_start,
            r2_end=min(max(r2_end, r2_start - 1), n2),
        )
    if max_spread_deg is None:
        raise ConfigError("fractional K requires the realized max row spread")
    return region_boundaries_spread(n2, polar, max_spread_deg)


def classify_region(row: int, b: RegionBoundaries) -> RegionLabel:
    """Region of a row, evaluated in R1, P1, R2, P2 order."""
    if row <= b.r1_end:
        return RegionLabel.R1
    if row < b.r2_start:
        return RegionLabel.P1
    if row <= b.r2_end:
        return RegionLabel.R2
    return RegionLabel.P2


# -- satellite -> address mapping ---------------------------------------------

def csd_row_from_phase(phase_deg: float, plane: int, division: DivisionConfig) -> int:
    """Row index of a phase angle (degrees) in a plane's cell grid."""
    n2 = division.sats_per_plane
    rel = (phase_deg - float(division.row_start_deg(1, plane))) % 360.0
    idx = snapped_floor(rel / (360.0 / n2))
    return 1 + idx % n2


def csd_map(state: SatelliteState, config: ConstellationConfig,
            division: DivisionConfig) -> VirtualAddress:
    """CSD address of a satellite: plane fixed, row from the phase angle.

    The row comes from the argument of latitude, not the geodetic latitude,
    so ascending and descending passes map to distinct rows.
    """
    row = csd_row_from_phase(math.degrees(state.phase), state.sat.plane, division)
    return VirtualAddress(row=row, plane=state.sat.plane)


def csd_rows_all(config: ConstellationConfig, division: DivisionConfig, t: float) -> np.ndarray:
    """Vectorized CSD row index for every satellite at time t.

    Returns an int array shaped (n1, n2) indexed by (plane-1, slot-1).
    """
    n1, n2 = config.num_planes, config.sats_per_plane
    planes = np.arange(n1)[:, None]
    slots = np.arange(n2)[None, :]
    step = 360.0 / n2
    phase = (config.phase0_deg + slots * step
             + planes * float(config.phase_offset_deg)
             + 360.0 * t / config.period)
    shifts = np.array([float(division.plane_shift_deg(h)) for h in range(1, n1 + 1)])
    rel = np.mod(phase - float(division.lat_origin_deg) - shifts[:, None], 360.0)
    rows = 1 + np.floor(rel / step + CELL_SNAP).astype(int) % n2
    return rows


def switching_epochs(config: ConstellationConfig, division: DivisionConfig,
                     count: int, t_start: float = 0.0) -> list[float]:
    """First ``count`` cell-handover instants at or after ``t_start``.

    Handovers happen when plane 1 sits exactly on its cell boundaries, every
    T/n2 seconds.
    """
    period = config.period
    step_t = period / config.sats_per_plane
    # offset of the first epoch: phase0 + 360 t/T == lat origin (mod step)
    lag_deg = float((division.lat_origin_deg - Fraction(config.phase0_deg)) %
                    division.phase_step_deg)
    t0 = lag_deg / 360.0 * period
    k0 = math.ceil((t_start - t0) / step_t - 1e-12)
    return [t0 + k * step_t for k in range(k0, k0 + count)]


def grd_switch_interval(period: float, sats_per_plane: int) -> float:
    """Ground-cell handover interval of the geographic division: T / n2."""
    if period <= 0:
        raise ConfigError(f"period must be > 0, got {period}")
    return period / sats_per_plane


# -- geographic (GRD) grid ----------------------------------------------------

class GrdVariant(enum.Enum):
    INTRA_ONLY = "intra_only"     # cells only ever served by their t=0 plane
    INTER_PLANE = "inter_plane"   # cells served by the best satellite anywhere


class _NoCover:
    def __repr__(self) -> str:  # pragma: no cover - repr only
        return "NO_COVER"


NO_COVER = _NoCover()


@dataclass(frozen=True, eq=False)
class GrdGrid:
    """Earth-fixed grid frozen from the t=0 ground projection of the cells.

    ``anchors`` holds unit vectors (Earth-fixed frame) of each cell's anchor
    point, the t=0 sub-point of the cell's along-track start, shaped
    (n2, n1, 3).  At t=0 with the default epoch phase the satellite addressed
    (v, h) sits at the zenith of anchor (v, h).
    """
    num_planes: int
    sats_per_plane: int
    anchors: np.ndarray
    anchor_lat_deg: np.ndarray
    anchor_lon_deg: np.ndarray


def build_grd_grid(config: ConstellationConfig, division: DivisionConfig) -> GrdGrid:
    n1, n2 = config.num_planes, config.sats_per_plane
    inc = config.inclination
    anchors = np.empty((n2, n1, 3))
    lats = np.empty((n2, n1))
    lons = np.empty((n2, n1))
    for h in range(1, n1 + 1):
        raan = math.radians(float(config.raan_deg(h)))
        for v in range(1, n2 + 1):
            u = math.radians(float(division.row_start_deg(v, h)))
            cu, su = math.cos(u), math.sin(u)
            vec = np.array([
                cu * math.cos(raan) - su * math.cos(inc) * math.sin(raan),
                cu * math.sin(raan) + su * math.cos(inc) * math.cos(raan),
                su * math.sin(inc),
            ])
            anchors[v - 1, h - 1] = vec
            lats[v - 1, h - 1] = math.degrees(math.asin(max(-1.0, min(1.0, vec[2]))))
            lons[v - 1, h - 1] = math.degrees(math.atan2(vec[1], vec[0]))
    return GrdGrid(num_planes=n1, sats_per_plane=n2, anchors=anchors,
                   anchor_lat_deg=lats, anchor_lon_deg=lons)


def _coverage_cos_limit(config: ConstellationConfig, sigma_min_deg: float) -> float:
    """cos of the max central angle at which elevation >= sigma_min."""
    sigma = math.radians(sigma_min_deg)
    psi_max = math.acos(R_EARTH / config.orbit_radius * math.cos(sigma)) - sigma
    return math.cos(psi_max)


def grd_assignment(config: ConstellationConfig, grid: GrdGrid, t: float,
                   variant: GrdVariant, sigma_min_deg: float = 0.0) -> np.ndarray:
    """Serving satellite of every frozen cell at time t.

    Returns an int array (n2, n1): flat satellite index (plane-1)*n2 +
    (slot-1), or -1 where no eligible satellite clears the minimum elevation
    (NO_COVER).  Serving = maximum elevation, which for a single shell is the
    minimum central angle between sub-point and anchor.
    """
    n1, n2 = config.num_planes, config.sats_per_plane
    _, _, _, lats, lons = propagate_all(config, t)
    sub = np.stack([np.cos(lats) * np.cos(lons),
                    np.cos(lats) * np.sin(lons),
                    np.sin(lats)], axis=1)          # (N, 3) Earth-fixed units
    cos_limit = _coverage_cos_limit(config, sigma_min_deg)
    anchors = grid.anchors.reshape(-1, 3)           # (n2*n1, 3), row-major (v, h)
    serving = np.full(n2 * n1, -1, dtype=int)
    if variant is GrdVariant.INTER_PLANE:
        score = anchors @ sub.T                     # (cells, sats)
        best = np.argmax(score, axis=1)
        top = score[np.arange(len(best)), best]
        # exact geometric ties (satellites meeting over a pole) resolve to the
        # cell's own column, keeping the frozen-epoch assignment unambiguous
        cell_planes = np.tile(np.arange(n1), n2)
        for cell in np.flatnonzero(np.isclose(top, 1.0, atol=1e-12)):
            h = cell_planes[cell]
            own = slice(h * n2, (h + 1) * n2)
            local_best = int(np.argmax(score[cell, own]))
            if score[cell, own][local_best] >= top[cell] - 1e-12:
                best[cell] = h * n2 + local_best
        ok = top >= cos_limit
        serving[ok] = best[ok]
    else:
        cell_planes = np.tile(np.arange(n1), n2)    # column h of each flat cell
        for h in range(n1):
            sel = np.where(cell_planes == h)[0]
            sat_idx = np.arange(h * n2, (h + 1) * n2)
            score = anchors[sel] @ sub[sat_idx].T
            best = np.argmax(score, axis=1)
            ok = score[np.arange(len(best)), best] >= cos_limit
            serving[sel[ok]] = sat_idx[best[ok]]
    return serving.reshape(n2, n1)


def grd_map(state: SatelliteState, config: ConstellationConfig, grid: GrdGrid,
            variant: GrdVariant, sigma_min_deg: float = 0.0):
    """Address served by one satellite under the GRD mapping, or NO_COVER.

    When a satellite is the best server of several cells the lowest (row,
    plane) address is returned; satellites serving no cell map to NO_COVER.
    """
    serving = grd_assignment(config, grid, state.t, variant, sigma_min_deg)
    flat = (state.sat.plane - 1) * config.sats_per_plane + (state.sat.slot - 1)
    hits = np.argwhere(serving == flat)
    if hits.size == 0:
        return NO_COVER
    v, h = min((int(r), int(c)) for r, c in hits)
    return VirtualAddress(row=v + 1, plane=h + 1)
