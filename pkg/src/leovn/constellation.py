"""Walker-star constellation geometry and circular-orbit propagation.

Generates the pi-type polar constellation (ascending nodes spread over 180
deg) and propagates satellites on circular two-body orbits above a spherical
rotating Earth.  This is the ground truth every mapping and topology module
is checked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .angles import wrap_longitude, wrap_radians

MU_EARTH = 3.986004418e14       # m^3/s^2
R_EARTH = 6_371_000.0           # mean radius, m
SIDEREAL_DAY = 86164.0905       # s
OMEGA_EARTH = 2.0 * math.pi / SIDEREAL_DAY


class ConfigError(ValueError):
    """A constellation parameter violates its documented bound."""


class SatelliteId(NamedTuple):
    """Fixed physical identity: plane 1..n1, slot 1..n2 within the plane."""
    plane: int
    slot: int


@dataclass(frozen=True)
class ConstellationConfig:
    """Walker-star constellation parameters.

    ``num_planes`` (n1) planes separated by exactly 180/n1 deg of RAAN,
    ``sats_per_plane`` (n2) satellites per plane separated by exactly
    360/n2 deg of phase, and inter-plane phase offset set by the integer
    ``phasing_factor`` (F).  Angular inputs are degrees; radian values are
    exposed as properties.  ``phase0_deg`` defaults to ``-polar_threshold_deg``
    so that satellite (1,1) starts at the foot of virtual row 1.
    """
    num_planes: int
    sats_per_plane: int
    phasing_factor: int = 0
    altitude_km: float = 780.0
    inclination_deg: float = 90.0
    polar_threshold_deg: float = 70.0
    raan0_deg: float = 0.0
    phase0_deg: float | None = None
    period_s: float | None = None

    def __post_init__(self) -> None:
        if self.num_planes < 2:
            raise ConfigError(f"num_planes must be >= 2, got {self.num_planes}")
        if self.sats_per_plane < 3:
            raise ConfigError(f"sats_per_plane must be >= 3, got {self.sats_per_plane}")
        if not isinstance(self.phasing_factor, int):
            raise ConfigError(f"phasing_factor must be an integer, got {self.phasing_factor!r}")
        if not 0 <= self.phasing_factor <= self.sats_per_plane - 1:
            raise ConfigError(
                f"phasing_factor must satisfy 0 <= F <= n2-1, got {self.phasing_factor}")
        if self.altitude_km <= 0:
            raise ConfigError(f"altitude_km must be > 0, got {self.altitude_km}")
        if not 0 < self.polar_threshold_deg <= 90:
            raise ConfigError(
                f"polar_threshold_deg must be in (0, 90], got {self.polar_threshold_deg}")
        if not 0 < self.inclination_deg <= 180:
            raise ConfigError(
                f"inclination_deg must be in (0, 180], got {self.inclination_deg}")
        if self.phase0_deg is None:
            object.__setattr__(self, "phase0_deg", -self.polar_threshold_deg)

    # -- sizes ------------------------------------------------------------
    @property
    def total_sats(self) -> int:
        return self.num_planes * self.sats_per_plane

    # -- exact angular steps (degrees, rational) ---------------------------
    @property
    def raan_step_deg(self) -> Fraction:
        """Angle between adjacent planes: exactly 180/n1 deg (pi-type)."""
        return Fraction(180, self.num_planes)

    @property
    def phase_step_deg(self) -> Fraction:
        """In-plane spacing: exactly 360/n2 deg."""
        return Fraction(360, self.sats_per_plane)

    @property
    def phase_offset_deg(self) -> Fraction:
        """Adjacent-plane phase offset: exactly 360*F/(n1*n2) deg."""
        return Fraction(360 * self.phasing_factor, self.total_sats)

    # -- float radians for geometry ----------------------------------------
    @property
    def raan_step(self) -> float:
        return math.pi / self.num_planes

    @property
    def phase_step(self) -> float:
        return 2.0 * math.pi / self.sats_per_plane

    @property
    def phase_offset(self) -> float:
        return 2.0 * math.pi * self.phasing_factor / self.total_sats

    @property
    def inclination(self) -> float:
        return math.radians(self.inclination_deg)

    @property
    def polar_threshold(self) -> float:
        return math.radians(self.polar_threshold_deg)

    @property
    def altitude_m(self) -> float:
        return self.altitude_km * 1000.0

    @property
    def orbit_radius(self) -> float:
        return R_EARTH + self.altitude_m

    @property
    def period(self) -> float:
        """Orbital period in seconds (Kepler unless overridden)."""
        if self.period_s is not None:
            return self.period_s
        return orbital_period(self.altitude_m)

    # -- initial angles ----------------------------------------------------
    def raan_deg(self, plane: int) -> Fraction:
        return Fraction(self.raan0_deg) + (plane - 1) * self.raan_step_deg

    def initial_phase_deg(self, sat: SatelliteId) -> Fraction:
        """Epoch phase of a satellite, exact degrees (not wrapped)."""
        return (Fraction(self.phase0_deg)
                + (sat.slot - 1) * self.phase_step_deg
                + (sat.plane - 1) * self.phase_offset_deg)

    def satellites(self) -> list[SatelliteId]:
        return [SatelliteId(h, j)
                for h in range(1, self.num_planes + 1)
                for j in range(1, self.sats_per_plane + 1)]


@dataclass(frozen=True, eq=False)
class SatelliteState:
    """Instantaneous state: phase, inertial position, geodetic sub-point."""
    sat: SatelliteId
    t: float
    phase: float                  # argument of latitude, rad in [0, 2pi)
    position: np.ndarray = field(repr=False)   # m, inertial
    lat: float                    # rad, [-pi/2, pi/2]
    lon: float                    # rad, [-pi, pi), rotating-Earth sub-point


def orbital_period(altitude_m: float) -> float:
    """Circular-orbit period from Kepler's third law, spherical Earth."""
    if altitude_m <= 0:
        raise ConfigError(f"altitude must be > 0, got {altitude_m}")
    a = R_EARTH + altitude_m
    return 2.0 * math.pi * math.sqrt(a ** 3 / MU_EARTH)


def build_constellation(config: ConstellationConfig) -> list[tuple[SatelliteId, float, float]]:
    """Return (id, RAAN, initial phase) in radians for all n1*n2 satellites.

    Plane h sits at RAAN raan0 + (h-1)*pi/n1; satellite (h, j) starts at
    phase0 + (j-1)*2pi/n2 + (h-1)*2pi*F/(n1*n2).
    """
    out = []
    for sat in config.satellites():
        raan = math.radians(float(config.raan_deg(sat.plane)))
        phase = math.radians(float(config.initial_phase_deg(sat)))
        out.append((sat, raan, phase))
    return out


def _position(radius: float, raan: float, inclination: float, u: float) -> np.ndarray:
    cu, su = math.cos(u), math.sin(u)
    co, so = math.cos(raan), math.sin(raan)
    ci, si = math.cos(inclination), math.sin(inclination)
    return radius * np.array([
        cu * co - su * ci * so,
        cu * so + su * ci * co,
        su * si,
    ])


def propagate(config: ConstellationConfig, sat: SatelliteId, t: float) -> SatelliteState:
    """State of one satellite at time t >= 0 (pure function)."""
    u0 = math.radians(float(config.initial_phase_deg(sat)))
    u = wrap_radians(u0 + 2.0 * math.pi * t / config.period)
    raan = math.radians(float(config.raan_deg(sat.plane)))
    inc = config.inclination
    pos = _position(config.orbit_radius, raan, inc, u)
    lat = math.asin(max(-1.0, min(1.0, math.sin(inc) * math.sin(u))))
    lon_inertial = math.atan2(pos[1], pos[0])
    lon = wrap_longitude(lon_inertial - OMEGA_EARTH * t)
    return SatelliteState(sat=sat, t=t, phase=u, position=pos, lat=lat, lon=lon)


def propagate_all(config: ConstellationConfig, t: float):
    """Vectorized states for the full constellation at time t.

    Returns (sats, phases, positions, lats, ground_lons) with arrays indexed
    in ``config.satellites()`` order.  Positions are inertial meters.
    """
    n1, n2 = config.num_planes, config.sats_per_plane
    planes = np.repeat(np.arange(n1), n2)
    slots = np.tile(np.arange(n2), n1)
    u0 = (math.radians(config.phase0_deg)
          + slots * config.phase_step
          + planes * config.phase_offset)
    u = np.mod(u0 + 2.0 * math.pi * t / config.period, 2.0 * math.pi)
    raan = math.radians(config.raan0_deg) + planes * config.raan_step
    inc = config.inclination
    cu, su = np.cos(u), np.sin(u)
    co, so = np.cos(raan), np.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    pos = config.orbit_radius * np.stack([
        cu * co - su * ci * so,
        cu * so + su * ci * co,
        su * si,
    ], axis=1)
    lats = np.arcsin(np.clip(si * su, -1.0, 1.0))
    lons = np.mod(np.arctan2(pos[:, 1], pos[:, 0]) - OMEGA_EARTH * t + math.pi,
                  2.0 * math.pi) - math.pi
    return config.satellites(), u, pos, lats, lons


def in_polar_region(lat: float, polar_threshold: float) -> bool:
    """True iff the sub-point latitude is strictly inside a polar cap."""
    return abs(lat) > polar_threshold


def elevation_angle(state: SatelliteState, ground_lat: float, ground_lon: float) -> float:
    """Elevation of a satellite above the local horizon of a ground point.

    Ground coordinates are geodetic radians on the rotating Earth; negative
    result means the satellite is below the horizon.
    """
    lon_inertial = ground_lon + OMEGA_EARTH * state.t
    g = R_EARTH * np.array([
        math.cos(ground_lat) * math.cos(lon_inertial),
        math.cos(ground_lat) * math.sin(lon_inertial),
        math.sin(ground_lat),
    ])
    d = state.position - g
    return math.asin(float(np.dot(d, g)) / (np.linalg.norm(d) * R_EARTH))


# -- configuration file ingestion ------------------------------------------

_CONFIG_KEYS = {
    "n1": ("num_planes", int),
    "n2": ("sats_per_plane", int),
    "F": ("phasing_factor", int),
    "altitude_km": ("altitude_km", float),
    "inclination_deg": ("inclination_deg", float),
    "polar_threshold_deg": ("polar_threshold_deg", float),
    "raan0_deg": ("raan0_deg", float),
    "phase0_deg": ("phase0_deg", float),
    "period_s": ("period_s", float),
}


def load_config(path: str | Path) -> ConstellationConfig:
    """Read a key/value config file (``key = value``, ``#`` comments).

    Recognized keys: n1, n2, F, altitude_km, inclination_deg,
    polar_threshold_deg, raan0_deg, phase0_deg, period_s.  Unknown keys and
    malformed values raise ConfigError naming the offending key.
    """
    kwargs = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        field_name, cast = _CONFIG_KEYS[key]
        try:
            kwargs[field_name] = cast(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    for required in ("num_planes", "sats_per_plane"):
        if required not in kwargs:
            raise ConfigError(f"{path}: missing required key for {required}")
    return ConstellationConfig(**kwargs)
