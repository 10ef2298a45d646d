"""Angle arithmetic helpers shared by the division and topology modules.

Geometry runs in float radians.  Cell-boundary bookkeeping runs in exact
rational degrees (``fractions.Fraction``) so that floor/ceil expressions and
interval comparisons are bit-reproducible: converting a threshold like 70 deg
to radians and back through pi does not survive double rounding, and the
division formulas sit exactly on integer boundaries for the configurations of
interest.
"""
from __future__ import annotations

import math
from fractions import Fraction

TWO_PI = 2.0 * math.pi

# Snap tolerance for float phase -> integer cell index.  Satellites that are
# mathematically on a cell boundary land within ~1e-12 of it in double
# precision; anything a real sample places inside a cell is >> 1e-9 away.
CELL_SNAP = 1e-9


def wrap_radians(angle: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    return a + TWO_PI if a < 0.0 else a


def wrap_longitude(angle: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return wrap_radians(angle + math.pi) - math.pi


def normalize_lon_deg(value) -> Fraction:
    """Normalize a longitude in degrees to [-180, 180), exactly."""
    v = Fraction(value)
    return (v + 180) % 360 - 180


def fold_lat_deg(value) -> Fraction:
    """Fold an unfolded phase-as-latitude angle (degrees) into [-90, 90].

    An along-track angle keeps growing past the pole; the physical latitude
    folds back.  0 -> 0, 80 -> 80, 100 -> 80, 180 -> 0, 250 -> -70.
    """
    v = Fraction(value)
    return 90 - abs(180 - (v + 90) % 360)


def snapped_floor(x: float, snap: float = CELL_SNAP) -> int:
    """floor(x), treating values within ``snap`` below an integer as on it.

    Cells are half-open [start, start+width): a point exactly on a boundary
    belongs to the upper cell, so float noise just below the boundary must
    round up, not down.
    """
    return math.floor(x + snap)


def interval_hits_open(start: Fraction, end: Fraction, lo: Fraction, hi: Fraction) -> bool:
    """True when the half-open interval [start, end) meets the open (lo, hi)."""
    if lo >= hi:
        return False
    return start < hi and end > lo


def circular_interval_hits_open(start: Fraction, width: Fraction,
                                spans: list[tuple[Fraction, Fraction]]) -> bool:
    """True when [start, start+width) mod 360 meets any open (lo, hi) span.

    Spans must already be normalized to [0, 360) and non-wrapping.
    """
    s = start % 360
    pieces = [(s, min(s + width, Fraction(360)))]
    if s + width > 360:
        pieces.append((Fraction(0), s + width - 360))
    for a, b in pieces:
        for lo, hi in spans:
            if interval_hits_open(a, b, lo, hi):
                return True
    return False
