"""Toroidal 2-D world arithmetic and circular (angular) statistics.

All angles are degrees in the mathematical convention: 0 deg points along
+x, positive angles turn counterclockwise, headings live in [0, 360).
Positions live in the half-open box [0, width) x [0, height); opposite
edges of the box are identified (the world is a torus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "TorusWorld",
    "UndefinedMeanError",
    "wrap",
    "wrap_scalar",
    "torus_delta",
    "torus_distance",
    "normalize_heading",
    "circular_mean",
    "heading_diff",
    "signed_heading_delta",
    "turn_towards",
    "torus_centroid",
    "heading_unit",
]

# Resultant vectors shorter than this are treated as zero (undefined mean).
ZERO_RESULTANT_EPS = 1e-9


class UndefinedMeanError(ValueError):
    """Raised when a circular mean is requested for a zero-resultant set."""


@dataclass(frozen=True)
class TorusWorld:
    width: float
    height: float

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError("world extents must be positive")


def wrap_scalar(x: float, extent: float) -> float:
    """Reduce one coordinate into [0, extent)."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite coordinate: {x!r}")
    r = x % extent
    # float modulo can land exactly on the extent for tiny negative inputs
    return 0.0 if r >= extent else r


def wrap(p: tuple[float, float], world: TorusWorld) -> tuple[float, float]:
    """Reduce a raw coordinate pair into the world box."""
    return (wrap_scalar(p[0], world.width), wrap_scalar(p[1], world.height))


def _axis_delta(a: float, b: float, extent: float) -> float:
    """Signed minimal-magnitude difference from a to b along one axis."""
    d = (b - a + extent / 2.0) % extent - extent / 2.0
    return d


def torus_delta(
    a: tuple[float, float], b: tuple[float, float], world: TorusWorld
) -> tuple[float, float]:
    """Minimal displacement vector from a to b; wrap(a + result) == b."""
    return (
        _axis_delta(a[0], b[0], world.width),
        _axis_delta(a[1], b[1], world.height),
    )


def torus_distance(
    a: tuple[float, float], b: tuple[float, float], world: TorusWorld
) -> float:
    dx, dy = torus_delta(a, b, world)
    return math.hypot(dx, dy)


def normalize_heading(deg: float) -> float:
    """Reduce an angle to [0, 360)."""
    h = deg % 360.0
    return 0.0 if h >= 360.0 else h


def heading_unit(deg: float) -> tuple[float, float]:
    r = math.radians(deg)
    return (math.cos(r), math.sin(r))


def circular_mean(headings: list[float]) -> float:
    """Heading of the sum of unit vectors of the given headings.

    Raises UndefinedMeanError when the resultant is (numerically) zero,
    e.g. for {0, 180}; callers choose their own fallback.
    """
    if not headings:
        raise ValueError("circular_mean of empty list")
    sx = 0.0
    sy = 0.0
    for h in headings:
        r = math.radians(h)
        sx += math.cos(r)
        sy += math.sin(r)
    if math.hypot(sx, sy) < ZERO_RESULTANT_EPS * len(headings):
        raise UndefinedMeanError("zero resultant, mean undefined")
    return normalize_heading(math.degrees(math.atan2(sy, sx)))


def signed_heading_delta(current: float, target: float) -> float:
    """Signed shortest rotation from current to target, in (-180, 180].

    The antipodal case (exactly 180 apart) resolves to +180, i.e. the
    counterclockwise direction wins ties.
    """
    d = (target - current + 180.0) % 360.0 - 180.0
    if d == -180.0:
        d = 180.0
    return d


def heading_diff(a: float, b: float) -> float:
    """Minimal circular angular difference, in [0, 180]."""
    return abs(signed_heading_delta(a, b))


def turn_towards(current: float, target: float, max_turn: float) -> float:
    """Rotate current toward target by at most max_turn degrees.

    Returns target exactly when it is within reach; otherwise turns
    max_turn in the shorter direction (counterclockwise on a 180 tie).
    """
    if max_turn < 0:
        raise ValueError("max_turn must be non-negative")
    d = signed_heading_delta(current, target)
    if abs(d) <= max_turn:
        return normalize_heading(target)
    return normalize_heading(current + math.copysign(max_turn, d))


def _axis_circular_mean(coords: list[float], extent: float) -> float:
    """Circular mean of one coordinate axis; arithmetic mean on degeneracy."""
    scale = 2.0 * math.pi / extent
    sx = 0.0
    sy = 0.0
    for c in coords:
        a = c * scale
        sx += math.cos(a)
        sy += math.sin(a)
    if math.hypot(sx, sy) < ZERO_RESULTANT_EPS * len(coords):
        return math.fsum(coords) / len(coords)
    return wrap_scalar(math.atan2(sy, sx) / scale, extent)


def torus_centroid(
    positions: list[tuple[float, float]], world: TorusWorld
) -> tuple[float, float]:
    """Center of gravity of points on the torus (per-axis circular mean)."""
    if not positions:
        raise ValueError("torus_centroid of empty list")
    xs = [p[0] for p in positions]
    ys = [p[1] for p in positions]
    return (
        _axis_circular_mean(xs, world.width),
        _axis_circular_mean(ys, world.height),
    )
