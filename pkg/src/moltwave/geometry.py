"""Planar domains described by their intersections with mesh lines.

A geometry answers one question: which intervals of the line ``y = const``
(or ``x = const``) lie in the closed domain, and which boundary condition
holds at each interval end.  Lines that run along a boundary segment are
returned only when that segment is not Dirichlet, since their nodes then
carry unknowns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

__all__ = [
    "Interval",
    "Geometry",
    "Rectangle",
    "Circle",
    "DoubleCircle",
    "QuarterCircle",
    "SlitStrip",
    "make_geometry",
]

# (lo, hi, kind at lo, kind at hi)
Interval = Tuple[float, float, str, str]

_ON_LINE = 1e-12


def _chord(r: float, offset: float):
    """Half-length of the chord at distance ``offset`` from a circle's centre."""
    s = r * r - offset * offset
    return math.sqrt(s) if s > 0 else None


def _merge(intervals: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    out: List[List[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


class Geometry:
    """Base class; subclasses implement :meth:`intervals`."""

    kind = "abstract"

    def intervals(self, axis: str, coord: float) -> List[Interval]:
        """Intervals of the line ``y = coord`` (axis ``"x"``) or ``x = coord`` (axis ``"y"``)."""
        raise NotImplementedError

    def inside(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> Tuple[float, float, float, float]:
        raise NotImplementedError


@dataclass(frozen=True)
class Rectangle(Geometry):
    """``[x0, x1] x [y0, y1]`` with one boundary kind per side."""

    x0: float = -0.5
    x1: float = 0.5
    y0: float = -0.5
    y1: float = 0.5
    left: str = "dirichlet"
    right: str = "dirichlet"
    bottom: str = "dirichlet"
    top: str = "dirichlet"
    kind = "rectangle"

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("rectangle needs x1 > x0 and y1 > y0")
        if (self.left == "periodic") != (self.right == "periodic"):
            raise ValueError("periodic sides must come in pairs")
        if (self.bottom == "periodic") != (self.top == "periodic"):
            raise ValueError("periodic sides must come in pairs")

    def intervals(self, axis, coord):
        if axis == "x":
            lo, hi, c0, c1, k_lo, k_hi, side_lo, side_hi = (
                self.x0, self.x1, self.y0, self.y1, self.left, self.right, self.bottom, self.top)
        else:
            lo, hi, c0, c1, k_lo, k_hi, side_lo, side_hi = (
                self.y0, self.y1, self.x0, self.x1, self.bottom, self.top, self.left, self.right)
        scale = max(1.0, abs(c0), abs(c1))
        if abs(coord - c0) <= _ON_LINE * scale:
            return [] if side_lo == "dirichlet" else [(lo, hi, k_lo, k_hi)]
        if abs(coord - c1) <= _ON_LINE * scale:
            return [] if side_hi == "dirichlet" else [(lo, hi, k_lo, k_hi)]
        if c0 < coord < c1:
            return [(lo, hi, k_lo, k_hi)]
        return []

    def inside(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        return (x > self.x0) & (x < self.x1) & (y > self.y0) & (y < self.y1)

    def bounding_box(self):
        return self.x0, self.x1, self.y0, self.y1


@dataclass(frozen=True)
class Circle(Geometry):
    """Disc of radius ``R`` centred at the origin with Dirichlet boundary."""

    R: float = 1.0
    kind = "circle"

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("radius must be positive")

    def intervals(self, axis, coord):
        s = _chord(self.R, coord)
        return [] if s is None else [(-s, s, "dirichlet", "dirichlet")]

    def inside(self, x, y):
        return np.hypot(x, y) < self.R

    def bounding_box(self):
        return -self.R, self.R, -self.R, self.R


@dataclass(frozen=True)
class DoubleCircle(Geometry):
    """Union of two discs of radius ``R`` centred at ``(-gamma, 0)`` and ``(gamma, 0)``."""

    R: float = 0.3
    gamma: float = 0.2
    kind = "double_circle"

    def __post_init__(self):
        if not 0 <= self.gamma < self.R:
            raise ValueError("double circle needs 0 <= gamma < R")

    def intervals(self, axis, coord):
        pieces = []
        if axis == "x":
            s = _chord(self.R, coord)
            if s is not None:
                pieces = [(-self.gamma - s, -self.gamma + s), (self.gamma - s, self.gamma + s)]
        else:
            for cx in (-self.gamma, self.gamma):
                s = _chord(self.R, coord - cx)
                if s is not None:
                    pieces.append((-s, s))
        return [(lo, hi, "dirichlet", "dirichlet") for lo, hi in _merge(pieces)]

    def inside(self, x, y):
        return (np.hypot(x + self.gamma, y) < self.R) | (np.hypot(x - self.gamma, y) < self.R)

    def bounding_box(self):
        return -self.gamma - self.R, self.gamma + self.R, -self.R, self.R

    @property
    def waist(self) -> float:
        """Half-height of the neck where the two circles cross."""
        return math.sqrt(self.R**2 - self.gamma**2)


@dataclass(frozen=True)
class QuarterCircle(Geometry):
    """The part of the disc of radius ``R`` with ``x <= 0`` and ``y >= 0``.

    The arc is Dirichlet and both axes carry homogeneous Neumann conditions.
    """

    R: float = 1.0
    kind = "quarter_circle"

    def intervals(self, axis, coord):
        if axis == "x":
            if coord < -_ON_LINE or coord >= self.R:
                return []
            s = _chord(self.R, coord)
            return [] if s is None else [(-s, 0.0, "dirichlet", "neumann")]
        if coord > _ON_LINE or coord <= -self.R:
            return []
        s = _chord(self.R, coord)
        return [] if s is None else [(0.0, s, "neumann", "dirichlet")]

    def inside(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        return (np.hypot(x, y) < self.R) & (x < 0) & (y > 0)

    def bounding_box(self):
        return -self.R, 0.0, 0.0, self.R


@dataclass(frozen=True)
class SlitStrip(Geometry):
    """One period ``[-d/2, d/2] x [-Ly/2, Ly/2]`` of a slit grating.

    A screen of zero thickness along ``y = screen_y`` blocks everything but
    the aperture ``|x| < a/2``.  The sides are periodic, the top and bottom
    carry outflow conditions and the screen is Dirichlet.
    """

    a: float = 0.1
    d: float = 1.0
    Ly: float = 1.0
    screen_y: float = 0.0
    kind = "slit_strip"

    def __post_init__(self):
        if not 0 < self.a < self.d:
            raise ValueError("aperture must satisfy 0 < a < d")
        if not abs(self.screen_y) < self.Ly / 2:
            raise ValueError("screen must lie inside the strip")

    def intervals(self, axis, coord):
        half_d, half_y = self.d / 2, self.Ly / 2
        if axis == "x":
            if abs(coord - self.screen_y) <= _ON_LINE:
                return [(-self.a / 2, self.a / 2, "dirichlet", "dirichlet")]
            if -half_y - _ON_LINE <= coord <= half_y + _ON_LINE:
                return [(-half_d, half_d, "periodic", "periodic")]
            return []
        if not -half_d - _ON_LINE <= coord <= half_d + _ON_LINE:
            return []
        if abs(coord) < self.a / 2:
            return [(-half_y, half_y, "outflow", "outflow")]
        return [(-half_y, self.screen_y, "outflow", "dirichlet"),
                (self.screen_y, half_y, "dirichlet", "outflow")]

    def inside(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        box = (np.abs(x) < self.d / 2) & (np.abs(y) < self.Ly / 2)
        return box & ((y != self.screen_y) | (np.abs(x) < self.a / 2))

    def bounding_box(self):
        return -self.d / 2, self.d / 2, -self.Ly / 2, self.Ly / 2


_KINDS = {
    "rectangle": Rectangle,
    "circle": Circle,
    "double_circle": DoubleCircle,
    "quarter_circle": QuarterCircle,
    "slit_strip": SlitStrip,
}


def make_geometry(kind: str, **params) -> Geometry:
    """Construct a geometry by name."""
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown geometry {kind!r}; expected one of {sorted(_KINDS)}") from None
    return cls(**params)
