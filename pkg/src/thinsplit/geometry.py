"""Rectangular windows, the toroidal metric and uniform sampling.

Points are stored as ``(n, 2)`` float arrays. Every window is treated as a
torus: opposite edges are identified, coordinates live in the half-open box
``[0, width) x [0, height)`` and distances are measured with the minimum
image convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RectWindow",
    "DistanceGrid",
    "as_rng",
    "wrap",
    "check_inside",
    "torus_delta",
    "torus_distance",
    "torus_cdist",
    "wrap_translate",
    "uniform_points",
]


def as_rng(seed=None) -> np.random.Generator:
    """Return a generator for ``seed`` (int, SeedSequence, Generator or None)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class RectWindow:
    width: float
    height: float

    def __post_init__(self):
        w, h = float(self.width), float(self.height)
        if not (np.isfinite(w) and np.isfinite(h)) or w <= 0 or h <= 0:
            raise ValueError(f"window sides must be finite and positive, got {w} x {h}")
        object.__setattr__(self, "width", w)
        object.__setattr__(self, "height", h)

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def sides(self) -> np.ndarray:
        return np.array([self.width, self.height])

    @property
    def max_distance(self) -> float:
        """Largest distance usable on a grid: half the shorter side."""
        return 0.5 * min(self.width, self.height)


class DistanceGrid:
    """Strictly increasing positive distances, capped at half the shorter side.

    The cap keeps a disc of radius ``d`` from overlapping itself on the torus,
    so the area of a disc stays exactly ``pi d**2``.
    """

    def __init__(self, distances, window: RectWindow | None = None):
        d = np.atleast_1d(np.asarray(distances, dtype=float))
        if d.ndim != 1 or d.size == 0:
            raise ValueError("distance grid must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(d)) or np.any(d <= 0):
            raise ValueError("grid distances must be finite and > 0")
        if np.any(np.diff(d) <= 0):
            raise ValueError("grid distances must be strictly increasing")
        if window is not None and d[-1] > window.max_distance * (1 + 1e-12):
            raise ValueError(
                f"grid maximum {d[-1]:g} exceeds half the shorter window side "
                f"({window.max_distance:g})"
            )
        d.setflags(write=False)
        self.distances = d

    @classmethod
    def linear(cls, d_min: float, d_max: float, steps: int, window: RectWindow | None = None):
        return cls(np.linspace(d_min, d_max, int(steps)), window)

    @classmethod
    def default(cls, window: RectWindow, steps: int = 25):
        """``steps`` equally spaced distances up to a quarter of the shorter side."""
        d_max = 0.5 * window.max_distance
        return cls(np.linspace(d_max / steps, d_max, steps), window)

    def truncated(self, k: int) -> "DistanceGrid":
        return DistanceGrid(self.distances[:k])

    def __len__(self):
        return self.distances.size

    def __iter__(self):
        return iter(self.distances)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.distances, dtype=dtype)

    def __eq__(self, other):
        return isinstance(other, DistanceGrid) and np.array_equal(self.distances, other.distances)

    def __repr__(self):
        d = self.distances
        return f"DistanceGrid({d[0]:g}..{d[-1]:g}, n={d.size})"


def wrap(points, window: RectWindow) -> np.ndarray:
    """Reduce coordinates modulo the window sides into ``[0, side)``."""
    pts = np.array(points, dtype=float).reshape(-1, 2)
    sides = window.sides
    pts = np.mod(pts, sides)
    # fmod of a tiny negative number rounds up to the side itself
    pts[pts >= sides] = 0.0
    return pts


def check_inside(points, window: RectWindow) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    bad = (pts < 0) | (pts >= window.sides)
    if bad.any():
        i = int(np.flatnonzero(bad.any(axis=1))[0])
        raise ValueError(f"point {tuple(pts[i])} lies outside window {window.width} x {window.height}")
    return pts


def torus_delta(a, b, window: RectWindow) -> np.ndarray:
    """Minimum-image coordinate differences ``b - a`` (broadcasting)."""
    sides = window.sides
    delta = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    return delta - sides * np.round(delta / sides)


def torus_distance(a, b, window: RectWindow):
    """Distance between ``a`` and ``b`` on the torus built from ``window``.

    Both arguments are points (or broadcastable arrays of points) inside the
    window. The result is the shortest Euclidean distance between ``a`` and
    any wrapped copy of ``b``.
    """
    check_inside(a, window)
    check_inside(b, window)
    delta = torus_delta(a, b, window)
    return np.hypot(delta[..., 0], delta[..., 1])


def torus_cdist(a, b, window: RectWindow) -> np.ndarray:
    """Matrix of torus distances between the rows of ``a`` and of ``b``."""
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    delta = torus_delta(a[:, None, :], b[None, :, :], window)
    return np.hypot(delta[..., 0], delta[..., 1])


def wrap_translate(points, shift, window: RectWindow) -> np.ndarray:
    """Translate points by ``shift`` and wrap them back into the window."""
    pts = np.asarray(points, dtype=float)
    out = wrap(pts.reshape(-1, 2) + np.asarray(shift, dtype=float), window)
    return out.reshape(pts.shape)


def uniform_points(n: int, window: RectWindow, seed=None) -> np.ndarray:
    """``n`` i.i.d. uniform points in the window, as an ``(n, 2)`` array."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = as_rng(seed)
    return wrap(rng.random((int(n), 2)) * window.sides, window)
