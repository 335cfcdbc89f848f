"""Empirical test functions on the torus and their closed-form variances.

The bivariate K estimator counts closed pairs (``u <= d``) between the two
sub-patterns. Empty-space functions are estimated from ``m`` uniform sample
points: ``G(d)`` is the fraction of sample points whose nearest event lies
farther than ``d``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import DistanceGrid, RectWindow, as_rng, uniform_points
from .pointprocess import MarkedSplit, PointPattern

__all__ = [
    "FunctionEstimate",
    "SplitCounts",
    "GridTruncationError",
    "default_sample_size",
    "k12_hat",
    "k_hat",
    "csr_k12",
    "nearest_event_distance",
    "g_hat",
    "t_stat",
    "t_values",
    "var_k12_csr",
    "var_t_delta",
    "var_logg_diff",
]


class GridTruncationError(ValueError):
    """An empty-space estimate hit zero somewhere on the requested grid.

    ``usable`` holds the largest prefix of the grid on which all estimates
    stay positive (``None`` if not even the first distance is usable).
    """

    def __init__(self, message, usable: DistanceGrid | None):
        super().__init__(message)
        self.usable = usable


@dataclass(frozen=True)
class FunctionEstimate:
    grid: DistanceGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.grid),):
            raise ValueError("values must match the grid length")
        object.__setattr__(self, "values", v)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class SplitCounts:
    n1: int
    n2: int
    area: float

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1 or not self.area > 0:
            raise ValueError("SplitCounts needs n1 >= 1, n2 >= 1 and area > 0")


def _grid(grid, window: RectWindow) -> DistanceGrid:
    if isinstance(grid, DistanceGrid):
        if grid.distances[-1] > window.max_distance * (1 + 1e-12):
            raise ValueError("grid exceeds half the shorter window side")
        return grid
    return DistanceGrid(grid, window)


def default_sample_size(n_events: int) -> int:
    return max(1000, int(n_events))


def _tree(events: np.ndarray, window: RectWindow) -> cKDTree:
    return cKDTree(events, boxsize=window.sides)


def _cross_pair_counts(a: np.ndarray, b: np.ndarray, window: RectWindow, d: np.ndarray) -> np.ndarray:
    counts = _tree(a, window).count_neighbors(_tree(b, window), d)
    return np.asarray(counts, dtype=float)


def k12_hat(split: MarkedSplit, grid) -> FunctionEstimate:
    """Bivariate K estimator ``|A| / (n1 n2) * #{(i, j): u_ij <= d}`` on the torus."""
    split.require_nondegenerate()
    w = split.window
    grid = _grid(grid, w)
    counts = _cross_pair_counts(split.pattern1.events, split.pattern2.events, w, grid.distances)
    return FunctionEstimate(grid, counts * (w.area / (split.n1 * split.n2)))


def k_hat(pattern: PointPattern, grid) -> FunctionEstimate:
    """Univariate toroidal K estimator ``|A| / (n (n-1)) * #{ordered pairs i != j: u_ij <= d}``."""
    if pattern.n < 2:
        raise ValueError("K needs at least two events")
    w = pattern.window
    grid = _grid(grid, w)
    t = _tree(pattern.events, w)
    # count_neighbors on itself includes the n zero-distance self pairs
    counts = np.asarray(t.count_neighbors(t, grid.distances), dtype=float) - pattern.n
    return FunctionEstimate(grid, counts * w.area / (pattern.n * (pattern.n - 1)))


def csr_k12(d):
    """Value of the bivariate K function for independent patterns: ``pi d**2``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("d must be >= 0")
    out = np.pi * d**2
    return float(out) if out.ndim == 0 else out


def nearest_event_distance(events: np.ndarray, samples: np.ndarray, window: RectWindow) -> np.ndarray:
    """Torus distance from every sample point to its nearest event (inf if no events)."""
    if len(events) == 0:
        return np.full(len(samples), np.inf)
    dist, _ = _tree(events, window).query(samples, k=1)
    return dist


def _empty_fraction(nearest: np.ndarray, d: np.ndarray) -> np.ndarray:
    # a closed disc of radius d is empty iff the nearest event is farther than d
    srt = np.sort(nearest)
    return 1.0 - np.searchsorted(srt, d, side="right") / srt.size


def g_hat(pattern: PointPattern, m: int, grid, seed=None, samples=None) -> FunctionEstimate:
    """Empty-space (avoidance) function estimated from ``m`` uniform sample points.

    Pass ``samples`` to reuse a fixed set of sample points instead of drawing
    ``m`` new ones.
    """
    w = pattern.window
    grid = _grid(grid, w)
    if samples is None:
        if m < 1:
            raise ValueError("m must be >= 1")
        samples = uniform_points(m, w, as_rng(seed))
    nearest = nearest_event_distance(pattern.events, samples, w)
    return FunctionEstimate(grid, _empty_fraction(nearest, grid.distances))


def t_values(split: MarkedSplit, samples: np.ndarray, grid: DistanceGrid, near1=None) -> np.ndarray:
    """``log G - log G1 - log G2`` on shared sample points, without zero checks.

    Distances where an estimate is zero come out as ``-inf`` or ``nan``.
    ``near1`` may carry precomputed type-1 nearest-event distances.
    """
    w = split.window
    if near1 is None:
        near1 = nearest_event_distance(split.pattern1.events, samples, w)
    near2 = nearest_event_distance(split.pattern2.events, samples, w)
    d = grid.distances
    g = _empty_fraction(np.minimum(near1, near2), d)
    g1 = _empty_fraction(near1, d)
    g2 = _empty_fraction(near2, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(g) - np.log(g1) - np.log(g2)


def t_stat(split: MarkedSplit, m: int, grid, seed=None, samples=None) -> FunctionEstimate:
    """Log-ratio statistic ``T(d) = log G(d) - log G1(d) - log G2(d)``.

    ``G`` is the empty-space function of the pooled pattern; all three are
    estimated from the same ``m`` sample points. Raises
    :class:`GridTruncationError` if an estimate is zero on the grid.
    """
    w = split.window
    grid = _grid(grid, w)
    if samples is None:
        if m < 1:
            raise ValueError("m must be >= 1")
        samples = uniform_points(m, w, as_rng(seed))
    values = t_values(split, samples, grid)
    finite = np.isfinite(values)
    if not finite.all():
        k = int(np.argmin(finite))
        usable = grid.truncated(k) if k > 0 else None
        last = f"{grid.distances[k - 1]:g}" if k > 0 else "none"
        raise GridTruncationError(
            f"empty-space estimate is zero at d={grid.distances[k]:g}; largest usable d is {last}",
            usable,
        )
    return FunctionEstimate(grid, values)


def _torus_disc_fraction(d, area):
    return np.pi * np.asarray(d, dtype=float) ** 2 / area


def var_k12_csr(counts: SplitCounts, d, window: RectWindow | None = None):
    """Conditional variance of the K12 estimator for independent uniform patterns.

    ``|A|**2 q (1 - q) / (n1 n2)`` with ``q = pi d**2 / |A|``, the probability
    that two independent uniform points on the torus are within ``d``.
    """
    d = np.asarray(d, dtype=float)
    if window is not None and np.any(d > window.max_distance * (1 + 1e-12)):
        raise ValueError("d exceeds half the shorter window side")
    q = _torus_disc_fraction(d, counts.area)
    out = counts.area**2 * q * (1 - q) / (counts.n1 * counts.n2)
    return float(out) if out.ndim == 0 else out


def _check_delta_args(n, p):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")


def var_t_delta(n: int, intensity: float, d, p: float = 0.5):
    """Delta-method approximation to ``Var T(d)`` for a Poisson pattern with ``n`` events."""
    _check_delta_args(n, p)
    a = 2.0 * intensity * np.pi * np.asarray(d, dtype=float) ** 2
    out = (np.exp(a) + 1.0 - np.exp(p * a) - np.exp((1.0 - p) * a)) / n
    return float(out) if out.ndim == 0 else out


def var_logg_diff(n: int, intensity: float, d, p: float = 0.5):
    """Delta-method variance of the thinned log empty-space estimates.

    ``(exp(2 p lam pi d**2) + exp(2 (1-p) lam pi d**2) - 2) / n``; at ``p = 0.5``
    this is ``2 (exp(lam pi d**2) - 1) / n``, the minimum over ``p``.
    """
    _check_delta_args(n, p)
    a = 2.0 * intensity * np.pi * np.asarray(d, dtype=float) ** 2
    out = (np.expm1(p * a) + np.expm1((1.0 - p) * a)) / n
    return float(out) if out.ndim == 0 else out
