"""Point pattern containers, simulators and independent random thinning.

All generators work on the torus built from the window, so clusters and
hard-core neighbourhoods wrap across opposite edges exactly like the
estimators expect.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.spatial import cKDTree

from .geometry import RectWindow, as_rng, check_inside, wrap

__all__ = [
    "PointPattern",
    "MarkedSplit",
    "DegenerateSplitError",
    "poisson_count",
    "sample_homogeneous_poisson",
    "sample_thomas_cluster",
    "sample_matern_hardcore",
    "random_thin",
]


class DegenerateSplitError(ValueError):
    """A thinning left one of the two sub-patterns empty."""


@dataclass(frozen=True)
class PointPattern:
    window: RectWindow
    events: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self):
        ev = check_inside(self.events, self.window).copy()
        ev.setflags(write=False)
        object.__setattr__(self, "events", ev)

    @classmethod
    def from_coordinates(cls, coords, window: RectWindow):
        """Build a pattern, wrapping coordinates onto the torus first."""
        return cls(window, wrap(coords, window))

    @property
    def n(self) -> int:
        return self.events.shape[0]

    def __len__(self):
        return self.n

    @property
    def intensity(self) -> float:
        return self.n / self.window.area

    def count_in(self, x0, x1, y0, y1) -> int:
        """Number of events in the box ``[x0, x1) x [y0, y1)``."""
        e = self.events
        return int(np.count_nonzero((e[:, 0] >= x0) & (e[:, 0] < x1) & (e[:, 1] >= y0) & (e[:, 1] < y1)))


@dataclass(frozen=True)
class MarkedSplit:
    pattern1: PointPattern
    pattern2: PointPattern
    p: float = 0.5

    def __post_init__(self):
        if self.pattern1.window != self.pattern2.window:
            raise ValueError("sub-patterns must share one window")

    @property
    def window(self) -> RectWindow:
        return self.pattern1.window

    @property
    def n1(self) -> int:
        return self.pattern1.n

    @property
    def n2(self) -> int:
        return self.pattern2.n

    @property
    def pooled(self) -> PointPattern:
        return PointPattern(self.window, np.vstack([self.pattern1.events, self.pattern2.events]))

    def swapped(self) -> "MarkedSplit":
        return MarkedSplit(self.pattern2, self.pattern1, 1.0 - self.p)

    def require_nondegenerate(self):
        if self.n1 == 0 or self.n2 == 0:
            raise DegenerateSplitError(
                f"thinning produced an empty sub-pattern (n1={self.n1}, n2={self.n2}); "
                "re-run with a different seed"
            )


def poisson_count(mean, rng) -> np.ndarray | int:
    """Poisson variate(s) drawn by inverting the exact Poisson cdf."""
    mean = np.asarray(mean, dtype=float)
    if np.any(mean < 0):
        raise ValueError("Poisson mean must be >= 0")
    u = rng.random(mean.shape)
    k = stats.poisson.ppf(u, mean)
    k = np.where(mean == 0, 0, k).astype(np.int64)
    return int(k) if k.ndim == 0 else k


def sample_homogeneous_poisson(intensity: float, window: RectWindow, seed=None) -> PointPattern:
    """Homogeneous Poisson pattern with ``intensity`` events per unit area."""
    if not intensity >= 0:
        raise ValueError(f"intensity must be >= 0, got {intensity}")
    rng = as_rng(seed)
    n = poisson_count(intensity * window.area, rng)
    return PointPattern(window, wrap(rng.random((n, 2)) * window.sides, window))


def sample_thomas_cluster(
    parent_intensity: float,
    mean_offspring: float,
    sd: float,
    window: RectWindow,
    seed=None,
) -> PointPattern:
    """Thomas cluster process on the torus.

    Parents form a Poisson pattern; each has a Poisson(``mean_offspring``)
    number of children displaced by isotropic Gaussian offsets with standard
    deviation ``sd``. Only children are returned.
    """
    if min(parent_intensity, mean_offspring, sd) < 0:
        raise ValueError("Thomas parameters must be >= 0")
    rng = as_rng(seed)
    parents = sample_homogeneous_poisson(parent_intensity, window, rng).events
    counts = poisson_count(np.full(len(parents), float(mean_offspring)), rng)
    centres = np.repeat(parents, counts, axis=0)
    offsets = rng.normal(scale=sd, size=centres.shape) if sd > 0 else np.zeros_like(centres)
    return PointPattern(window, wrap(centres + offsets, window))


def sample_matern_hardcore(intensity: float, hardcore_radius: float, window: RectWindow, seed=None) -> PointPattern:
    """Matern type-II hard-core pattern on the torus.

    Proposals are a Poisson pattern of the given intensity, each with a
    uniform age mark. A proposal survives when no other proposal within
    ``hardcore_radius`` is older (has a smaller mark). With radius 0 the
    result equals the Poisson proposal drawn from the same seed.
    """
    if intensity < 0 or hardcore_radius < 0:
        raise ValueError("intensity and hardcore_radius must be >= 0")
    if hardcore_radius >= window.max_distance:
        raise ValueError("hardcore_radius must be below half the shorter window side")
    rng = as_rng(seed)
    proposals = sample_homogeneous_poisson(intensity, window, rng).events
    if hardcore_radius == 0 or len(proposals) < 2:
        return PointPattern(window, proposals)
    marks = rng.random(len(proposals))
    tree = cKDTree(proposals, boxsize=window.sides)
    pairs = tree.query_pairs(hardcore_radius, output_type="ndarray")
    keep = np.ones(len(proposals), dtype=bool)
    if len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        # the younger point of every close pair is deleted
        keep[np.where(marks[i] > marks[j], i, j)] = False
    return PointPattern(window, proposals[keep])


def random_thin(parent: PointPattern, p: float, seed=None) -> MarkedSplit:
    """Label each event type 1 with probability ``p``, otherwise type 2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"thinning probability must lie in [0, 1], got {p}")
    rng = as_rng(seed)
    label = rng.random(parent.n) < p
    return MarkedSplit(
        PointPattern(parent.window, parent.events[label]),
        PointPattern(parent.window, parent.events[~label]),
        float(p),
    )
