"""Conditional Monte Carlo tests based on random toroidal shifts.

Type-1 events stay fixed while the whole type-2 pattern is translated by a
uniform random vector on the torus. This keeps both marginal structures
intact and only breaks the dependence between the two patterns, so the
shifted statistics form the null distribution for "independent patterns".
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .estimators import (
    FunctionEstimate,
    default_sample_size,
    k12_hat,
    nearest_event_distance,
    t_values,
)
from .geometry import DistanceGrid, as_rng, uniform_points, wrap_translate
from .pointprocess import MarkedSplit, PointPattern, random_thin

__all__ = [
    "EnvelopeResult",
    "TestReport",
    "toroidal_shift",
    "min_sims",
    "pointwise_envelope",
    "deviation_p_value",
    "shift_test",
    "run_k12_test",
    "run_t_test",
]

DEFAULT_SIMS = 999
DEFAULT_COVERAGE = 0.95


@dataclass(frozen=True)
class EnvelopeResult:
    grid: DistanceGrid
    observed: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    n_sims: int
    coverage: float
    exceedances: np.ndarray = field(init=False)

    def __post_init__(self):
        n = len(self.grid)
        for name in ("observed", "lower", "upper"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} must match the grid length")
            object.__setattr__(self, name, arr)
        if np.any(self.lower > self.upper):
            raise ValueError("lower envelope exceeds upper envelope")
        if not 0 < self.coverage < 1:
            raise ValueError("coverage must lie in (0, 1)")
        object.__setattr__(self, "exceedances", (self.observed < self.lower) | (self.observed > self.upper))

    @property
    def below(self) -> np.ndarray:
        return self.observed < self.lower

    @property
    def above(self) -> np.ndarray:
        return self.observed > self.upper

    @property
    def inside(self) -> bool:
        """True when the observed curve stays within the band at every distance."""
        return not self.exceedances.any()

    @property
    def first_exceedance(self) -> float | None:
        if self.inside:
            return None
        return float(self.grid.distances[np.argmax(self.exceedances)])


@dataclass(frozen=True)
class TestReport:
    statistic_name: str
    envelope: EnvelopeResult
    global_p: float
    seed: int | None
    p_thin: float
    n1: int = 0
    n2: int = 0
    requested_grid: DistanceGrid | None = None
    truncated_at: float | None = None
    simulations: np.ndarray | None = field(default=None, repr=False, compare=False)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0 <= self.global_p <= 1:
            raise ValueError("global_p must lie in [0, 1]")

    @property
    def consistent_with_csr(self) -> bool:
        return self.envelope.inside

    @property
    def verdict(self) -> str:
        return "consistent with CSR" if self.consistent_with_csr else "inconsistent with CSR"


def toroidal_shift(pattern: PointPattern, seed=None, shift=None) -> PointPattern:
    """Translate every event by one common uniform shift and wrap onto the torus."""
    if pattern.n == 0:
        raise ValueError("cannot shift an empty pattern")
    w = pattern.window
    if shift is None:
        shift = as_rng(seed).random(2) * w.sides
    return PointPattern(w, wrap_translate(pattern.events, shift, w))


def min_sims(coverage: float) -> int:
    """Smallest replicate count whose pointwise band can reach ``coverage``."""
    return max(19, int(np.ceil(2.0 / (1.0 - coverage) - 1.0 - 1e-9)))


def pointwise_envelope(sims: np.ndarray, coverage: float):
    """Empirical quantiles of each column, linearly interpolated."""
    tail = (1.0 - coverage) / 2.0
    lo, hi = np.quantile(sims, [tail, 1.0 - tail], axis=0, method="linear")
    return lo, hi


def _riemann_weights(d: np.ndarray) -> np.ndarray:
    return np.diff(np.concatenate([[0.0], d]))


def deviation_p_value(observed: np.ndarray, sims: np.ndarray, grid: DistanceGrid) -> float:
    """Rank p-value of the integrated squared deviation from the mean curve.

    The observed curve is compared with the mean of the simulated curves;
    each simulated curve with the mean of the other ``n_sims`` curves
    (observed included), which keeps all ``n_sims + 1`` deviations
    exchangeable under the null. Ties count against the observed curve.
    """
    curves = np.vstack([observed[None, :], sims])
    k = curves.shape[0]
    loo_mean = (curves.sum(axis=0)[None, :] - curves) / (k - 1)
    w = _riemann_weights(grid.distances)
    dev = ((curves - loo_mean) ** 2) @ w
    rank = 1 + int(np.count_nonzero(dev[1:] >= dev[0]))
    return rank / k


def _finite_prefix(curves: np.ndarray) -> int:
    finite = np.isfinite(curves).all(axis=0)
    return finite.size if finite.all() else int(np.argmin(finite))


def shift_test(
    split: MarkedSplit,
    statistic: Callable[[MarkedSplit], FunctionEstimate | np.ndarray],
    n_sims: int = DEFAULT_SIMS,
    coverage: float = DEFAULT_COVERAGE,
    seed=None,
    grid: DistanceGrid | None = None,
    name: str = "statistic",
) -> TestReport:
    """Envelope test of independence between the two sub-patterns.

    ``statistic`` maps a split to a curve over ``grid``. The type-2 pattern
    is shifted ``n_sims`` times; the pointwise band uses the empirical
    ``(1 - coverage) / 2`` and ``1 - (1 - coverage) / 2`` quantiles of the
    shifted curves. Distances at which any curve is not finite are cut from
    the end of the grid and the cut is recorded in the report.
    """
    split.require_nondegenerate()
    if not 0 < coverage < 1:
        raise ValueError("coverage must lie in (0, 1)")
    if n_sims < min_sims(coverage):
        raise ValueError(f"n_sims={n_sims} too small for coverage {coverage}; need >= {min_sims(coverage)}")
    seed_record = seed if isinstance(seed, (int, np.integer)) else None
    rng = as_rng(seed)
    w = split.window

    def evaluate(s):
        out = statistic(s)
        return out.values if isinstance(out, FunctionEstimate) else np.asarray(out, dtype=float)

    obs_est = statistic(split)
    if grid is None:
        if not isinstance(obs_est, FunctionEstimate):
            raise ValueError("grid is required when the statistic returns bare arrays")
        grid = obs_est.grid
    observed = obs_est.values if isinstance(obs_est, FunctionEstimate) else np.asarray(obs_est, dtype=float)

    shifts = rng.random((n_sims, 2)) * w.sides
    sims = np.empty((n_sims, observed.size))
    for k in range(n_sims):
        shifted = MarkedSplit(split.pattern1, toroidal_shift(split.pattern2, shift=shifts[k]), split.p)
        sims[k] = evaluate(shifted)

    keep = _finite_prefix(np.vstack([observed[None, :], sims]))
    truncated_at = None
    run_grid = grid
    if keep < observed.size:
        if keep == 0:
            raise ValueError(f"{name}: no usable distance on the grid (statistic not finite at d={grid.distances[0]:g})")
        run_grid = grid.truncated(keep)
        truncated_at = float(run_grid.distances[-1])
        observed, sims = observed[:keep], sims[:, :keep]

    lower, upper = pointwise_envelope(sims, coverage)
    envelope = EnvelopeResult(run_grid, observed, lower, upper, int(n_sims), float(coverage))
    return TestReport(
        statistic_name=name,
        envelope=envelope,
        global_p=deviation_p_value(observed, sims, run_grid),
        seed=None if seed_record is None else int(seed_record),
        p_thin=float(split.p),
        n1=split.n1,
        n2=split.n2,
        requested_grid=grid,
        truncated_at=truncated_at,
        simulations=sims,
    )


def _streams(seed, k):
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss, [np.random.default_rng(s) for s in ss.spawn(k)]


def _resolve_seed(seed):
    if seed is None:
        return int(np.random.SeedSequence().entropy % 2**63)
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    raise TypeError("pipeline seeds must be integers so that reports can be replayed")


def run_k12_test(
    parent: PointPattern,
    p: float = 0.5,
    n_sims: int = DEFAULT_SIMS,
    grid=None,
    seed=None,
    coverage: float = DEFAULT_COVERAGE,
) -> TestReport:
    """Thin ``parent`` with probability ``p`` and run the K12 shift test."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"thinning probability must lie in [0, 1], got {p}")
    seed = _resolve_seed(seed)
    grid = DistanceGrid.default(parent.window) if grid is None else _as_grid(grid, parent)
    _, (thin_rng, shift_rng) = _streams(seed, 2)
    split = random_thin(parent, p, thin_rng)
    report = shift_test(split, lambda s: k12_hat(s, grid), n_sims, coverage, shift_rng, grid, "k12")
    return _with_seed(report, seed)


def run_t_test(
    parent: PointPattern,
    p: float = 0.5,
    m: int | None = None,
    n_sims: int = DEFAULT_SIMS,
    grid=None,
    seed=None,
    coverage: float = DEFAULT_COVERAGE,
) -> TestReport:
    """Thin ``parent`` and run the empty-space ``T(d)`` shift test.

    One set of ``m`` sample points is drawn per test and reused for the
    observed split and every shifted replicate; the pooled-pattern estimate
    is recomputed for each shift.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"thinning probability must lie in [0, 1], got {p}")
    seed = _resolve_seed(seed)
    grid = DistanceGrid.default(parent.window) if grid is None else _as_grid(grid, parent)
    m = default_sample_size(parent.n) if m is None else int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    _, (thin_rng, sample_rng, shift_rng) = _streams(seed, 3)
    split = random_thin(parent, p, thin_rng)
    samples = uniform_points(m, parent.window, sample_rng)
    # type 1 never moves, so its distances to the sample points are computed once
    near1 = nearest_event_distance(split.pattern1.events, samples, parent.window)

    def statistic(s):
        return t_values(s, samples, grid, near1 if s.pattern1 is split.pattern1 else None)

    report = shift_test(split, statistic, n_sims, coverage, shift_rng, grid, "t_stat")
    return _with_seed(report, seed)


def _as_grid(grid, parent):
    return grid if isinstance(grid, DistanceGrid) else DistanceGrid(grid, parent.window)


def _with_seed(report: TestReport, seed: int) -> TestReport:
    return replace(report, seed=seed)
