import numpy as np
import pytest

from thinsplit.estimators import k_hat
from thinsplit.geometry import RectWindow, torus_cdist
from thinsplit.pointprocess import (
    MarkedSplit,
    PointPattern,
    random_thin,
    sample_homogeneous_poisson,
    sample_matern_hardcore,
    sample_thomas_cluster,
)

UNIT = RectWindow(1.0, 1.0)


def rngs(seed, k):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


def test_pattern_rejects_outside_events():
    with pytest.raises(ValueError):
        PointPattern(UNIT, [[0.5, 1.0]])
    p = PointPattern.from_coordinates([[1.0, 0.25]], UNIT)
    np.testing.assert_array_equal(p.events, [[0.0, 0.25]])


def test_poisson_zero_intensity():
    assert sample_homogeneous_poisson(0, UNIT, 1).n == 0
    with pytest.raises(ValueError):
        sample_homogeneous_poisson(-1, UNIT, 1)


def test_poisson_count_moments():
    rng = np.random.default_rng(20)
    counts = np.array([sample_homogeneous_poisson(100, UNIT, rng).n for _ in range(10_000)])
    assert counts.mean() == pytest.approx(100, abs=1)
    assert counts.var(ddof=1) == pytest.approx(100, abs=5)


def test_poisson_disjoint_halves_uncorrelated():
    rng = np.random.default_rng(21)
    left, right = [], []
    for _ in range(10_000):
        p = sample_homogeneous_poisson(100, UNIT, rng)
        left.append(p.count_in(0, 0.5, 0, 1))
        right.append(p.count_in(0.5, 1, 0, 1))
    assert abs(np.corrcoef(left, right)[0, 1]) < 0.03


def test_poisson_deterministic():
    a = sample_homogeneous_poisson(50, UNIT, 5)
    b = sample_homogeneous_poisson(50, UNIT, 5)
    np.testing.assert_array_equal(a.events, b.events)


def test_thomas_no_offspring():
    assert sample_thomas_cluster(25, 0, 0.02, UNIT, 1).n == 0


def test_thomas_mean_count():
    rng = np.random.default_rng(22)
    counts = [sample_thomas_cluster(25, 4, 0.02, UNIT, rng).n for _ in range(10_000)]
    assert np.mean(counts) == pytest.approx(25 * 4, rel=0.02)


def test_thomas_is_clustered():
    hits = 0
    for rng in rngs(23, 100):
        p = sample_thomas_cluster(25, 4, 0.02, UNIT, rng)
        hits += k_hat(p, [0.04]).values[0] > np.pi * 0.04**2
    assert hits >= 95


def test_matern_radius_zero_equals_poisson():
    a = sample_matern_hardcore(200, 0.0, UNIT, 8)
    b = sample_homogeneous_poisson(200, UNIT, 8)
    np.testing.assert_array_equal(a.events, b.events)


def test_matern_respects_hard_core():
    for rng in rngs(24, 20):
        p = sample_matern_hardcore(300, 0.04, UNIT, rng)
        d = torus_cdist(p.events, p.events, UNIT)
        np.fill_diagonal(d, np.inf)
        assert d.min() >= 0.04


def test_matern_retention_fraction():
    lam, r = 200, 0.03
    x = lam * np.pi * r**2
    expected = -np.expm1(-x) / x
    kept = sum(sample_matern_hardcore(lam, r, UNIT, rng).n for rng in rngs(25, 1000))
    assert kept / (1000 * lam) == pytest.approx(expected, rel=0.05)


def test_thin_extremes():
    parent = sample_homogeneous_poisson(50, UNIT, 3)
    s1 = random_thin(parent, 1.0, 4)
    assert s1.n2 == 0
    np.testing.assert_array_equal(s1.pattern1.events, parent.events)
    assert random_thin(parent, 0.0, 4).n1 == 0
    with pytest.raises(ValueError):
        random_thin(parent, 1.5, 4)


def test_thin_union_is_parent():
    parent = sample_homogeneous_poisson(200, UNIT, 30)
    split = random_thin(parent, 0.3, 31)
    assert split.n1 + split.n2 == parent.n
    union = np.vstack([split.pattern1.events, split.pattern2.events])
    key = lambda a: a[np.lexsort(a.T[::-1])]
    np.testing.assert_array_equal(key(union), key(parent.events))
    again = random_thin(parent, 0.3, 31)
    np.testing.assert_array_equal(again.pattern1.events, split.pattern1.events)


def test_thin_binomial_moments():
    parent = PointPattern(UNIT, np.random.default_rng(0).random((1000, 2)))
    rng = np.random.default_rng(26)
    n1 = np.array([random_thin(parent, 0.5, rng).n1 for _ in range(10_000)])
    assert n1.mean() == pytest.approx(500, abs=2)
    assert n1.var(ddof=1) == pytest.approx(250, abs=15)


def test_thinned_poisson_quadrats_are_poisson():
    rng = np.random.default_rng(27)
    counts = np.empty((10_000, 16))
    edges = np.linspace(0, 1, 5)
    for k in range(10_000):
        s = random_thin(sample_homogeneous_poisson(400, UNIT, rng), 0.5, rng)
        h, _, _ = np.histogram2d(s.pattern1.events[:, 0], s.pattern1.events[:, 1], bins=[edges, edges])
        counts[k] = h.ravel()
    index = counts.var(axis=0, ddof=1) / counts.mean(axis=0)
    assert counts.mean() >= 10
    assert np.all((index > 0.8) & (index < 1.2))


def _half_window_correlation(sampler, draws, seed):
    rng = np.random.default_rng(seed)
    x, y = np.empty(draws), np.empty(draws)
    for k in range(draws):
        s = random_thin(sampler(rng), 0.5, rng)
        x[k] = s.pattern1.count_in(0, 0.5, 0, 1)
        y[k] = s.pattern2.count_in(0, 0.5, 0, 1)
    return np.corrcoef(x, y)[0, 1]


def test_count_level_independence_poisson():
    corr = _half_window_correlation(lambda r: sample_homogeneous_poisson(40, UNIT, r), 100_000, 28)
    assert abs(corr) < 0.01


def test_count_level_dependence_thomas():
    corr = _half_window_correlation(lambda r: sample_thomas_cluster(25, 4, 0.02, UNIT, r), 10_000, 29)
    assert corr > 0.1


def test_count_level_dependence_hardcore():
    corr = _half_window_correlation(lambda r: sample_matern_hardcore(200, 0.05, UNIT, r), 10_000, 30)
    assert corr < -0.02


def test_split_requires_common_window():
    with pytest.raises(ValueError):
        MarkedSplit(PointPattern(UNIT), PointPattern(RectWindow(2, 1)))
