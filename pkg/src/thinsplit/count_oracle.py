"""Exact thinning of count distributions.

A count ``Z`` is split by independent coin flips into ``X`` (heads, prob.
``p``) and ``Y = Z - X``. The joint law is
``P(X=i, Y=j) = r_{i+j} C(i+j, i) p**i (1-p)**j``; ``X`` and ``Y`` are
independent exactly when ``Z`` is Poisson. Everything here works on
truncated supports and carries the truncated mass along as an explicit
error budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = [
    "CountPMF",
    "JointPMF",
    "poisson_pmf",
    "point_mass",
    "binomial_pmf",
    "geometric_pmf",
    "mixture_pmf",
    "binom_coef",
    "thin_pmf",
    "independence_gap",
    "positivity_check",
    "induction_margins",
    "recurrence_q",
    "compose_r",
]

DEFAULT_TAIL = 1e-12
_EXACT_COMB_BELOW = 60


@dataclass(frozen=True)
class CountPMF:
    masses: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float).ravel()
        if m.size == 0 or np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ValueError("masses must be a non-empty array of finite nonnegative numbers")
        if self.tail_mass < 0:
            raise ValueError("tail_mass must be >= 0")
        if abs(math.fsum(m) + self.tail_mass - 1.0) > 1e-12:
            raise ValueError(f"masses + tail sum to {math.fsum(m) + self.tail_mass!r}, not 1")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @property
    def n_max(self) -> int:
        return self.masses.size - 1

    def __getitem__(self, k):
        return self.masses[k] if 0 <= k <= self.n_max else 0.0

    def mean(self) -> float:
        return math.fsum(np.arange(self.masses.size) * self.masses)

    @classmethod
    def from_masses(cls, masses):
        """Wrap masses on a truncated support, assigning the rest to the tail."""
        m = np.asarray(masses, dtype=float)
        return cls(m, max(0.0, 1.0 - math.fsum(m)))


@dataclass(frozen=True)
class JointPMF:
    """``masses[i, j] = P(X=i, Y=j)``, stored for ``i + j <= n_max``."""

    masses: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or np.any(m < 0):
            raise ValueError("joint masses must be a square nonnegative matrix")
        if abs(math.fsum(m.ravel()) + self.tail_mass - 1.0) > 1e-12:
            raise ValueError("joint masses + tail must sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @property
    def n_max(self) -> int:
        return self.masses.shape[0] - 1

    def x_marginal(self) -> np.ndarray:
        return np.array([math.fsum(row) for row in self.masses])

    def y_marginal(self) -> np.ndarray:
        return np.array([math.fsum(col) for col in self.masses.T])


def _poisson_support(lam: float, tol: float) -> int:
    n = int(stats.poisson.isf(tol, lam)) if lam > 0 else 0
    while stats.poisson.sf(n, lam) >= tol:
        n += 1
    return n


def poisson_pmf(lam: float, n_max: int | None = None, tol: float = DEFAULT_TAIL) -> CountPMF:
    """Poisson(``lam``) masses on ``0..n_max``; ``n_max`` defaults to a tail below ``tol``."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if n_max is None:
        n_max = _poisson_support(lam, tol)
    k = np.arange(n_max + 1)
    masses = stats.poisson.pmf(k, lam)
    tail = float(stats.poisson.sf(n_max, lam)) if lam > 0 else 0.0
    return CountPMF(masses, tail)


def point_mass(k: int) -> CountPMF:
    m = np.zeros(k + 1)
    m[k] = 1.0
    return CountPMF(m, 0.0)


def binomial_pmf(n: int, q: float) -> CountPMF:
    return CountPMF(stats.binom.pmf(np.arange(n + 1), n, q), 0.0)


def geometric_pmf(q: float, n_max: int | None = None, tol: float = DEFAULT_TAIL) -> CountPMF:
    """Geometric law on ``{0, 1, ...}``: ``P(Z=k) = q (1-q)**k``."""
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    if n_max is None:
        n_max = 0 if q == 1 else int(math.ceil(math.log(tol) / math.log1p(-q)))
    k = np.arange(n_max + 1)
    return CountPMF(q * (1 - q) ** k, (1 - q) ** (n_max + 1))


def mixture_pmf(weights, components) -> CountPMF:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-15:
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    n_max = max(c.n_max for c in components)
    masses = np.zeros(n_max + 1)
    for w, c in zip(weights, components):
        masses[: c.n_max + 1] += w * c.masses
    tail = math.fsum(w * c.tail_mass for w, c in zip(weights, components))
    return CountPMF(masses, tail)


def binom_coef(n: int, k: int) -> float:
    """``C(n, k)`` as a float: exact integers for small ``n``, log-gamma above."""
    if k < 0 or k > n:
        return 0.0
    if n < _EXACT_COMB_BELOW:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def _split_weights(n: int, p: float) -> np.ndarray:
    """``C(n, i) p**i (1-p)**(n-i)`` for ``i = 0..n``."""
    i = np.arange(n + 1)
    if n < _EXACT_COMB_BELOW:
        coef = np.array([float(math.comb(n, k)) for k in i])
        return coef * p**i * (1 - p) ** (n - i)
    # log space keeps large n away from overflow
    return stats.binom.pmf(i, n, p)


def thin_pmf(r: CountPMF, p: float) -> JointPMF:
    """Joint law of the two parts of a ``p``-thinned count with law ``r``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    n_max = r.n_max
    joint = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        if r.masses[n] == 0:
            continue
        i = np.arange(n + 1)
        joint[i, n - i] = r.masses[n] * _split_weights(n, p)
    return JointPMF(joint, r.tail_mass)


def independence_gap(joint: JointPMF) -> float:
    """Largest ``|P(X=i, Y=j) - P(X=i) P(Y=j)|`` over the stored support."""
    px = joint.x_marginal()
    qy = joint.y_marginal()
    return float(np.max(np.abs(joint.masses - np.outer(px, qy))))


def positivity_check(r: CountPMF) -> bool:
    """True when every stored mass ``r_0 .. r_{n_max}`` is strictly positive."""
    return bool(np.all(r.masses > 0))


def induction_margins(r: CountPMF, p: float) -> np.ndarray:
    """``r_{n+1} - p_n q_1`` for ``n = 0 .. n_max - 1``, with ``p_n``, ``q_1`` the thinned marginals.

    When the parts are independent every entry is nonnegative, which is the
    step that pushes strict positivity from ``r_n`` to ``r_{n+1}``.
    """
    joint = thin_pmf(r, p)
    px, qy = joint.x_marginal(), joint.y_marginal()
    return r.masses[1:] - px[:-1] * qy[1]


def recurrence_q(p0: float, p1: float, p: float, n_max: int) -> CountPMF:
    """Solve ``q_{y+1} = q_y / (y+1) * ((1-p)/p) * (p1/p0)`` with ``sum q = 1``.

    Terms are generated past ``n_max`` until they are negligible so the
    normalising constant covers the whole of the nonnegative integers; the
    mass beyond ``n_max`` is returned as the tail.
    """
    if not (p0 > 0 and p1 > 0):
        raise ValueError("p0 and p1 must be > 0")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    ratio = (1.0 - p) / p * (p1 / p0)
    terms = [1.0]
    y = 0
    while y < n_max or not (terms[-1] < 1e-20 * math.fsum(terms) and y > ratio):
        terms.append(terms[-1] * ratio / (y + 1))
        y += 1
    total = math.fsum(terms)
    masses = np.array(terms[: n_max + 1]) / total
    tail = math.fsum(terms[n_max + 1 :]) / total
    return CountPMF(masses, tail)


def compose_r(pmarg: CountPMF, qmarg: CountPMF) -> CountPMF:
    """Law of ``X + Y`` for independent ``X ~ pmarg``, ``Y ~ qmarg``.

    Each mass is an exactly rounded sum of products, so the result does not
    depend on argument order.
    """
    a, b = pmarg.masses, qmarg.masses
    n_max = a.size + b.size - 2
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        lo, hi = max(0, n - b.size + 1), min(n, a.size - 1)
        i = np.arange(lo, hi + 1)
        out[n] = math.fsum(a[i] * b[n - i])
    tail = pmarg.tail_mass + qmarg.tail_mass - pmarg.tail_mass * qmarg.tail_mass
    return CountPMF(out, tail)
