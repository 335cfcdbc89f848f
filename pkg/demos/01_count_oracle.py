# %% [markdown]
# Counts first. Thin a count Z by independent coin flips with probability p:
# X heads, Y tails. X and Y come out independent exactly when Z is Poisson.
# Everything below is exact arithmetic on probability mass functions.

# %%
import numpy as np

from thinsplit.count_oracle import (
    binomial_pmf,
    geometric_pmf,
    independence_gap,
    mixture_pmf,
    point_mass,
    poisson_pmf,
    recurrence_q,
    thin_pmf,
)

# %%
# Poisson parents factorise to rounding error, whatever p is.
for lam in (0.5, 2, 5):
    r = poisson_pmf(lam)
    gaps = [independence_gap(thin_pmf(r, p)) for p in (0.1, 0.5, 0.9)]
    print(f"Poisson({lam}): support 0..{r.n_max}, tail {r.tail_mass:.1e}, gaps {np.max(gaps):.1e}")

# %%
# Anything else leaves a visible dependence between the two halves.
for name, r in [
    ("Z = 2", point_mass(2)),
    ("Binomial(10, 0.3)", binomial_pmf(10, 0.3)),
    ("Geometric(0.5)", geometric_pmf(0.5)),
    ("Poisson(1)/Poisson(4) mix", mixture_pmf([0.5, 0.5], [poisson_pmf(1), poisson_pmf(4)])),
]:
    print(f"{name:>26}: gap {independence_gap(thin_pmf(r, 0.5)):.4f}")

# %%
# With Z = 2 the joint table is small enough to read off directly.
print(thin_pmf(point_mass(2), 0.5).masses)

# %%
# Going backwards: P(X=0) and P(X=1) pin down the whole law of Y if X and Y
# are independent. For a thinned Poisson(2) we recover Poisson(1).
px = thin_pmf(poisson_pmf(2.0, tol=1e-16), 0.5).x_marginal()
q = recurrence_q(px[0], px[1], 0.5, 10)
print(np.round(q.masses, 6), "mean", q.mean())
