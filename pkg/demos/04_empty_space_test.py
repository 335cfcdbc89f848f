# %% [markdown]
# The empty-space route: for a Poisson parent, log G = log G1 + log G2, so
# T(d) = log G - log G1 - log G2 hovers around zero.

# %%
import numpy as np

from thinsplit import DistanceGrid, RectWindow, run_t_test, sample_homogeneous_poisson, sample_matern_hardcore, var_logg_diff

window = RectWindow(1.0, 1.0)
grid = DistanceGrid.default(window)

# %%
poisson = sample_homogeneous_poisson(100, window, seed=3)
report = run_t_test(poisson, p=0.5, n_sims=999, grid=grid, seed=13)
print(report.verdict, "global p =", report.global_p)
if report.truncated_at is not None:
    # far out, some sample point set has no empty discs left
    print("grid truncated at d =", report.truncated_at)

# %%
hardcore = sample_matern_hardcore(200, 0.05, window, seed=4)
report = run_t_test(hardcore, p=0.5, n_sims=999, grid=grid, seed=14)
print(report.verdict, "global p =", report.global_p)

# %%
# Why split evenly: the delta-method variance of log G1 - log G2 is
# smallest at p = 0.5.
for p in (0.1, 0.3, 0.5, 0.7, 0.9):
    print(f"p={p}: {var_logg_diff(100, 100, 0.05, p):.5f}")
