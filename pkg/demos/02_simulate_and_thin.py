# %% [markdown]
# Three kinds of pattern on the unit torus, each split by a fair coin.
# For the Poisson pattern the two halves should look like unrelated
# Poisson patterns; the others keep their structure in both halves.

# %%
import numpy as np

from thinsplit import (
    RectWindow,
    random_thin,
    sample_homogeneous_poisson,
    sample_matern_hardcore,
    sample_thomas_cluster,
)

window = RectWindow(1.0, 1.0)
rng = np.random.default_rng(2024)

patterns = {
    "poisson": sample_homogeneous_poisson(100, window, rng),
    "thomas": sample_thomas_cluster(25, 4, 0.02, window, rng),
    "hardcore": sample_matern_hardcore(200, 0.05, window, rng),
}

# %%
for name, pattern in patterns.items():
    split = random_thin(pattern, 0.5, rng)
    print(f"{name:>8}: n={pattern.n:3d}  n1={split.n1:3d}  n2={split.n2:3d}")

# %%
# Quadrat counts of the two Poisson halves are roughly uncorrelated.
pois = random_thin(patterns["poisson"], 0.5, rng)
edges = np.linspace(0, 1, 5)


def quadrat_counts(p):
    h, _, _ = np.histogram2d(p.events[:, 0], p.events[:, 1], bins=[edges, edges])
    return h.ravel()


c1, c2 = quadrat_counts(pois.pattern1), quadrat_counts(pois.pattern2)
print("quadrat correlation of halves:", round(float(np.corrcoef(c1, c2)[0, 1]), 3))
