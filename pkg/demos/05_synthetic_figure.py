# %% [markdown]
# Clustered, regular and random patterns with both envelopes side by side.
# Writes synthetic_figure.png next to this script. Needs matplotlib.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from thinsplit import (
    DistanceGrid,
    RectWindow,
    run_k12_test,
    run_t_test,
    sample_homogeneous_poisson,
    sample_matern_hardcore,
    sample_thomas_cluster,
)

window = RectWindow(1.0, 1.0)
grid = DistanceGrid.default(window)
cases = {
    "clustered (Thomas)": sample_thomas_cluster(25, 4, 0.02, window, seed=21),
    "regular (Matern II)": sample_matern_hardcore(200, 0.05, window, seed=22),
    "random (Poisson)": sample_homogeneous_poisson(100, window, seed=23),
}

# %%
fig, axes = plt.subplots(3, 3, figsize=(11, 10))
for row, (name, parent) in zip(axes, cases.items()):
    k = run_k12_test(parent, n_sims=199, grid=grid, seed=31)
    t = run_t_test(parent, n_sims=199, grid=grid, seed=31)
    row[0].scatter(*parent.events.T, s=4)
    row[0].set(title=name, aspect="equal", xlim=(0, 1), ylim=(0, 1))
    for ax, rep, ref in ((row[1], k, np.pi * grid.distances**2), (row[2], t, np.zeros(len(grid)))):
        env = rep.envelope
        d = env.grid.distances
        ax.fill_between(d, env.lower - ref[: len(d)], env.upper - ref[: len(d)], color="0.85")
        ax.plot(d, env.observed - ref[: len(d)], "k")
        ax.set_title(f"{rep.statistic_name}: {rep.verdict}, p={rep.global_p:.3f}", fontsize=9)
axes[0, 1].set_ylabel("K12(d) - pi d^2")
axes[0, 2].set_ylabel("T(d)")
fig.tight_layout()
out = Path(__file__).with_name("synthetic_figure.png")
fig.savefig(out, dpi=120)
print("wrote", out)
