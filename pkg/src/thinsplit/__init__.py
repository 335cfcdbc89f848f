"""Testing complete spatial randomness through independence of thinned patterns."""
from .geometry import DistanceGrid, RectWindow, torus_distance, uniform_points, wrap_translate
from .pointprocess import (
    DegenerateSplitError,
    MarkedSplit,
    PointPattern,
    random_thin,
    sample_homogeneous_poisson,
    sample_matern_hardcore,
    sample_thomas_cluster,
)
from .estimators import (
    FunctionEstimate,
    GridTruncationError,
    SplitCounts,
    csr_k12,
    g_hat,
    k12_hat,
    k_hat,
    t_stat,
    var_k12_csr,
    var_logg_diff,
    var_t_delta,
)
from .montecarlo import EnvelopeResult, TestReport, run_k12_test, run_t_test, shift_test, toroidal_shift

__version__ = "0.1.0"
