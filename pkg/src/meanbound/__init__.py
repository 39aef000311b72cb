"""High-confidence upper bounds on the mean of a random variable supported on [0, 1].

The main entry points are :func:`compute_bound` (any method by id),
:func:`exact_upper_bound` and :func:`mc_upper_bound`.
"""

__version__ = "0.1.0"

from ._accel import backend
from .baselines import (
    BootstrapConfig,
    anderson_upper,
    bca_upper,
    dkw_envelope,
    hoeffding_upper,
    hoeffding_upper_tightened,
    maurer_pontil_upper,
    percentile_bootstrap_upper,
    student_t_upper,
)
from .core import ConfidenceSpec, induced_mean, order_statistics, spacings
from .lmt import (
    BoundResult,
    ConvergenceError,
    McConfig,
    exact_upper_bound,
    lower_bound,
    mc_upper_bound,
    two_sided_interval,
    upper_bound,
)
from .methods import ALL_METHODS, compute_bound

__all__ = [
    "ALL_METHODS", "BootstrapConfig", "BoundResult", "ConfidenceSpec", "ConvergenceError",
    "McConfig", "anderson_upper", "backend", "bca_upper", "compute_bound", "dkw_envelope",
    "exact_upper_bound", "hoeffding_upper", "hoeffding_upper_tightened", "induced_mean",
    "lower_bound", "maurer_pontil_upper", "mc_upper_bound", "order_statistics",
    "percentile_bootstrap_upper", "spacings", "student_t_upper", "two_sided_interval",
    "upper_bound",
]
