"""Monte Carlo finite-volume moment estimation for random linear advection.

Two problem classes: a time-dependent mean-reverting velocity coefficient
(with closed-form moment fields to verify against) and a space-dependent
stationary Gaussian random-field coefficient (verified by self-convergence).
"""

from .driver import (
    MomentAccumulator,
    MomentStats,
    RunConfig,
    SampleFailure,
    accumulate,
    merge,
    run,
    run_sample_space,
    run_sample_time,
    sample_field_for,
    sample_stream,
)
from .field import (
    FieldParams,
    FieldSample,
    field_variance,
    mu_from_zeta,
    sample_field,
    spectral_density,
)
from .grid import GridFunction, GridSpec, State
from .metrics import (
    ConvergenceRow,
    ErrorReport,
    abs_l1_error,
    convergence_table,
    rel_l1_error,
    restrict,
)
from .moments import (
    GaussianKernelParams,
    convolve_gaussian,
    exact_expectation,
    exact_variance_field,
    gaussian_pdf,
    kernel_for,
)
from .ou import (
    OUParams,
    OUPath,
    choose_micro_step,
    exact_mean,
    exact_variance,
    find_time_step,
    integrated_mean,
    integrated_variance,
    path_integral,
    simulate_path,
)
from .profiles import PROFILES, Profile, get_profile
from .solver import (
    CflError,
    SchemeConfig,
    cfl_dt_space,
    limited_slopes,
    second_order_step_space,
    second_order_step_time,
    total_variation,
    upwind_step_space,
    upwind_step_time,
)

__version__ = "0.1.0"

__all__ = [
    "CflError",
    "ConvergenceRow",
    "ErrorReport",
    "FieldParams",
    "FieldSample",
    "GaussianKernelParams",
    "GridFunction",
    "GridSpec",
    "MomentAccumulator",
    "MomentStats",
    "OUParams",
    "OUPath",
    "PROFILES",
    "Profile",
    "RunConfig",
    "SampleFailure",
    "SchemeConfig",
    "State",
    "abs_l1_error",
    "accumulate",
    "cfl_dt_space",
    "choose_micro_step",
    "convergence_table",
    "convolve_gaussian",
    "exact_expectation",
    "exact_mean",
    "exact_variance",
    "exact_variance_field",
    "field_variance",
    "find_time_step",
    "gaussian_pdf",
    "get_profile",
    "integrated_mean",
    "integrated_variance",
    "kernel_for",
    "limited_slopes",
    "merge",
    "mu_from_zeta",
    "path_integral",
    "rel_l1_error",
    "restrict",
    "run",
    "run_sample_space",
    "run_sample_time",
    "sample_field",
    "sample_field_for",
    "sample_stream",
    "second_order_step_space",
    "second_order_step_time",
    "simulate_path",
    "spectral_density",
    "total_variation",
    "upwind_step_space",
    "upwind_step_time",
]
