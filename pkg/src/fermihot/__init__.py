"""Massless-fermion state toolbox.

Two-point functionals of the free massless field (vacuum, KMS, mixtures,
and the heat-explosion state via its alternating series), the closed
thermal-function family with macroobservables, and the cross-check suite
tying the routes together.
"""

from .minkowski import FourVector, SL2Element, lorentz_from_sl2, mink_product
from .quad import NonConvergenceError, QuadConfig, gl_bandwidth, shell_grid
from .testfn import (Bump, TestFunction, TransformedFunction, fourier,
                     random_family, testfunction_from_dict,
                     testfunction_to_dict)
from .states import (DEFAULT_QUAD, Ordering, StateSpec, anticommutator,
                     kernel_double_smear, kernel_on_deltas,
                     normal_ordered_kernel, state_from_dict, state_to_dict,
                     two_point, two_point_direct_psi_psibar, weyl_null_check)
from .hotbang import (ConvexProfile, F_z, L_phi, SeriesSchedule,
                      hotbang_smeared, log_convexity_check,
                      normal_ordered_remainder, series_terms,
                      two_point_series, two_point_series_pair)
from .thermal import (MacroObservable, ThermalIndex, bernoulli_table, c_coeff,
                      builtin_macro, macro_expectation, macro_from_dict,
                      macro_to_dict, point_split_expectation,
                      point_split_scale, seminorm, thermal_function,
                      wave_residual)
from .verify import (CheckReport, energy_consistency, entropy_scaling,
                     pde_residuals, reports_to_csv, reports_to_json,
                     run_suite, symmetrization_check, thermal_coincidence,
                     transport_residual, vacuum_limit)

__version__ = "0.1.0"

__all__ = [
    "FourVector", "SL2Element", "lorentz_from_sl2", "mink_product",
    "NonConvergenceError", "QuadConfig", "gl_bandwidth", "shell_grid",
    "Bump", "TestFunction", "TransformedFunction", "fourier",
    "random_family", "testfunction_from_dict", "testfunction_to_dict",
    "DEFAULT_QUAD", "Ordering", "StateSpec", "anticommutator",
    "kernel_double_smear", "kernel_on_deltas", "normal_ordered_kernel",
    "state_from_dict", "state_to_dict", "two_point",
    "two_point_direct_psi_psibar", "weyl_null_check",
    "ConvexProfile", "F_z", "L_phi", "SeriesSchedule", "hotbang_smeared",
    "log_convexity_check", "normal_ordered_remainder", "series_terms",
    "two_point_series", "two_point_series_pair",
    "MacroObservable", "ThermalIndex", "bernoulli_table", "c_coeff",
    "builtin_macro", "macro_expectation", "macro_from_dict", "macro_to_dict",
    "point_split_expectation", "point_split_scale", "seminorm",
    "thermal_function", "wave_residual",
    "CheckReport", "energy_consistency", "entropy_scaling", "pde_residuals",
    "reports_to_csv", "reports_to_json", "run_suite", "symmetrization_check",
    "thermal_coincidence", "transport_residual", "vacuum_limit",
    "__version__",
]
