"""Numerical toolkit for exponential-polynomial curves in projective space.

A curve ``f = [1 : e^{g_1} : ... : e^{g_n}]`` is given by polynomial
exponents ``g_i``.  The package evaluates its Fubini-Study derivative norm,
measures radial growth and the Shimizu-Ahlfors characteristic, studies the
angular level sets of ``Re g``, and recovers the exponents from circle
samples of ``log |e^{g}|``.
"""

__version__ = "0.1.0"

from .asymptotics import (BoundCheck, ExponentEstimate, FloorExponentReport, RadialProfile,
                          characteristic_direct, characteristic_jensen, characteristic_profile,
                          circle_max_density, circle_max_norm, disk_max_profile,
                          floor_exponent_check, growth_exponent, max_norm_profile,
                          order_estimate, polynomial_bound_constant)
from .curve import (ExpPolyCurve, Polynomial, curve_growth_degree, pairwise_difference,
                    poly_derivative, poly_eval)
from .errors import InputError, NumericalError, ToruslabError, UndefinedQuantityError
from .geometry import (DensityBreakdown, component_norm, decomposition_check, fs_density,
                       fs_density_laplacian_oracle, fs_norm, log_partition)
from .level_sets import (LevelSetReport, SplitIntegral, cos_level_measure, first_term_bound,
                         level_set_intervals, level_set_measure, level_set_reports,
                         monic_bound_check, split_integral_profile, tail_integral)
from .recovery import (CircleSamples, RecoveredPolynomial, Theorem1Report, circle_log_samples,
                       detect_degree, recover_polynomial, schwarz_bound_diagnostic,
                       schwarz_coefficient, theorem1_verify)

__all__ = [
    "BoundCheck", "CircleSamples", "DensityBreakdown", "ExpPolyCurve", "ExponentEstimate",
    "FloorExponentReport", "InputError", "LevelSetReport", "NumericalError", "Polynomial",
    "RadialProfile", "RecoveredPolynomial", "SplitIntegral", "Theorem1Report", "ToruslabError",
    "UndefinedQuantityError", "characteristic_direct", "characteristic_jensen",
    "characteristic_profile", "circle_log_samples", "circle_max_density", "circle_max_norm",
    "component_norm", "cos_level_measure", "curve_growth_degree", "decomposition_check",
    "detect_degree", "disk_max_profile", "first_term_bound", "floor_exponent_check",
    "fs_density", "fs_density_laplacian_oracle", "fs_norm", "growth_exponent",
    "level_set_intervals", "level_set_measure", "level_set_reports", "log_partition",
    "max_norm_profile", "monic_bound_check", "order_estimate", "pairwise_difference",
    "poly_derivative", "poly_eval", "polynomial_bound_constant", "recover_polynomial",
    "schwarz_bound_diagnostic", "schwarz_coefficient", "split_integral_profile",
    "tail_integral", "theorem1_verify",
]
