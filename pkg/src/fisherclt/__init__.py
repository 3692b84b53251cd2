"""Fisher information distance to normality along the central limit theorem.

Exact expansion coefficients from cumulants, grid numerics for densities of
normalized sums, the step-density uniform-mixture decomposition, and an
inequality property suite.
"""

from .coefficients import (ExpansionCoefficients, compute_aj, compute_cj,
                           compute_coefficients, leading_coefficient, predict_distance,
                           series_coefficients)
from .cumulants import (CumulantVector, MomentVector, analytic_cumulants,
                        cumulants_to_moments, empirical_cumulants, index_solutions,
                        moments_to_cumulants, positive_compositions)
from .decompose import (StepDensity, UniformMixture, cf_tv_bound_first, cf_tv_bound_second,
                        decompose_step_density, fisher_bound_three_iid,
                        three_uniform_fisher_bound, tv_product_fisher_bound)
from .density import (CharFunctionGrid, CfTailError, GridDensity, GridFunction, cf_for_grid,
                      cf_from_density, convolve, decay_exponent, density_of_normalized_sum,
                      family_cf, from_function, invert_cf, normalized_sum_cf, standardize,
                      uniform_density, weighted_cf_integral)
from .edgeworth import (EdgeworthModel, HermiteGaussFunction, Phi_s_eval, build_Qk, build_qk,
                        build_q_score, build_u_w, phi_s_eval)
from .families import Family, gaussian_mixture, get_family, standardized_gamma, two_point_mixture
from .functionals import (FunctionalReport, entropic_distance, fisher_information,
                          fisher_refinement_study, fisher_via_quantile,
                          fisher_via_second_derivative, matched_gaussian, relative_fisher,
                          score, total_variation_norm, tv_distance)
from .gausspoly import Poly, gaussian_moment, hermite_poly, integrate_against_gaussian
from .harness import (ConvergenceRow, StudyConfig, run_convergence_study, run_inequality_suite,
                      run_smoothness_diagnostics, tail_split)

__version__ = "0.1.0"
