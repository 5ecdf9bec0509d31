"""Weighted l1-minimization sparse recovery with arbitrarily many distinct
weights over disjoint support estimates: recovery-constant theory, a
matrix-free primal-dual solver, prior models, and experiment harness.
"""

from .theory import (TheoryParams, BoundConstants, b_constant, k_n, gamma_constant,
                     delta_threshold, rip_condition_holds, bound_constants,
                     error_bound, optimize_weights, proposition_ordering)
from .operators import (MeasurementOperator, DenseOperator, RestrictedDCTOperator,
                        RipEstimate, gaussian_operator, restricted_dct_operator,
                        dct2, idct2, exhaustive_rip, operator_norm)
from .solver import (RecoveryProblem, SolverConfig, SolverReport, solve,
                     weighted_shrink, project_ball)
from .models import (SparseSignal, WeightedPrior, gen_sparse_signal,
                     gen_support_estimates, prob_to_weight, power_law_prior,
                     tree_prior, draw_tree_support, draw_bernoulli_support)
from .metrics import (ConeConstraintContext, TheoremCheck, relative_error, psnr,
                      cone_residual, theorem_bound_check)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
