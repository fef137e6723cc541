"""Numerical toolkit for the exceptional-zero gap argument: real characters,
zeta and L evaluation, the correction Euler products, exact coefficient
identities and the contour-shift pipeline."""

from .arith import FactorSieve, SieveRangeError, a_coeff, mobius, omega, pseudo_f, pseudo_f_r
from .characters import (RealPrimitiveCharacter, character, enumerate_fundamental_discriminants,
                         is_fundamental_discriminant, kronecker)
from .euler_products import (ContractError, P_at_one_closed, P_at_one_displayed, P_eval, Q_accelerated, Q_eval,
                             lemma4_scan, lemma6_double_sum, lemma6_orthogonality, P_growth_scan)
from .identities import (lemma3_partial_sum, lemma5_partial_sum, lemma7_local_check, lemma7_series_check,
                         lemma7_sweep, lemma8_quadrature)
from .reports import SCHEMA, LemmaReport, to_json
from .special_functions import (CutoffTooSmall, DomainError, EvalResult, L_chi, PoleError, dirichlet_L,
                                find_real_zeros, lemma1_constant_scan, lemma2_ratios, zeta)
from .theorem_pipeline import (AggregatedSum, BoundReport, ContourDecomposition, ResourceLimitError,
                               WeightedSumSpec, aggregated_sum, bound_report, contour_decomposition, fit_c1,
                               weighted_sum)

__version__ = "0.1.0"
