"""Uniform approximation errors of Zygmund sums on classes of convolutions.

The package computes two-sided numerical brackets for the class error of
Zygmund (and Fejer) means, evaluates the matching order expressions and
checks their hypotheses, and drives n-sweeps from a small config format.
"""

from .bounds import (conditions_report, mc_simplified_bound, ratio_relations, tail_sum_l1,
                     tail_sum_pprime, theorem3_bound, theory_bound)
from .class_error import (ClassSpec, ErrorBracket, ExtremalWitness, error_bracket, lower_bound,
                          parseval_upper, residual_profile, upper_bound)
from .errors import (ConfigError, ConstraintViolated, DerivativeZero, DivergentTail,
                     EmptySequence, NumericalFailure, QuadratureNotConverged, SlowConvergence,
                     ZygmundError)
from .filters import SummationFilter, TrigPolynomial, apply_filter, norm_q
from .kernels import KernelSpec, eval_kernel, sup_tail_inequalities
from .psi import (Power, PowerLog, Tabulated, WeightedProduct, alpha_characteristic,
                  classify_membership, gm_plus_constant, parse_family, sequence_report)
from .series import tail_sum

__version__ = "0.1.0"
