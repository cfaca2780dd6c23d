"""Balanced truncation of SISO systems with exact-error certificates."""
from .arrowhead import (ArrowheadRealization, SignDiagnosis, arrowhead_inverse, arrowhead_transfer,
                        canonical_arrowhead_from_tf, check_arrowhead_minimality, detect_arrowhead,
                        diagnose_signs, permuted_realization, to_state_space)
from .balance import (BalancedForm, ReductionCertificate, balance, build_canonical, certify,
                      psi_zero, singular_perturbation, to_canonical, truncate)
from .config import DEFAULT, Tolerances, load_tolerances
from .gramian import (GramianPair, HankelSpectrum, SignSpectrum, cross_gramian, gramians,
                      hankel_spectrum, sign_spectrum, solve_lyapunov, solve_sylvester)
from .gridmodel import GridConfig, build_grid_model, grid_tightness_report
from .hinfnorm import HinfResult, frequency_response, hinf_norm
from .lti import (StabilityReport, StateSpace, check_minimality, check_stability, dc_gain,
                  error_system, leading_subsystem, transfer_eval)

__version__ = "0.1.0"
