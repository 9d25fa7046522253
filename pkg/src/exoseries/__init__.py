"""exoseries: compute, verify and certify exotic series solutions
sum_k alpha_k(x^(i*eta)) x^k of nonlinear Euler-operator ODEs.

The pipeline: parse F -> verify the residual and the leading structure of
dF/dy_i -> shift to the quasi-linear reduced equation -> solve the tail by a
triangular Fuchsian recursion -> certify a lattice lower bound sigma ->
dominate with a nonnegative majorant -> bound the fixed-point map and turn
it into a convergence disc and a sector where the partial sums converge.
"""

from .errors import (BackendMismatchError, ConfigurationError,
                     DegenerateParameterError, EmptySectorError, EngineError,
                     IndeterminateError, LatticeViolationError,
                     NotASolutionError, OdeSyntaxError, OutsideDomainError,
                     ReductionError, RootFindingError, SingularSeriesError,
                     TruncationError)
from .exotic import ExoticSeries, JetTuple, make_jet
from .expressions import (OdeExpression, expand_multiseries, parse_ode,
                          partial_series, substitute_jet)
from .fuchsolve import apply_reduced_lhs, rhs_series, solve_coefficients
from .laurent import LaurentSeries
from .majorant import (MajorantEquation, MajorantSolution, build_majorant,
                       check_dominance, certified_radius, compute_sigma,
                       estimate_M_bound, fixed_point_solve, split_lhs)
from .multiseries import MultiSeries
from .reduction import (HypothesisReport, ReducedEquation, check_hypotheses,
                        leading_lcoeffs, reduce_equation, select_m)
from .scalars import ExactComplex, FloatComplex
from .sector import (SectorSpec, convergence_diagnostic, eval_partial_sum,
                     sector_for_band, t_value)

__version__ = "0.1.0"

__all__ = [
    "BackendMismatchError", "ConfigurationError", "DegenerateParameterError",
    "EmptySectorError", "EngineError", "ExactComplex", "ExoticSeries",
    "FloatComplex", "HypothesisReport", "IndeterminateError", "JetTuple",
    "LatticeViolationError", "LaurentSeries", "MajorantEquation",
    "MajorantSolution", "MultiSeries", "NotASolutionError", "OdeExpression",
    "OdeSyntaxError", "OutsideDomainError", "ReducedEquation",
    "ReductionError", "RootFindingError", "SectorSpec", "SingularSeriesError",
    "TruncationError", "apply_reduced_lhs", "build_majorant",
    "certified_radius", "check_dominance", "check_hypotheses",
    "compute_sigma", "convergence_diagnostic", "estimate_M_bound",
    "eval_partial_sum", "expand_multiseries", "fixed_point_solve",
    "leading_lcoeffs", "make_jet", "parse_ode", "partial_series",
    "reduce_equation", "rhs_series", "sector_for_band", "select_m",
    "solve_coefficients", "split_lhs", "substitute_jet", "t_value",
]
