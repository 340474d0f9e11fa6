"""lpequiv: when does lp-minimization (0 < p < 1) recover the sparsest
solution of an underdetermined linear system?

The package computes an analytic threshold p* from the system's spectral
data such that for every p below it, the lp-minimizer provably coincides
with the unique l0-minimizer, and ships brute-force solvers plus
null-space diagnostics to verify that guarantee empirically at desk scale.
"""
from .backend import BACKEND
from .equivalence import (
    Diagnostic,
    DownwardClosedProbe,
    EquivalenceReport,
    KernelSparsityDiagnostics,
    NscBudget,
    NscEstimate,
    NspCheck,
    f_bound,
    h_of_x,
    h_star,
    kernel_sparsity_diagnostics,
    nsc_estimate,
    nsc_from_kernel,
    nsp_check,
    nsp_downward_closed_probe,
    p_star,
    s_star,
    t_bound,
)
from .errors import (
    AssumptionViolationError,
    InexactRegimeError,
    InfeasibleProblemError,
    NonUniqueSolutionError,
    NumericalError,
    ParameterError,
    ProblemFormatError,
    RankDeficiencyError,
    SizeGuardError,
    ToolkitError,
)
from .examples import builtin_problem
from .linalg import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    AffineParametrization,
    KernelBasis,
    SensingProblem,
    Tolerances,
    embed_on_support,
    gram_eigenvalues,
    jacobi_eigensystem,
    kernel_basis,
    min_norm_solution,
    quasi_norm,
    restricted_least_squares,
    support,
)
from .solvers import (
    CurvePoint,
    EquivalenceCheck,
    SparseSolution,
    VerificationReport,
    default_p_grid,
    equivalence_verify,
    lp_curve,
    solve_l0,
    solve_lp_exact,
    solve_lp_grid,
)
from .spectral import (
    CrossTermCheck,
    FrameBounds,
    SpectralSummary,
    disjoint_cross_term_check,
    lambda_ratio,
    restricted_frame_bounds,
    spark,
    spectral_summary,
)

__version__ = "0.1.0"

__all__ = [
    "AffineParametrization",
    "AssumptionViolationError",
    "BACKEND",
    "CurvePoint",
    "DEFAULT_SEED",
    "DEFAULT_TOL",
    "Diagnostic",
    "CrossTermCheck",
    "EquivalenceCheck",
    "NspCheck",
    "KernelSparsityDiagnostics",
    "DownwardClosedProbe",
    "EquivalenceReport",
    "FrameBounds",
    "InexactRegimeError",
    "InfeasibleProblemError",
    "KernelBasis",
    "NonUniqueSolutionError",
    "NscBudget",
    "NscEstimate",
    "NumericalError",
    "ParameterError",
    "ProblemFormatError",
    "RankDeficiencyError",
    "SensingProblem",
    "SizeGuardError",
    "SparseSolution",
    "SpectralSummary",
    "Tolerances",
    "ToolkitError",
    "VerificationReport",
    "builtin_problem",
    "default_p_grid",
    "disjoint_cross_term_check",
    "embed_on_support",
    "equivalence_verify",
    "f_bound",
    "gram_eigenvalues",
    "h_of_x",
    "h_star",
    "jacobi_eigensystem",
    "kernel_basis",
    "kernel_sparsity_diagnostics",
    "lambda_ratio",
    "lp_curve",
    "min_norm_solution",
    "nsc_estimate",
    "nsc_from_kernel",
    "nsp_check",
    "nsp_downward_closed_probe",
    "p_star",
    "quasi_norm",
    "restricted_frame_bounds",
    "restricted_least_squares",
    "s_star",
    "solve_l0",
    "solve_lp_exact",
    "solve_lp_grid",
    "spark",
    "spectral_summary",
    "support",
    "t_bound",
    "__version__",
]
