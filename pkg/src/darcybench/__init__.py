"""Benchmark suite for steady Darcy flow in log-normally heterogeneous aquifers.

Conductivity realizations are closed-form sums of random cosine modes, which
makes manufactured-solution verification, grid-refinement convergence
studies, and Monte Carlo validation against first-order perturbation theory
possible with a single reproducible field description.
"""

__version__ = "0.1.0"

from .chebyshev import (
    ChebOperators,
    SpectralSolution,
    cheb_operators,
    chebyshev_coefficients,
    optimal_n_scan,
    optimal_n_sweep,
    solve_csm_1d,
)
from .exceptions import (
    CoefficientError,
    ConfigurationError,
    ConvergenceError,
    ModeFileError,
    SingularMatrixError,
)
from .fdm import assemble_1d, assemble_2d, solve_head_1d, solve_head_2d
from .fem import TriMesh, assemble_fem_1d, assemble_fem_2d, build_tri_mesh, solve_fem_1d, solve_fem_2d
from .grids import GridSpec, HeadField
from .grw import GrwConfig, GrwReport, GrwState, grw_step_1d, grw_step_2d, run_to_steady_1d, run_to_steady_2d
from .linalg import SparseSym, SpdResult, TriDiag, condition_estimate, solve_dense_lu, solve_spd, solve_tridiag
from .manufactured import ManufacturedCase1D, ManufacturedCase2D, case_1d, case_2d, head_1d, head_2d, source_1d, source_2d
from .mc import (
    EnsembleResult,
    McConfig,
    McSummary,
    boundary_profiles,
    ensemble_space_stats,
    first_order_predictions,
    run_ensemble,
    sanity_filter,
)
from .postproc import EocTable, VelocityField, darcy_velocity, eoc_study, l2_error_1d, l2_error_2d, linf_error
from .randfield import (
    Correlation,
    ModeSet,
    RandomFieldModel,
    SmoothnessReport,
    conductivity,
    conductivity_grid,
    conductivity_gradient,
    conductivity_lattice,
    conductivity_with_gradient,
    derivative_profile,
    lipschitz_profile,
    log_fluctuation,
    read_modes,
    sample_modes,
    write_modes,
)
