"""Charged liquid drops in the half-plane: capillarity plus logarithmic energy."""

from ._backend import BACKEND
from .capillarity import (
    EnergyBreakdown,
    SessileConfig,
    build_bbeta,
    fraenkel_asymmetry,
    isoperimetric_deficit,
    pbeta,
    quantitative_check,
    slab_family_energy,
    total_energy,
)
from .errors import (
    ChargeDropError,
    ConfigError,
    InvalidShapeError,
    MeshError,
    OracleConvergenceError,
    PreconditionError,
    SolverError,
    StagnationError,
)
from .geometry2d import (
    HalfPlanePolygon,
    area,
    boundary_measures,
    contact_angles_fitted,
    convex_project,
    cut_competitor,
    diameter,
    discrete_curvature,
    hausdorff_distance,
    read_polygon_csv,
    symdiff_area,
    tangent_fill_competitor,
    write_polygon_csv,
)
from .optimizer import (
    SolverConfig,
    analytic_gradient,
    el_residual,
    lambda_min_check,
    minimize,
    q_convergence,
    structure_checks,
    young_sweep,
)
from .potential import (
    assemble_kernel,
    build_mesh,
    corner_exponent,
    gradient_norm_on_boundary,
    log_energy,
    potential_at,
    riesz_energy_oracle,
    solve_equilibrium,
)

__version__ = "0.1.0"
