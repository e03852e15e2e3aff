"""First-hit distributions of planar lattice walks on perturbed flat terrain."""

__version__ = "0.1.0"

from .errors import (
    HitDistError,
    QuadratureError,
    SurfaceFormatError,
    SurfaceShapeError,
    SystemSolveError,
)
from .kernel import (
    HitCoeffTable,
    QuadratureSpec,
    asymptotic_tail,
    descent_multiplier,
    hit_coeff,
    hit_coeff_asymptotic,
    ladder_weight,
    vertical_green,
)
from .surface import PointClass, PointKind, Surface
from .coeffs import (
    coupling_coeff,
    coupling_coeff_quadrature,
    direct_part,
    near_boundary_weight,
    near_boundary_weight_below,
)
from .linsys import (
    BoundarySolution,
    BoundarySystem,
    HitDistribution,
    UnknownIndex,
    UnknownKind,
    assemble_system,
    hit_distribution,
    solve_boundary,
)
from .mcsim import (
    CompareReport,
    WalkConfig,
    WalkTally,
    compare,
    raw_stream,
    run_walks,
)

__all__ = [
    "HitDistError",
    "QuadratureError",
    "SurfaceFormatError",
    "SurfaceShapeError",
    "SystemSolveError",
    "HitCoeffTable",
    "QuadratureSpec",
    "asymptotic_tail",
    "descent_multiplier",
    "hit_coeff",
    "hit_coeff_asymptotic",
    "ladder_weight",
    "vertical_green",
    "PointClass",
    "PointKind",
    "Surface",
    "coupling_coeff",
    "coupling_coeff_quadrature",
    "direct_part",
    "near_boundary_weight",
    "near_boundary_weight_below",
    "BoundarySolution",
    "BoundarySystem",
    "HitDistribution",
    "UnknownIndex",
    "UnknownKind",
    "assemble_system",
    "hit_distribution",
    "solve_boundary",
    "CompareReport",
    "WalkConfig",
    "WalkTally",
    "compare",
    "raw_stream",
    "run_walks",
]
