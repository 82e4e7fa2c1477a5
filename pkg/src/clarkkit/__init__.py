"""clarkkit: Clark measures, boundary entropy, and angular derivatives.

A numerics library for holomorphic self-maps of the unit disc: exact
rational arithmetic on circle sets, spectral transforms on uniform grids,
Clark-measure densities and arc masses, summability-based detection of
Carathéodory angular derivatives, and the constructions linking boundary
sets of finite entropy to the maps that realize them.
"""

from .circle import (
    ArcInterval,
    BoundarySet,
    CirclePoint,
    ValidationError,
    boundary_set_from_json,
    boundary_set_to_json,
    chordal_distance,
    complementary_arcs,
    contains,
    entropy,
    load_boundary_set,
    removed_arc_entropy_limit,
    removed_arc_entropy_partials,
)
from .harmonic import (
    GridFunction,
    InteriorPoint,
    ResolutionWarning,
    conjugate,
    grid_from_function,
    herglotz,
    mean,
    outer_function,
    poisson,
)
from .discmap import (
    ConstantMap,
    DiscMap,
    HerglotzMap,
    IdentityMap,
    MoebiusMap,
    RationalMap,
    load_map,
    map_from_json,
    map_to_json,
    rotate_map,
)
from .clark import (
    ArcMassReport,
    ClarkDensity,
    DisintegrationReport,
    LogIntegrabilityReport,
    arc_mass_alpha_average,
    clark_density,
    disintegration_check,
    log_integrability,
    measure_of_arc,
    total_mass,
)
from .angular import (
    DerivativeReport,
    JuliaReport,
    RefinementControl,
    SingularIntegralResult,
    Verdict,
    detect,
    detect_many,
    julia_quotient,
    reports_to_csv,
    singular_integral,
)
from .characterize import (
    ConstructionResult,
    ForwardResult,
    LevelSetReport,
    VerificationReport,
    construct_from_set,
    forward_outer,
    level_sets,
    verify_characterization,
)

__version__ = "0.1.0"
