"""Positively curved metrics on cyclic quotients of the 3-sphere and their
knotted closed geodesics: warping profiles, curvature certification,
geodesic flow, and torus-knot classification."""

from .curves import Curve
from .errors import (
    CollarViolation,
    ConfigError,
    CoreApproach,
    CoreSingularity,
    DegeneratePlane,
    DomainError,
    DriftAbort,
    GeometryError,
    InfeasibleZone,
    NoRoot,
    NoSolution,
    NotClosed,
    NotCoprime,
    NotOnSphere,
    TooFewSamples,
    WindingAmbiguous,
)
from .geodesic import (
    ClosureResult,
    ConservationReport,
    DegenerateBand,
    GeodesicState,
    TorusGeodesicResult,
    TorusRoot,
    balanced_state,
    closure_check,
    find_torus_geodesic,
    first_integrals,
    geodesic_residual,
    geodesic_rhs,
    integrate_geodesic,
    torus_slope,
)
from .knot import (
    KnotType,
    alexander_polynomial,
    classify_curve,
    classify_torus_knot,
    mirror,
    winding_numbers,
)
from .metric import (
    CurvatureReport,
    QuotientMetric,
    build_metric,
    christoffel,
    curvature_scan,
    fd_curvature_oracle,
    frame_riemann_fd,
    metric_components,
    principal_curvatures,
    sectional_curvature,
)
from .quotient import (
    QuotientPoint,
    curve_length,
    embed_curve,
    embed_r3,
    hopf_circle_image,
    quotient_map,
)
from .warp import (
    WarpProfile,
    WarpPropertyReport,
    build_warp,
    verify_warp,
    warp_eval,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
