"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for computational failures in this package."""


class DomainError(GeometryError):
    """Coordinate argument outside its admissible range."""


class InfeasibleZone(GeometryError):
    """No admissible exact-sine zone: the collar cannot absorb the cone angle."""


class NoRoot(GeometryError):
    """Bracketing or refinement of the transition amplitude failed."""


class CoreSingularity(GeometryError):
    """Evaluation too close to a coordinate core circle."""


class DegeneratePlane(GeometryError):
    """Tangent plane spanned by numerically dependent vectors."""


class NotOnSphere(GeometryError):
    """Point fails the unit-norm check for the 3-sphere."""


class CollarViolation(GeometryError):
    """Requested torus radius enters a modified collar."""


class CoreApproach(GeometryError):
    """Trajectory entered the excluded neighbourhood of a core circle.

    Carries the last admissible state and the arclength at which the
    trajectory was cut off.
    """

    def __init__(self, message, state=None, arclength=None):
        super().__init__(message)
        self.state = state
        self.arclength = arclength


class DriftAbort(GeometryError):
    """A conserved quantity drifted beyond the abort threshold."""


class NotClosed(GeometryError):
    """No period detected within the sampled arclength."""


class WindingAmbiguous(GeometryError):
    """Angle increment too far from an integer multiple of 2*pi."""


class NotCoprime(GeometryError):
    """Winding pair shares a common factor: a torus link, not a knot.

    ``d`` is the common factor, ``reduced`` the primitive winding pair.
    """

    def __init__(self, d, reduced):
        super().__init__(f"winding pair shares factor {d}; primitive pair is {reduced}")
        self.d = d
        self.reduced = reduced


class NoSolution(GeometryError):
    """Target slope lies outside the attainable range."""


class TooFewSamples(GeometryError):
    """Curve too coarsely sampled for the requested operation."""


class ConfigError(GeometryError):
    """Invalid run configuration."""
