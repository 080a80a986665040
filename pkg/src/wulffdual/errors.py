"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the command line
front end reports next to the human message.
"""


class GeometryError(ValueError):
    code = "geometry"


class EquatorialPoint(GeometryError):
    code = "equatorial-point"


class PoleInput(GeometryError):
    code = "pole-input"


class InvalidLune(GeometryError):
    code = "invalid-lune"


class NotHemispherical(GeometryError):
    code = "not-hemispherical"


class Degenerate(GeometryError):
    code = "degenerate"


class NotConvex(GeometryError):
    code = "not-convex"


class Unbounded(GeometryError):
    code = "unbounded"


class EmptyInterior(GeometryError):
    code = "empty-interior"


class NotOnBoundary(GeometryError):
    code = "not-on-boundary"


class NotSupporting(GeometryError):
    code = "not-supporting"


class NotInterior(GeometryError):
    code = "not-interior"


class InvalidSupportFunction(GeometryError):
    code = "invalid-support-function"


class SpecError(ValueError):
    """Invalid shape spec or run config; ``field`` names the offending key."""

    code = "invalid-spec"

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
