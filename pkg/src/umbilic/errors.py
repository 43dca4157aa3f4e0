"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(GeometryError, ValueError):
    pass


class DegenerateInputError(GeometryError, ValueError):
    pass


class DegenerateFrameError(GeometryError):
    pass


class SignatureError(GeometryError):
    pass


class InvalidFrameError(GeometryError):
    pass


class DomainError(GeometryError):
    """Point does not lie on the product of space forms."""


class ImmersionError(GeometryError):
    """Tangent vectors are (numerically) linearly dependent."""


class ModuliError(GeometryError, ValueError):
    pass


class CurvatureError(GeometryError, ValueError):
    pass


class RegimeError(GeometryError):
    """Curve is in the wrong Frenet regime (null vs non-null curvature vector)."""


class DegenerateCurveError(GeometryError):
    pass


class CheckError(GeometryError):
    """A verification check failed to run; carries the check name."""

    def __init__(self, check: str, cause: Exception):
        super().__init__(f"{check}: {cause}")
        self.check = check
        self.cause = cause


class ConfigError(GeometryError, ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
