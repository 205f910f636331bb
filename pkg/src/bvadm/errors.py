"""Exception types shared across the package."""


class BvadmError(Exception):
    """Base class for all package-specific errors."""


class ConfigMismatch(BvadmError):
    """Operands built over different Grassmann configurations or grids."""


class GradeMismatch(BvadmError):
    """An operation received arguments of incompatible ghost grade."""


class SchemeUnsupported(BvadmError):
    """Requested differentiation scheme is invalid for the given axis/grid."""


class SingularMetric(BvadmError):
    """Metric body is not positive definite (or lapse body vanishes)."""


class MissingJets(BvadmError):
    """A pre-boundary operation needs normal jets that were not provided."""


class DimensionUnsupported(BvadmError):
    """Boundary dimension outside the supported range (d >= 2)."""


class SchemaError(BvadmError):
    """Malformed scenario file or field archive."""
