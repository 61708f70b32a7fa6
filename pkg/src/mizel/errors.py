"""Exception types raised across the package."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class NotRightAngle(GeometryError):
    pass


class DegenerateTriple(GeometryError):
    pass


class InvalidRectangle(GeometryError):
    pass


class BadParameter(GeometryError):
    pass


class ConvexityViolation(GeometryError):
    """A support function fails h + h'' > 0 somewhere on its grid."""


class NotConvex(GeometryError):
    """A sampled curve turns clockwise somewhere beyond the angle tolerance."""


class EmptySet(GeometryError):
    pass


class WindowTooSmall(GeometryError):
    pass


class ResolutionTooLow(GeometryError):
    """A circle probe saw too many in/out transitions to be trusted."""


class ConfigError(ValueError):
    pass
