"""Exception types raised across the package.

Index errors use the builtin IndexError and file-system failures surface as
the builtin OSError; everything domain-specific derives from OtLaplaceError
so callers can catch the whole family at once.
"""


class OtLaplaceError(Exception):
    """Base class for all domain errors."""


class EmptyInput(OtLaplaceError):
    pass


class DimensionMismatch(OtLaplaceError):
    pass


class NonFiniteCoordinate(OtLaplaceError):
    pass


class InvalidSpec(OtLaplaceError):
    pass


class ParseError(OtLaplaceError):
    pass


class InconsistentPointCount(OtLaplaceError):
    pass


class SizeLimitExceeded(OtLaplaceError):
    pass


class UnequalSizes(OtLaplaceError):
    pass


class UnsupportedShape(OtLaplaceError):
    pass


class ZeroRowMass(OtLaplaceError):
    pass


class InvalidEpsilon(OtLaplaceError):
    pass


class InvalidK(OtLaplaceError):
    pass


class DegenerateInput(OtLaplaceError):
    pass


class ShapeMismatch(OtLaplaceError):
    pass


class UnlabeledComponent(OtLaplaceError):
    """Raised when a connected component carries no labeled node.

    The offending components are attached as a list of node-index lists.
    """

    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        super().__init__(
            "graph has %d connected component(s) without any labeled node: %s"
            % (len(self.components), self.components)
        )


class SingularSystem(OtLaplaceError):
    pass


class BoundaryPoint(OtLaplaceError):
    pass


class DomainError(OtLaplaceError):
    pass


class BudgetExceeded(OtLaplaceError):
    pass


class IncompatibleGround(OtLaplaceError):
    pass


class ConfigError(OtLaplaceError):
    pass
