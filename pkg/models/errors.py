class SurfaceCheckError(Exception):
    """Base class for every domain failure raised while checking a surface."""


class ConfigError(SurfaceCheckError):
    pass


class ExpressionSyntaxError(SurfaceCheckError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(SurfaceCheckError):
    def __init__(self, name, position=None):
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"unknown identifier '{name}'{where}")
        self.name = name
        self.position = position


class JetDomainError(SurfaceCheckError):
    pass


class OutsideDomain(JetDomainError):
    pass


class JetOrderExhausted(SurfaceCheckError):
    pass


class NotAnImmersion(SurfaceCheckError):
    pass


class NotLightlike(SurfaceCheckError):
    pass


class CoIsotropic(SurfaceCheckError):
    pass


class TransversalNotFound(SurfaceCheckError):
    pass


class PinViolation(SurfaceCheckError):
    def __init__(self, relation, residual):
        super().__init__(f"pinned frame violates {relation} (residual {residual:.3e})")
        self.relation = relation
        self.residual = residual


class CoefficientUndefined(SurfaceCheckError):
    pass


class ContinuationStall(SurfaceCheckError):
    pass


class StepTooLarge(SurfaceCheckError):
    pass


class HypothesisNotMet(SurfaceCheckError):
    pass
