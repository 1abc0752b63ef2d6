"""Exception types raised across the package."""


class RigidLaxError(Exception):
    """Base class for all package errors."""


class InvalidArgument(RigidLaxError, ValueError):
    pass


class KindMismatch(InvalidArgument):
    pass


class NotHamiltonianError(RigidLaxError):
    pass


class NoLaxPairError(RigidLaxError):
    pass


class OffManifoldError(RigidLaxError):
    """Raised when a reduction is applied to data that leaves its invariant manifold."""


class IntegrationError(RigidLaxError):
    pass


class StepUnderflow(IntegrationError):
    pass


class NonFiniteState(IntegrationError):
    pass


class MaxStepsExceeded(IntegrationError):
    pass


class ConfigError(RigidLaxError):
    """Config file could not be parsed; ``where`` names the key or line."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
