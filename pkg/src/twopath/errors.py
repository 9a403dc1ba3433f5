"""Exception types shared across the simulator."""


class SimulatorError(Exception):
    """Base class for all errors raised by this package."""


class UnsupportedSize(SimulatorError):
    """Source count has no precoder recipe (must be 2^k or 3*2^k)."""


class InjectivityViolation(SimulatorError):
    """A precoding vector maps two distinct label vectors to the same point.

    Carries the colliding pair so the caller can see which symbols alias.
    """

    def __init__(self, message, witness_a=None, witness_b=None):
        super().__init__(message)
        self.witness_a = witness_a
        self.witness_b = witness_b


class DomainError(SimulatorError):
    """Input outside the alphabet a mapping function is defined on."""


class NonPositiveDistance(SimulatorError):
    """Path-loss evaluation requires a strictly positive distance."""


class InsufficientSamples(SimulatorError):
    """Monte Carlo channel averaging requested below the sample floor."""


class ConfigError(SimulatorError):
    """Invalid experiment or frame configuration."""


class UnknownFigure(SimulatorError):
    """Figure id not in the canned reproduction set."""
