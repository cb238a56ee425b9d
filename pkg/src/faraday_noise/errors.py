"""Exception hierarchy shared by all modules."""


class FaradayError(Exception):
    """Base class for every error raised by the package."""


class InvalidQuantumNumber(FaradayError, ValueError):
    """A value cannot be represented as a (half-)integer quantum number."""


class DomainError(FaradayError, ValueError):
    """Arguments lie outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Detuning sits on (or within the guard band of) a resonance."""

    def __init__(self, message, level=None, detuning=None):
        super().__init__(message)
        self.level = level
        self.detuning = detuning


class AtomConfigError(FaradayError, ValueError):
    """Atom configuration text is malformed or violates an invariant."""


class InfeasibleError(FaradayError):
    """No coupling strength satisfies the unit-gain constraint."""
