"""
Domain errors raised by the numerical pipelines.
"""


class BrickdualError(Exception):
    """Base class for every diagnostic raised by brickdual."""


class SizeGuardError(BrickdualError, ValueError):
    """A dense object would exceed the configured memory guard."""


class ConvergenceError(BrickdualError, RuntimeError):
    """An iterative eigensolver did not reach the requested tolerance."""


class FactorizationError(BrickdualError, RuntimeError):
    """A product of transfer matrices is not rank one within tolerance."""


class NonInjectiveError(BrickdualError, ValueError):
    """The MPS transfer matrix has a degenerate leading eigenvalue."""


class SpectrumError(BrickdualError, ValueError):
    """A spectrum violates Hermiticity or positivity beyond tolerance."""


class DecompositionError(BrickdualError, RuntimeError):
    """Bell/GHZ counts of a stabilizer state came out non-integral."""


class PurityError(BrickdualError, RuntimeError):
    """Entropies of complementary regions of a pure state disagree."""
