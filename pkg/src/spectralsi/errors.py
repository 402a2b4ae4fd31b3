"""Exception types raised across the package."""


class SpectralError(ValueError):
    """Base class for every domain error in this package."""


# dilation
class NotSquare(SpectralError):
    pass


class NonInteger(SpectralError):
    pass


class Singular(SpectralError):
    pass


class NotExpansive(SpectralError):
    pass


class PowerRangeExceeded(SpectralError):
    pass


class InternalSearchExhausted(RuntimeError):
    pass


# generator systems
class TailUnbounded(SpectralError):
    pass


class NotNormalized(SpectralError):
    """A sampled spectral value exceeded 1 + tol."""


class NotPrincipal(SpectralError):
    pass


class FilterUnbounded(SpectralError):
    """The scaling equation has no bounded (|m| <= 1) solution on the samples."""


# geometry / criteria / wavelets
class EmptyDenominator(SpectralError):
    pass


class HypothesisViolated(SpectralError):
    pass


class QuadratureNonConvergent(RuntimeError):
    pass


class NegativeSpectral(SpectralError):
    pass
