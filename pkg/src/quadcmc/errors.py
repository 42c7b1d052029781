"""Exception and warning types raised across the package."""


class QuadCmcError(Exception):
    """Base class for every error raised by quadcmc."""


class BadSpec(QuadCmcError, ValueError):
    pass


class OutOfDomain(QuadCmcError, ValueError):
    pass


class RankDeficient(QuadCmcError):
    pass


class Asymmetric(QuadCmcError):
    pass


class CurvatureOutOfBounds(QuadCmcError):
    pass


class DegenerateImmersion(QuadCmcError):
    pass


class FIndeterminate(QuadCmcError):
    pass


class InsufficientSamples(QuadCmcError, ValueError):
    pass


class NotCMC(QuadCmcError):
    pass


class NotConstantA(QuadCmcError):
    pass


class NotProportional(QuadCmcError):
    pass


class HitCriticalPoint(QuadCmcError):
    pass


class ChartExit(QuadCmcError):
    """The flow left a non-periodic chart coordinate.

    ``state`` holds ``(t, params, arclength)`` at the last accepted step so
    the caller can resume in another chart.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ZeroSpeed(QuadCmcError):
    pass


class CriticalAnchor(QuadCmcError):
    pass


class AnchorNotOnN(QuadCmcError):
    pass


class OutOfRange(QuadCmcError, ValueError):
    pass


class PoleAtS(QuadCmcError):
    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s


class DuplicateRoot(QuadCmcError, ValueError):
    pass


class MinimalCase(QuadCmcError):
    pass


class BadGrid(QuadCmcError, ValueError):
    pass


class TruncationWarning(UserWarning):
    """Spectrum truncation may be too small for a complete index count."""
