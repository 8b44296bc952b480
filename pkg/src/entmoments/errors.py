"""Exception hierarchy shared by every module."""


class EntMomentsError(Exception):
    """Base class for all library errors."""


class NotHermitian(EntMomentsError, ValueError):
    pass


class NoConvergence(EntMomentsError, RuntimeError):
    pass


class BadParty(EntMomentsError, IndexError):
    pass


class NonRealTrace(EntMomentsError, ValueError):
    pass


class InvalidState(EntMomentsError, ValueError):
    """Matrix fails the density-matrix invariants (Hermitian, unit trace, PSD)."""


class DimensionMismatch(EntMomentsError, ValueError):
    pass


class OutOfRange(EntMomentsError, ValueError):
    """Family parameter outside its documented range."""


class ZeroTrace(EntMomentsError, ZeroDivisionError):
    pass


class TooFewMoments(EntMomentsError, ValueError):
    pass


class NotNormalized(EntMomentsError, ValueError):
    pass


class DomainError(EntMomentsError, ValueError):
    """Square-root argument of an optimal-moment bound is negative beyond tolerance."""


class NegativeGeometricMeanInput(EntMomentsError, ValueError):
    """Per-party moments of mixed sign cannot be combined by a geometric mean."""


class NotBipartite(EntMomentsError, ValueError):
    pass


class InternalConsistencyError(EntMomentsError, AssertionError):
    """A PSD mapped matrix produced a negative Hankel matrix."""
