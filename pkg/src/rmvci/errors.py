"""Exception hierarchy shared by all solver modules."""


class RmvciError(Exception):
    """Base class for every error raised by the package."""


class InputError(RmvciError, ValueError):
    """Malformed instance data, mismatched ground sets, bad parameters."""


class CapacityError(RmvciError):
    """An enumeration-based routine was asked to exceed its size guard."""


class InvalidMarginalsError(RmvciError, ValueError):
    """Pairwise marginals violate the Frechet bounds or Observation-style checks."""


class NonConvergenceError(RmvciError):
    """A cutting-plane loop hit its iteration cap.

    ``last_iterate`` holds the final LP point so callers can report it.
    """

    def __init__(self, message, last_iterate=None, iterations=0):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class StructuralError(RmvciError):
    """Rounding found no valid move on a fractional point."""


class DecompositionError(RmvciError):
    """Convex decomposition failed to reproduce the requested marginals."""
