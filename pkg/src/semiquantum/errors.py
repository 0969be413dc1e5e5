"""Exception hierarchy shared by all modules."""


class SemiquantumError(Exception):
    """Base class for every error raised by this package."""


class TruncationError(SemiquantumError):
    """A state does not fit into the requested Fock truncation.

    ``required_dim`` carries the smallest truncation that would satisfy the
    tail gate, when it can be estimated.
    """

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class DomainError(SemiquantumError):
    """An argument lies outside the region where an evaluation is reliable."""


class GridCoverageError(SemiquantumError):
    """A grid misses probability mass; ``deficit`` is ``1 - integral``."""

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class ToleranceError(SemiquantumError):
    """Two independent routes to the same quantity disagree."""


class DeconvolutionError(SemiquantumError):
    """Spectral division cannot be carried out safely on the given data."""
