"""Exception types shared across the package."""


class FilmspecError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FilmspecError):
    """A parameter is outside its admissible range or inconsistent with others."""


class BracketError(FilmspecError):
    """Root refinement was asked to bisect an interval without a sign change."""


class InsufficientRange(FilmspecError):
    """The eigenvalue scan hit its range cap before finding enough brackets."""


class ResidualError(FilmspecError):
    """A reconstructed solution failed its residual invariants."""


class ConvergenceError(FilmspecError):
    """An iterative dense eigensolve failed to converge."""


class OverlapError(FilmspecError):
    """Eigenvector/adjoint overlap is numerically zero; projection norm overflows."""
