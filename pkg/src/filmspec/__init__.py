"""Spectral toolkit for a singular non-self-adjoint tridiagonal operator.

The package computes eigenvalues by shooting on a tail-seeded backward
recurrence, extracts eigenvectors and spectral-projection norms, assembles
the resolvent kernel at the origin from a fundamental pair, cross-checks
against dense finite sections, and verifies the growth/decay envelopes the
construction relies on.  A FastAPI service exposes every operation over
HTTP; the bundled CLI is a thin client that runs the same service in
process by default.
"""

from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    FilmspecError,
    InsufficientRange,
    OverlapError,
    ResidualError,
)
from .recurrence import (
    Exponents,
    Params,
    ScaledSequence,
    backward_step,
    forward_step,
    shooting_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "ConfigError",
    "ConvergenceError",
    "Exponents",
    "FilmspecError",
    "InsufficientRange",
    "OverlapError",
    "Params",
    "ResidualError",
    "ScaledSequence",
    "backward_step",
    "forward_step",
    "shooting_residual",
    "__version__",
]
