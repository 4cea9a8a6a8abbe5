"""Three-term recurrence primitives and scaled-sequence arithmetic.

The operator acts on one-sided square-summable sequences as

    (A v)_n = (eps/2) n(n-1) v_{n-1} - (eps/2) n(n+1) v_{n+1} + n v_n,

so eigenvector candidates satisfy

    n(n-1) v_{n-1} - n(n+1) v_{n+1} + (2(n-lambda)/eps) v_n = 0     (n >= 2)

with the n = 1 row giving the initial condition eps*v_2 = (1-lambda)*v_1.
Writing v_n = (-1)^n w_n turns the decaying solution positive and yields the
backward form

    w_n = ((n+2)/n) w_{n+2} + (2(n+1-lambda)/(eps n(n+1))) w_{n+1}.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# Rescale threshold for ScaledSequence mantissas. Powers of two keep
# entry ratios exact under rescaling.
RESCALE_B = 2.0**512


@dataclass(frozen=True)
class Params:
    """Problem parameters.

    epsilon must lie in (0, 2): outside that range the decaying-solution
    construction breaks down (every solution is square-summable for
    epsilon > 2, so there is nothing to select). lambda_ is the spectral
    parameter, restricted to the real half-line.
    """

    epsilon: float
    lambda_: float = 0.0
    allow_supercritical: bool = False

    def __post_init__(self) -> None:
        if not self.allow_supercritical and not (0.0 < self.epsilon < 2.0):
            raise ConfigError(f"epsilon must lie in (0, 2), got {self.epsilon}")
        if self.allow_supercritical and self.epsilon <= 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.lambda_ < 0.0:
            raise ConfigError(f"lambda must be >= 0, got {self.lambda_}")


@dataclass(frozen=True)
class Exponents:
    """Power-law exponents attached to a parameter set.

    a governs growth of the generic solution (v_n ~ n^a), c the decay of
    the subordinate one (w_n ~ n^-c); c = a + 2 always. h = k = 1 + lambda/eps
    is the first-order envelope coefficient: w_n n^c in [1 - h/n, 1].
    """

    a: float
    c: float
    k: float
    h: float

    @classmethod
    def from_params(cls, p: Params) -> "Exponents":
        a = -1.0 + 1.0 / p.epsilon
        c = 1.0 + 1.0 / p.epsilon
        kh = 1.0 + p.lambda_ / p.epsilon
        return cls(a=a, c=c, k=kh, h=kh)


class ScaledSequence:
    """A finite real sequence stored as mantissas plus one shared log scale.

    True entry values are mantissas[i] * exp(log_scale). Rescaling uses
    powers of two only, so signs and entry ratios are preserved exactly;
    after a rescale the largest |mantissa| lies in [1, RESCALE_B].
    """

    __slots__ = ("first_index", "mantissas", "log_scale")

    def __init__(self, first_index: int, mantissas, log_scale: float = 0.0):
        if first_index < 1:
            raise ConfigError("first_index must be >= 1")
        self.first_index = int(first_index)
        self.mantissas = np.asarray(mantissas, dtype=np.float64)
        self.log_scale = float(log_scale)
        self._rescale()

    def _rescale(self) -> None:
        m = float(np.max(np.abs(self.mantissas))) if self.mantissas.size else 0.0
        if m == 0.0 or not math.isfinite(m):
            self.log_scale = 0.0 if m == 0.0 else self.log_scale
            return
        k = math.floor(math.log2(m))
        if k != 0:
            factor = math.ldexp(1.0, -k)  # exact power of two
            self.mantissas = self.mantissas * factor
            self.log_scale += k * math.log(2.0)

    def __len__(self) -> int:
        return int(self.mantissas.size)

    @property
    def last_index(self) -> int:
        return self.first_index + len(self) - 1

    def value(self, n: int) -> float:
        """Entry at absolute index n, resolved to a plain float."""
        return float(self.mantissas[n - self.first_index]) * math.exp(self.log_scale)

    def resolve(self) -> np.ndarray:
        """All entries resolved to plain binary64 (may under/overflow)."""
        return self.mantissas * math.exp(self.log_scale)

    def log_abs(self, n: int) -> float:
        """log |entry n|; -inf for an exact zero."""
        m = abs(float(self.mantissas[n - self.first_index]))
        return math.log(m) + self.log_scale if m > 0.0 else -math.inf


def forward_step(p: Params, n: int, v_prev: float, v_cur: float) -> float:
    """One forward step: from (v_{n-1}, v_n) to v_{n+1}.

    Valid for n >= 2; the n = 1 row is the initial condition, not a step.
    """
    if n < 2:
        raise ConfigError(f"forward_step requires n >= 2, got {n}")
    return (n * (n - 1) * v_prev + (2.0 * (n - p.lambda_) / p.epsilon) * v_cur) / (
        n * (n + 1)
    )


def backward_step(p: Params, n: int, w_next: float, w_next2: float) -> float:
    """One backward step: from (w_{n+1}, w_{n+2}) to w_n, in the w variables."""
    if n < 1:
        raise ConfigError(f"backward_step requires n >= 1, got {n}")
    return ((n + 2) / n) * w_next2 + (
        2.0 * (n + 1 - p.lambda_) / (p.epsilon * n * (n + 1))
    ) * w_next


def shooting_residual(p: Params, v1: float, v2: float) -> float:
    """eps*v2 - (1-lambda)*v1; zero exactly when the boundary row holds."""
    return p.epsilon * v2 - (1.0 - p.lambda_) * v1
