"""Construction of the subordinate (minimal) solution by backward recursion.

Among solutions of the three-term recurrence exactly one decays (w_n ~ n^-c);
every other grows like n^a.  Backward recursion from power-law seeds at a
large cutoff M converges onto the decaying one: contamination by the growing
branch shrinks as the recursion runs down.  Normalization is by the
geometric mean of w_n * n^c over the window [max(M-100, ceil(2*lambda)+1),
M], which averages out the O(h/n) tail bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ResidualError
from .recurrence import Exponents, Params, ScaledSequence
from .sweep import backward_sweep


@dataclass(frozen=True)
class SubordinateSolution:
    """The decaying solution on rows 1..n_max, tail-calibrated.

    Sign rule: the square-summable eigen-candidate is v_n = (-1)^n w_n.
    Entries are strictly positive from n >= 2*lambda on (positivity
    propagates backward while the recurrence coefficients are positive).
    """

    params: Params
    M: int
    w: ScaledSequence
    tail_calibrated: bool = True

    @property
    def n_max(self) -> int:
        return self.w.last_index

    def values(self) -> np.ndarray:
        """Rows 1..n_max resolved to binary64, tail-calibrated scale."""
        return self.w.resolve()


def compute_subordinate(p: Params, M: int, n_max: int) -> SubordinateSolution:
    """Backward solution seeded at rows M+1, M+2, recursed down to row 1.

    M must dominate both the requested window (M > n_max >= 2) and the
    turning point (M >= 2*lambda + 10), otherwise the seed sits in the
    region where the decaying branch is not yet dominant.
    """
    if n_max < 2 or M <= n_max:
        raise ConfigError(f"need M > n_max >= 2, got M={M}, n_max={n_max}")
    if M < 2.0 * p.lambda_ + 10.0:
        raise ConfigError(
            f"M={M} too small for lambda={p.lambda_}: need M >= 2*lambda + 10"
        )
    res = backward_sweep(p.epsilon, [p.lambda_], M, n_store=n_max)
    seq = ScaledSequence(
        1, res.rows[:, 0], float(res.rows_log[0] - res.gm_log[0])
    )
    lo = max(1, math.ceil(2.0 * p.lambda_))
    if not np.all(seq.mantissas[lo - 1 :] > 0.0):
        raise ResidualError(
            f"positivity lost beyond n={lo}; increase M (currently {M})"
        )
    return SubordinateSolution(params=p, M=M, w=seq)


def check_m_consistency(p: Params, M1: int, M2: int, n_check: int) -> float:
    """Shape agreement of the solutions built from two different cutoffs.

    Both solutions are restricted to rows 1..n_check, brought to unit l2
    norm with signs aligned, and compared entrywise; the return value is
    the largest entry difference relative to the peak magnitude.  Mutual
    calibration is deliberate: each cutoff's own tail normalization carries
    an O(h/M) bias, so comparing raw normalized solutions would measure the
    bias difference (~1e-4 at M=4000 vs 8000) instead of actual shape
    disagreement (~1e-15).
    """
    if not (M2 > M1 > n_check):
        raise ConfigError(
            f"need M2 > M1 > n_check, got M1={M1}, M2={M2}, n_check={n_check}"
        )
    if n_check < 1:
        raise ConfigError("n_check must be >= 1")
    u1 = compute_subordinate(p, M1, max(2, n_check)).values()[:n_check]
    u2 = compute_subordinate(p, M2, max(2, n_check)).values()[:n_check]
    u1 = u1 / np.linalg.norm(u1)
    u2 = u2 / np.linalg.norm(u2)
    if float(np.dot(u1, u2)) < 0.0:
        u2 = -u2
    return float(np.max(np.abs(u1 - u2)) / np.max(np.abs(u1)))


def envelope_bounds(p: Params, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Tail envelope (1 - h/n) * n^-c <= w_n <= n^-c as (lower, upper) arrays."""
    ex = Exponents.from_params(p)
    n = np.asarray(n, dtype=np.float64)
    upper = n**-ex.c
    return (1.0 - ex.h / n) * upper, upper
