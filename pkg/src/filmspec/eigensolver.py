"""Shooting-function evaluation, sign-change scanning, and root refinement.

An eigenvalue is a lambda where the decaying solution also satisfies the
boundary row, i.e. where f(lambda) = eps*w_2 + (1-lambda)*w_1 vanishes.
f is continuous in lambda but nothing guarantees smoothness, so roots are
located by strict sign changes on a grid and refined by bisection only.
Several brackets are refined in lockstep: one batched recursion per
bisection level serves every bracket at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ConfigError, InsufficientRange
from .sweep import backward_sweep, f_values

DEFAULT_M = 4000
DEFAULT_TOL = 1e-8
_MAX_BISECT = 200


def default_step(eps: float) -> float:
    """Scan step: gaps between consecutive roots exceed 1 in the operating
    range, so any step well below 1 is safe; finer for small eps where the
    first gap is smallest."""
    return 0.01 if eps <= 0.2 else 0.02


@dataclass(frozen=True)
class SignedMagnitude:
    """Sign and log-magnitude of f at one lambda.

    Only the sign participates in bracketing; log_abs (natural log, at the
    solution's tail-calibrated scale) is diagnostic.  The two are split
    because |f| spans more dynamic range than binary64 holds.
    """

    sign: int
    log_abs: float


@dataclass(frozen=True)
class EigenvalueRecord:
    index: int
    lambda_: float
    bracket: tuple[float, float]
    residual_sign_gap: float  # bracket width at termination
    M: int
    proj_norm: float | None = None


def _validate(eps: float, lam: float, M: int) -> None:
    if not (0.0 < eps < 2.0):
        raise ConfigError(f"eps must lie in (0, 2), got {eps}")
    if lam < 0.0:
        raise ConfigError(f"lambda must be >= 0, got {lam}")
    if M < 1000:
        raise ConfigError(f"M must be >= 1000, got {M}")
    if M < 2.0 * lam + 10.0:
        raise ConfigError(
            f"M={M} cannot resolve lambda={lam}: need M >= 2*lambda + 10"
        )


def _signs(eps: float, lams, M: int):
    a = np.asarray(lams)
    if a.dtype != np.longdouble:
        a = np.asarray(a, dtype=np.float64)
    res = backward_sweep(eps, a, M)
    return f_values(eps, res)


def evaluate_f(eps: float, lam: float, M: int = DEFAULT_M) -> SignedMagnitude:
    """Sign and log-magnitude of the shooting function at one lambda."""
    _validate(eps, lam, M)
    s, la = _signs(eps, [lam], M)
    return SignedMagnitude(sign=int(s[0]), log_abs=float(la[0]))


def scan_profile(eps: float, lo: float, hi: float, step: float, M: int):
    """f on the grid lo, lo+step, ...: returns (grid, signs, log_abs)."""
    if not (0.0 <= lo < hi) or not (0.0 < step <= hi - lo):
        raise ConfigError(f"malformed scan range lo={lo}, hi={hi}, step={step}")
    _validate(eps, hi, M)
    n_steps = int(math.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(n_steps + 1)
    signs, log_abs = _signs(eps, grid, M)
    return grid, signs, log_abs


def _pairs_to_brackets(grid, signs) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for i in range(len(grid)):
        if signs[i] == 0:
            out.append((float(grid[i]), float(grid[i])))
        elif i + 1 < len(grid) and signs[i + 1] != 0 and signs[i] * signs[i + 1] < 0:
            out.append((float(grid[i]), float(grid[i + 1])))
    return out


def scan_brackets(
    eps: float, lo: float, hi: float, step: float, M: int = DEFAULT_M
) -> list[tuple[float, float]]:
    """All strict sign changes of f on the grid, as (left, right) pairs.

    An exact zero at a grid point (probability-zero, handled for
    determinism) appears as a degenerate width-0 bracket.
    """
    grid, signs, _ = scan_profile(eps, lo, hi, step, M)
    return _pairs_to_brackets(grid, signs)


def suspect_minima(grid, signs, log_abs, drop: float = 6.0 * math.log(10.0)):
    """Local |f| minima with no adjacent sign change, dipping far below the
    scan's median magnitude.  A double root would look like this instead of
    a sign change; none are expected, but they are reported, not classified.
    """
    med = float(np.median(log_abs[np.isfinite(log_abs)]))
    out = []
    for i in range(1, len(grid) - 1):
        if (
            log_abs[i] < log_abs[i - 1]
            and log_abs[i] < log_abs[i + 1]
            and signs[i - 1] == signs[i] == signs[i + 1]
            and signs[i] != 0
            and log_abs[i] <= med - drop
        ):
            out.append(float(grid[i]))
    return out


def _refine_batch(eps, brackets, M: int, tol: float, dtype=np.float64):
    """Lockstep bisection of several brackets; one batched recursion per
    level.  Returns (lo, hi) arrays with every width <= tol.  Pass
    dtype=numpy.longdouble to bisect below binary64 resolution."""
    los = np.array([b[0] for b in brackets], dtype=dtype)
    his = np.array([b[1] for b in brackets], dtype=dtype)
    slo, _ = _signs(eps, los, M)
    shi, _ = _signs(eps, his, M)
    live = los < his
    zero_lo = slo == 0
    zero_hi = shi == 0
    his = np.where(live & zero_lo, los, his)
    los = np.where(live & zero_hi & ~zero_lo, his, los)
    bad = live & (los < his) & (slo * shi > 0)
    if bad.any():
        i = int(np.argmax(bad))
        raise BracketError(
            f"no sign change across bracket ({los[i]}, {his[i]}): "
            f"signs {int(slo[i])}, {int(shi[i])}"
        )
    iters = 0
    while float(np.max(his - los)) > tol:
        if iters >= _MAX_BISECT:
            raise BracketError("bisection failed to converge")
        mids = 0.5 * (los + his)
        sm, _ = _signs(eps, mids, M)
        zero = sm == 0
        same = sm == slo
        new_lo = np.where(zero, mids, np.where(same, mids, los))
        new_hi = np.where(zero, mids, np.where(same, his, mids))
        los, his = new_lo, new_hi
        iters += 1
    return los, his


def refine_root(
    eps: float,
    bracket: tuple[float, float],
    M: int = DEFAULT_M,
    tol: float = DEFAULT_TOL,
    index: int = 1,
) -> EigenvalueRecord:
    """Bisect one bracket down to width <= tol; lambda is the midpoint."""
    lo, hi = float(bracket[0]), float(bracket[1])
    _validate(eps, max(lo, hi), M)
    if tol <= 0.0:
        raise ConfigError(f"tol must be positive, got {tol}")
    los, his = _refine_batch(eps, [(lo, hi)], M, tol)
    flo, fhi = float(los[0]), float(his[0])
    return EigenvalueRecord(
        index=index,
        lambda_=0.5 * (flo + fhi),
        bracket=(flo, fhi),
        residual_sign_gap=fhi - flo,
        M=M,
    )


def compute_spectrum(
    eps: float,
    count: int,
    M: int = DEFAULT_M,
    tol: float = DEFAULT_TOL,
    step: float | None = None,
) -> list[EigenvalueRecord]:
    """First `count` real eigenvalues in increasing order.

    Scans upward in blocks until `count` sign changes are collected, then
    refines every bracket in lockstep.  The scan cannot pass the resolvable
    ceiling lambda = (M-10)/2; hitting it raises InsufficientRange.
    """
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    if step is None:
        step = default_step(eps)
    _validate(eps, 0.0, M)
    if tol <= 0.0 or step <= 0.0:
        raise ConfigError("step and tol must be positive")

    cap = (M - 10) / 2.0
    block = max(4.0, 400.0 * step)
    brackets: list[tuple[float, float]] = []
    x0 = 0.0
    while len(brackets) < count:
        if x0 >= cap - step:
            raise InsufficientRange(
                f"found {len(brackets)} of {count} eigenvalues below the "
                f"scan ceiling {cap} for M={M}; increase M"
            )
        x1 = min(x0 + block, cap)
        grid, signs, _ = scan_profile(eps, x0, x1, step, M)
        for b in _pairs_to_brackets(grid, signs):
            if not brackets or b[0] > brackets[-1][0]:
                brackets.append(b)
        x0 = float(grid[-1])

    brackets = brackets[:count]
    los, his = _refine_batch(eps, brackets, M, tol)
    return [
        EigenvalueRecord(
            index=i + 1,
            lambda_=0.5 * float(los[i] + his[i]),
            bracket=(float(los[i]), float(his[i])),
            residual_sign_gap=float(his[i] - los[i]),
            M=M,
        )
        for i in range(count)
    ]


def fit_power_law(records) -> tuple[float, float]:
    """Least-squares fit of ln(lambda_n) = ln(alpha) + gamma*ln(n), equal
    weight per record.  Returns (alpha, gamma)."""
    if len(records) < 3:
        raise ConfigError(f"need at least 3 records to fit, got {len(records)}")
    n = np.array([float(r.index) for r in records])
    lam = np.array([float(r.lambda_) for r in records])
    if np.any(n < 1) or np.any(lam <= 0):
        raise ConfigError("fit needs index >= 1 and lambda > 0")
    gamma, loga = np.polyfit(np.log(n), np.log(lam), 1)
    return float(math.exp(loga)), float(gamma)
