"""Eigenvectors, adjoint pairing, projection norms, and theta-space synthesis.

At a refined eigenvalue the subordinate solution v_n = (-1)^n w_n satisfies
both the recurrence and the boundary row, so it IS the eigenvector.  The
adjoint is reached through the sign-flip conjugation (Dx)_n = (-1)^n x_n:
D maps eigenvectors of the operator to eigenvectors of its transpose at the
same eigenvalue.  The spectral projection onto an eigenvalue then has norm
1/|<v, Dv>| for unit v, which is what this module computes; its growth along
the spectrum is the quantitative form of "the eigenvectors do not form a
basis".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import EigenvalueRecord
from .errors import ConfigError, FilmspecError, OverlapError, ResidualError
from .recurrence import ScaledSequence
from .sweep import backward_sweep

RECURRENCE_RTOL = 1e-8
SHOOTING_RTOL = 1e-6
NORM_ATOL = 1e-12
OVERLAP_FLOOR = 1e-300


def default_n_max(eps: float) -> int:
    """Entry count: 400 suffices below eps=0.5 (tail ~ n^-11 at eps=0.1);
    slower decay needs more."""
    return 400 if eps < 0.5 else 4000


@dataclass(frozen=True)
class Eigenvector:
    """Unit-l2 eigenvector samples on rows 1..n_max."""

    index: int
    lambda_: float
    entries: ScaledSequence
    peak_index: int

    @property
    def n_max(self) -> int:
        return self.entries.last_index

    def values(self) -> np.ndarray:
        return self.entries.resolve()


@dataclass(frozen=True)
class ProjectionReport:
    index: int
    lambda_: float
    proj_norm: float
    overlap: float  # <v, Dv> for the unit eigenvector v


def apply_operator(eps: float, x: np.ndarray) -> np.ndarray:
    """Tridiagonal action on rows 1..len(x)-1 (the last row would need an
    entry beyond the window)."""
    n = np.arange(1, len(x), dtype=np.float64)
    out = n * x[:-1]
    out[1:] += 0.5 * eps * n[1:] * (n[1:] - 1.0) * x[:-2]
    out -= 0.5 * eps * n * (n + 1.0) * x[1:]
    return out


def apply_adjoint(eps: float, x: np.ndarray) -> np.ndarray:
    """Transposed tridiagonal action on rows 1..len(x)-1."""
    n = np.arange(1, len(x), dtype=np.float64)
    out = n * x[:-1]
    out += 0.5 * eps * n * (n + 1.0) * x[1:]
    out[1:] -= 0.5 * eps * n[1:] * (n[1:] - 1.0) * x[:-2]
    return out


def _sample(eps: float, lam, M: int, n_max: int) -> np.ndarray:
    """Unit-l2 samples of (-1)^n w_n at lam; longdouble lam keeps its extra
    digits through the recursion."""
    dtype = np.longdouble if isinstance(lam, np.longdouble) else np.float64
    res = backward_sweep(eps, np.array([lam], dtype=dtype), M, n_store=n_max)
    w = res.rows[:, 0]  # common scale is irrelevant under unit normalization
    signs = np.where(np.arange(1, n_max + 1) % 2 == 0, 1.0, -1.0)
    v = signs * w
    return v / np.linalg.norm(v)


def _graft_forward_head(eps: float, lam, v: np.ndarray) -> np.ndarray | None:
    """Replace the leading entries of v by a forward-integrated solution.

    Backward recursion loses relative accuracy in the head (each step below
    the turning point amplifies rounding into the re-growing branch), which
    is exactly where the boundary-row invariant looks.  The forward orbit
    of seeds chosen to satisfy the boundary row exactly is stable in that
    same region, so the head is taken from it, scaled to match the backward
    body over the last few shared rows.  The stitch quality is not assumed:
    the caller re-runs the full invariant check, whose interior-residual
    clause fails honestly if the two solutions disagree.
    """
    lam_f = float(lam)
    n_s = max(4, math.ceil(2.0 * lam_f) + 2)
    if n_s + 6 > len(v):
        return None
    LD = np.longdouble
    eps_ld, lam_ld = LD(eps), LD(lam)
    fwd = np.empty(n_s, dtype=LD)
    fwd[0] = LD(-1)
    fwd[1] = -(LD(1) - lam_ld) / eps_ld
    for n in range(2, n_s):
        fwd[n] = (
            LD(n) * LD(n - 1) * fwd[n - 2]
            + (LD(2) * (LD(n) - lam_ld) / eps_ld) * fwd[n - 1]
        ) / (LD(n) * LD(n + 1))
    win = slice(n_s - 5, n_s)
    body = v[win].astype(LD)
    denom = np.dot(fwd[win], fwd[win])
    if denom == 0:
        return None
    beta = np.dot(fwd[win], body) / denom
    out = v.copy()
    out[:n_s] = np.asarray(beta * fwd, dtype=np.float64)
    return out / np.linalg.norm(out)


def _invariant_failure(eps: float, lam: float, v: np.ndarray) -> str | None:
    """Reason the samples fail the eigenvector invariants, or None."""
    n_max = len(v)
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > NORM_ATOL:
        return f"normalization failed: |v| = {nrm}"

    n = np.arange(2, n_max, dtype=np.float64)
    t_prev = n * (n - 1.0) * v[:-2]
    t_next = n * (n + 1.0) * v[2:]
    t_diag = (2.0 * (n - lam) / eps) * v[1:-1]
    resid = np.abs(t_prev - t_next + t_diag)
    denom = np.maximum(np.abs(t_prev), np.maximum(np.abs(t_next), np.abs(t_diag)))
    denom = np.maximum(denom, np.finfo(np.float64).tiny)
    worst = float(np.max(resid / denom))
    if worst > RECURRENCE_RTOL:
        return f"recurrence residual {worst:.3e} exceeds {RECURRENCE_RTOL}"

    shoot = abs(eps * v[1] - (1.0 - lam) * v[0])
    lead = max(abs(v[0]), abs(v[1]))
    if shoot > SHOOTING_RTOL * lead:
        return (
            f"boundary-row residual {shoot:.3e} exceeds "
            f"{SHOOTING_RTOL} * {lead:.3e}"
        )
    return None


def build_eigenvector(
    eps: float, rec: EigenvalueRecord, n_max: int | None = None
) -> Eigenvector:
    """Unit-l2 subordinate solution at rec's eigenvalue, on rows 1..n_max.

    The boundary-row residual scales with the lambda error times an
    amplification that grows quickly along the spectrum, so a bracket
    refined to the default 1e-8 (or even to one binary64 ulp) can leave
    more residual than the invariants allow.  Two escalating rescues run
    before giving up: the bracket is re-bisected in 80-bit arithmetic and
    the entries resampled; if the residual is then still amplification
    limited, the head of the vector is regrown forward from seeds that
    meet the boundary row exactly (two-sided shooting), with the full
    invariant check validating the stitch.  The stored lambda stays
    binary64: with the entries held fixed, rounding lambda moves the
    boundary residual only at the ~1e-22 level.  Raises ResidualError
    when the samples still fail to behave like an eigenvector (bad root
    or too-small M).
    """
    if n_max is None:
        n_max = default_n_max(eps)
    if rec.M <= n_max:
        raise ConfigError(f"record's M={rec.M} must exceed n_max={n_max}")
    lam = rec.lambda_
    if rec.M < 2.0 * lam + 10.0:
        raise ConfigError(f"record's M={rec.M} too small for lambda={lam}")
    v = _sample(eps, lam, rec.M, n_max)
    reason = _invariant_failure(eps, lam, v)
    lam_fine = lam
    if reason is not None:
        lo, hi = rec.bracket
        fine = 8.0 * max(abs(lam), 1.0) * float(np.finfo(np.longdouble).eps)
        if hi - lo > fine:
            from .eigensolver import _refine_batch

            try:
                los, his = _refine_batch(
                    eps, [(lo, hi)], rec.M, fine, dtype=np.longdouble
                )
            except FilmspecError as exc:
                raise ResidualError(f"{reason} at lambda={lam}; repolish: {exc}")
            lam_fine = np.longdouble(0.5) * (los[0] + his[0])
            v = _sample(eps, lam_fine, rec.M, n_max)
            lam = float(lam_fine)
            reason = _invariant_failure(eps, lam, v)
        if reason is not None:
            grafted = _graft_forward_head(eps, lam_fine, v)
            if grafted is not None and _invariant_failure(eps, lam, grafted) is None:
                v, reason = grafted, None
        if reason is not None:
            raise ResidualError(f"{reason} at lambda={lam}")

    peak = int(np.argmax(np.abs(v))) + 1  # argmax takes the smaller on ties
    return Eigenvector(
        index=rec.index,
        lambda_=lam,
        entries=ScaledSequence(1, v, 0.0),
        peak_index=peak,
    )


def projection_norm(v: Eigenvector) -> ProjectionReport:
    """Norm of the rank-one spectral projection attached to v.

    For unit v with adjoint partner Dv (also unit), the projection
    x -> <x, Dv> v / <v, Dv> has norm 1/|<v, Dv>|.  Overlap below 1e-300
    would overflow the reciprocal; that raises OverlapError, which the
    service surfaces as a conflict response instead of a number.
    """
    vals = v.values()
    signs = np.where(np.arange(1, len(vals) + 1) % 2 == 0, 1.0, -1.0)
    overlap = float(np.sum(signs * vals * vals))
    if abs(overlap) < OVERLAP_FLOOR:
        raise OverlapError(
            f"overlap {overlap:.3e} at lambda={v.lambda_} is below "
            f"{OVERLAP_FLOOR}; projection norm overflows"
        )
    return ProjectionReport(
        index=v.index,
        lambda_=v.lambda_,
        proj_norm=1.0 / abs(overlap),
        overlap=overlap,
    )


def synthesize_theta_samples(v: Eigenvector, grid_size: int):
    """Samples of (1/sqrt(2*pi)) * sum_k v_k e^{ik theta} on a uniform grid.

    Grid points are theta_j = -pi + 2*pi*j/grid_size for j = 0..grid_size-1;
    coefficients outside 1..n_max are zero (one-sided block).  Returns a
    list of (theta, complex value) pairs.
    """
    if grid_size < 2:
        raise ConfigError(f"grid_size must be >= 2, got {grid_size}")
    vals = v.values()
    k = np.arange(1, len(vals) + 1, dtype=np.float64)
    theta = -math.pi + 2.0 * math.pi * np.arange(grid_size) / grid_size
    phases = np.exp(1j * np.outer(theta, k))
    f = phases @ vals / math.sqrt(2.0 * math.pi)
    return [(float(theta[j]), complex(f[j])) for j in range(grid_size)]
