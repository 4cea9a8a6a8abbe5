"""Batched backward-recursion engine in 80-bit extended precision.

Every spectral quantity in this package reduces to scans of the shooting
function f(lambda) = eps*w_2 + (1-lambda)*w_1, where the w_n come from the
backward recurrence seeded deep in the tail.  In binary64 each backward step
below n ~ 2*lambda injects one rounding's worth of the re-growing solution
branch, and the accumulated amplification (roughly the product of the step
multipliers 2(lambda-n-1)/(eps n(n+1))) reaches ~1e13 by lambda ~ 44 at
eps = 0.1.  That noise floor swamps the sign structure of f near high
eigenvalues.  Running the recursion in numpy.longdouble (64-bit mantissa on
x86) lowers the floor by ~3 decimal digits, enough to keep every scan in the
package's operating envelope sign-stable.  Extended precision never crosses
an API boundary: all public inputs and outputs are binary64.

Mantissas are kept in [2^-4096, 2^4096] by power-of-two rescaling, with
per-column integer rescale counts so that scale bookkeeping is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LD = np.longdouble

_SHIFT = 4096
_LIM = LD(2) ** _SHIFT
_INV = LD(2) ** (-_SHIFT)
_DELTA = _SHIFT * np.log(LD(2))  # log of one rescale step, longdouble


def unify_rows(mant: np.ndarray, counts: np.ndarray):
    """Bring per-row (mantissa, rescale count) pairs onto one shared scale.

    True values are mant * 2**(_SHIFT*counts).  Rows are shifted to the
    largest count with exact ldexp arithmetic, then normalized so the
    largest magnitude (per trailing axis) is 1.  Returns float64 mantissas
    and the float64 log scale; rows more than two rescale steps below the
    reference underflow to zero, which is far beyond binary64 resolution
    relative to the peak anyway.
    """
    cref = counts.max(axis=0)
    shift = (_SHIFT * (counts - cref)).astype(np.int32)
    vals = np.ldexp(mant, shift)
    mref = np.max(np.abs(vals), axis=0)
    mref = np.where(mref == 0, LD(1), mref)
    out = np.asarray(vals / mref, dtype=np.float64)
    log = np.asarray(np.log(mref) + cref * _DELTA, dtype=np.float64)
    return out, log


@dataclass
class SweepResult:
    """Raw output of one batched backward recursion.

    True row values are mantissa * 2**(_SHIFT*count) * exp(base_log).
    gm_log holds, per lambda, the log of the geometric mean of w_n * n^c
    over the tail window; dividing by its exponential is the package's
    normalization convention.
    """

    lams: np.ndarray  # (L,) float64
    lam_ld: np.ndarray  # (L,) longdouble, the values actually recursed
    M: int
    base_log: float
    w1: np.ndarray  # (L,) longdouble mantissas of row 1
    w2: np.ndarray  # (L,) longdouble mantissas of row 2
    counts: np.ndarray  # (L,) int64 rescale counts at end of sweep
    gm_log: np.ndarray  # (L,) float64
    rows: np.ndarray | None = None  # (n_store, L) float64, max |.| per column 1
    rows_log: np.ndarray | None = None  # (L,) float64 scale of rows

    def normalized_rows(self) -> np.ndarray:
        """Rows 1..n_store divided by the tail geometric mean, binary64."""
        if self.rows is None:
            raise ValueError("sweep was run without row storage")
        return self.rows * np.exp(self.rows_log - self.gm_log)


def backward_sweep(
    epsilon: float,
    lams,
    M: int,
    n_store: int = 0,
    gm_window: int = 100,
    seed_scale: float = 1.0,
) -> SweepResult:
    """Run the backward recursion from seeds at rows M+1, M+2 down to row 1.

    Seeds are the pure power law (M+i)^-c, carried as relative mantissas
    ((M+i)/M)^-c with base_log = -c log M.  lams may be a scalar or a 1-D
    array; one recursion per entry runs in lockstep.  Rows 1..n_store are
    stored when requested.  The geometric-mean window is [max(M-gm_window,
    ceil(2*lambda)+1), M], clamped per lambda so that only indexes past the
    turning point (where w is positive and enveloped) contribute.

    seed_scale multiplies both seeds; the recurrence is linear and the
    normalization divides any common factor back out, so results are
    invariant up to one rounding per entry.  Exposed for exactly that test.

    lams passed as a longdouble array keep their extra digits through the
    recursion (sub-binary64 root polishing); any other input is treated as
    binary64.
    """
    arr = np.atleast_1d(np.asarray(lams))
    if arr.dtype == LD:
        lam_ld = arr.astype(LD)
        lams = np.asarray(arr, dtype=np.float64)
    else:
        lams = np.asarray(arr, dtype=np.float64)
        lam_ld = lams.astype(LD)
    L = lams.size
    if M < 3 or n_store >= M:
        raise ValueError("need M >= 3 and n_store < M")

    eps_ld = LD(epsilon)
    c_ld = LD(1) + LD(1) / eps_ld
    base_log = float(-c_ld * np.log(LD(M)))

    w1 = np.full(L, LD(seed_scale) * ((LD(M) + 1) / LD(M)) ** (-c_ld))  # row M+1
    w2 = np.full(L, LD(seed_scale) * ((LD(M) + 2) / LD(M)) ** (-c_ld))  # row M+2
    wn = np.empty(L, dtype=LD)
    t = np.empty(L, dtype=LD)
    counts = np.zeros(L, dtype=np.int64)

    win_lo = np.maximum(M - gm_window, np.ceil(2.0 * lams).astype(np.int64) + 1)
    gm_sum = np.zeros(L, dtype=LD)
    gm_cnt = np.zeros(L, dtype=np.int64)

    if n_store > 0:
        st_m = np.empty((n_store, L), dtype=LD)
        st_c = np.empty((n_store, L), dtype=np.int64)

    for n in range(M, 0, -1):
        q1 = LD(n + 2) / LD(n)
        q2 = LD(2) / (eps_ld * LD(n) * LD(n + 1))
        np.subtract(LD(n + 1), lam_ld, out=t)
        np.multiply(t, w1, out=t)
        np.multiply(t, q2, out=t)
        np.multiply(w2, q1, out=wn)
        np.add(wn, t, out=wn)
        w2, w1, wn = w1, wn, w2

        np.abs(w1, out=t)
        if t.max() > _LIM:
            big = t > _LIM
            fac = np.where(big, _INV, LD(1))
            w1 *= fac
            w2 *= fac
            counts += big

        if n >= M - gm_window:
            mask = n >= win_lo
            if mask.any():
                np.abs(w1, out=t)
                np.log(t, out=t)
                t += counts * _DELTA
                t += c_ld * np.log(LD(n))
                gm_sum += np.where(mask, t, LD(0))
                gm_cnt += mask

        if n <= n_store:
            st_m[n - 1] = w1
            st_c[n - 1] = counts

    safe = np.maximum(gm_cnt, 1)
    gm_log = np.asarray(gm_sum / safe, dtype=np.float64) + base_log
    gm_log[gm_cnt == 0] = 0.0

    rows = rows_log = None
    if n_store > 0:
        rows, rows_log = unify_rows(st_m, st_c)
        rows_log += base_log

    return SweepResult(
        lams=lams,
        lam_ld=lam_ld,
        M=M,
        base_log=base_log,
        w1=w1,
        w2=w2,
        counts=counts,
        gm_log=gm_log,
        rows=rows,
        rows_log=rows_log,
    )


def f_values(epsilon: float, res: SweepResult):
    """Shooting residuals eps*w_2 + (1-lambda)*w_1 for a finished sweep.

    Returns (signs, log_abs) with signs in {-1, 0, +1} as int64 and log_abs
    the binary64 log magnitude after geometric-mean normalization (-inf for
    an exact zero).  Sign and magnitude are split because the raw residual
    spans far more dynamic range than binary64 holds.
    """
    raw = LD(epsilon) * res.w2 + (LD(1) - res.lam_ld) * res.w1
    signs = np.sign(raw).astype(np.int64)
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(raw))
    log_abs = (
        np.asarray(la + res.counts * _DELTA, dtype=np.float64)
        + res.base_log
        - res.gm_log
    )
    return signs, log_abs


def forward_sweep(epsilon: float, lam: float, n_top: int):
    """Forward recursion phi_1 = 1, phi_2 = 1/eps up to row n_top.

    Returns (mantissas, counts): longdouble mantissas and int64 rescale
    counts per row, with true values mantissa * 2**(_SHIFT*count).  This is
    the growing solution used to assemble resolvent kernels; it needs no
    geometric-mean bookkeeping.
    """
    if n_top < 2:
        raise ValueError("need n_top >= 2")
    eps_ld = LD(epsilon)
    lam_ld = LD(lam)
    mant = np.empty(n_top, dtype=LD)
    cnt = np.zeros(n_top, dtype=np.int64)
    mant[0] = LD(1)
    mant[1] = LD(1) / eps_ld
    prev, cur = mant[0], mant[1]
    c = 0
    for n in range(2, n_top):
        nxt = (LD(n) * LD(n - 1) * prev + (LD(2) * (LD(n) - lam_ld) / eps_ld) * cur) / (
            LD(n) * LD(n + 1)
        )
        if abs(nxt) > _LIM:
            prev = cur * _INV
            cur = nxt * _INV
            c += 1
        else:
            prev, cur = cur, nxt
        mant[n] = cur
        cnt[n] = c
    return mant, cnt
