"""Finite-section truncation harness.

Cutting the infinite tridiagonal matrix to its leading N x N corner and
feeding it to a dense eigensolver is the naive approach this package's
shooting method replaces.  The harness exists to demonstrate why: the
truncated spectra drift, go complex, and converge poorly for higher
indexes.  Comparisons against shooting results quantify that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigensolver import EigenvalueRecord
from .errors import ConfigError, ConvergenceError

MAX_DENSE_N = 2000


@dataclass(frozen=True)
class TruncatedMatrix:
    """Leading N x N corner, rows/columns indexed 1..N, stored by bands."""

    N: int
    sub: np.ndarray  # entries (n, n-1) = (eps/2) n(n-1), n = 2..N
    diag: np.ndarray  # entries (n, n) = n
    super_: np.ndarray  # entries (n, n+1) = -(eps/2) n(n+1), n = 1..N-1

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        a += np.diag(self.sub, -1)
        a += np.diag(self.super_, 1)
        return a


@dataclass(frozen=True)
class MatchEntry:
    index: int
    lambda_: float
    nearest: complex
    distance: float


@dataclass(frozen=True)
class ComparisonReport:
    N: int
    tol: float
    matches: list[MatchEntry]
    non_real_count: int  # truncated eigenvalues with |Im| > tol
    agreement_prefix: int  # largest k with indexes 1..k all matched within tol


def build_truncated_matrix(eps: float, N: int) -> TruncatedMatrix:
    if N < 2:
        raise ConfigError(f"N must be >= 2, got {N}")
    n = np.arange(1, N + 1, dtype=np.float64)
    return TruncatedMatrix(
        N=N,
        sub=0.5 * eps * n[1:] * (n[1:] - 1.0),
        diag=n,
        super_=-0.5 * eps * n[:-1] * (n[:-1] + 1.0),
    )


def dense_eigenvalues(m: TruncatedMatrix) -> list[complex]:
    """All N eigenvalues via dense nonsymmetric QR (LAPACK), sorted by
    (real, imag) for determinism.  Conjugate pairs come out exact because
    the input is real."""
    if m.N > MAX_DENSE_N:
        raise ConfigError(f"N={m.N} exceeds dense ceiling {MAX_DENSE_N}")
    try:
        vals = np.linalg.eigvals(m.to_dense())
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"dense eigensolver failed for N={m.N}: {exc}")
    order = np.lexsort((vals.imag, vals.real))
    return [complex(v) for v in vals[order]]


def compare_spectra(
    trunc: list[complex], shooting: list[EigenvalueRecord], tol: float
) -> ComparisonReport:
    """Nearest-distance report of shooting eigenvalues against a truncated
    spectrum.  agreement_prefix is the number of leading shooting indexes
    matched within tol before the first miss."""
    if not trunc or not shooting:
        raise ConfigError("both spectra must be nonempty")
    tv = np.asarray(trunc, dtype=np.complex128)
    matches: list[MatchEntry] = []
    prefix = 0
    prefix_alive = True
    for rec in sorted(shooting, key=lambda r: r.index):
        d = np.abs(tv - rec.lambda_)
        j = int(np.argmin(d))
        dist = float(d[j])
        matches.append(
            MatchEntry(
                index=rec.index,
                lambda_=rec.lambda_,
                nearest=complex(tv[j]),
                distance=dist,
            )
        )
        if prefix_alive and dist <= tol:
            prefix += 1
        else:
            prefix_alive = False
    non_real = int(np.sum(np.abs(tv.imag) > tol))
    n_trunc = len(trunc)
    return ComparisonReport(
        N=n_trunc,
        tol=tol,
        matches=matches,
        non_real_count=non_real,
        agreement_prefix=prefix,
    )
