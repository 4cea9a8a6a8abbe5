"""HTTP service wrapping the solver.

One POST endpoint per computation, all returning the common envelope
{meta, data}.  Domain errors map to status codes the CLI translates into
exit codes: ConfigError and request validation are client errors (422),
anything that failed during a well-posed computation is a 409.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..bounds import run_verify_suite
from ..eigensolver import (
    EigenvalueRecord,
    compute_spectrum,
    fit_power_law,
    scan_profile,
    suspect_minima,
)
from ..errors import ConfigError, FilmspecError
from ..resolvent import (
    assemble_kernel,
    build_fundamental_pair,
    hs_norm_parts,
    power_iteration,
    verify_inverse_identity,
)
from ..spectral import build_eigenvector, projection_norm, synthesize_theta_samples
from ..truncation import build_truncated_matrix, compare_spectra, dense_eigenvalues
from . import models as m

app = FastAPI(title="filmspec", version=__version__)


@app.exception_handler(FilmspecError)
async def _domain_error(request, exc: FilmspecError):
    status = 422 if isinstance(exc, ConfigError) else 409
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.exception_handler(OverflowError)
async def _overflow_error(request, exc: OverflowError):
    return JSONResponse(
        status_code=409,
        content={"error": "OverflowError", "detail": str(exc)},
    )


def _meta(epsilon: float, M: int, tol: float, **extra) -> m.Meta:
    return m.Meta(epsilon=epsilon, M=M, tol=tol, version=__version__, **extra)


@app.get("/health", response_model=m.HealthResponse)
def health() -> m.HealthResponse:
    return m.HealthResponse(status="ok", version=__version__)


@app.post("/v1/spectrum", response_model=m.SpectrumResponse)
def spectrum(req: m.SpectrumRequest) -> m.SpectrumResponse:
    records = compute_spectrum(req.epsilon, req.count, M=req.M, tol=req.tol, step=req.step)
    rows = []
    for rec in records:
        proj = None
        if req.proj:
            vec = build_eigenvector(req.epsilon, rec, n_max=req.n_max)
            proj = projection_norm(vec).proj_norm
        rows.append(
            m.EigenvalueRow(
                index=rec.index,
                lambda_=rec.lambda_,
                bracket_lo=rec.bracket[0],
                bracket_hi=rec.bracket[1],
                proj_norm=proj,
            )
        )
    return m.SpectrumResponse(meta=_meta(req.epsilon, req.M, req.tol), data=rows)


@app.post("/v1/scan", response_model=m.ScanResponse)
def scan(req: m.ScanRequest) -> m.ScanResponse:
    grid, signs, log_abs = scan_profile(req.epsilon, req.lo, req.hi, req.step, req.M)
    suspects = [float(s) for s in suspect_minima(grid, signs, log_abs)]
    rows = [
        m.ScanRow(lambda_=float(grid[i]), sign=int(signs[i]), log_abs=float(log_abs[i]))
        for i in range(len(grid))
    ]
    meta = _meta(req.epsilon, req.M, 0.0, step=req.step, suspects=suspects)
    return m.ScanResponse(meta=meta, data=rows)


@app.post("/v1/eigenvector", response_model=m.EigvecResponse)
def eigenvector(req: m.EigvecRequest) -> m.EigvecResponse:
    records = compute_spectrum(req.epsilon, req.index, M=req.M, tol=req.tol)
    vec = build_eigenvector(req.epsilon, records[-1], n_max=req.n_max)
    meta = _meta(
        req.epsilon,
        req.M,
        req.tol,
        index=vec.index,
        eigenvalue=vec.lambda_,
        peak_index=vec.peak_index,
    )
    if req.grid == 0:
        vals = vec.values()
        rows = [m.EntryRow(n=i + 1, v=float(vals[i])) for i in range(len(vals))]
        return m.EigvecResponse(meta=meta, data=rows)
    samples = synthesize_theta_samples(vec, req.grid)
    rows = [
        m.ThetaRow(theta=t, re=z.real, im=z.imag, abs=abs(z)) for t, z in samples
    ]
    return m.EigvecResponse(meta=meta, data=rows)


@app.post("/v1/resolvent", response_model=m.ResolventResponse)
def resolvent(req: m.ResolventRequest) -> m.ResolventResponse:
    pair = build_fundamental_pair(req.epsilon, req.n_max, req.M)
    kernel = assemble_kernel(pair)
    parts = hs_norm_parts(kernel)
    residual = verify_inverse_identity(req.epsilon, kernel, req.n_cols)
    stats = m.ResolventStats(
        n_max=kernel.n_max,
        hs_norm=parts.total,
        hs_truncated=parts.truncated,
        hs_tail=parts.tail,
        tail_constant=parts.constant,
        identity_residual=residual,
        inverse_eigenvalue=power_iteration(kernel),
    )
    return m.ResolventResponse(meta=_meta(req.epsilon, req.M, 0.0), data=[stats])


@app.post("/v1/truncation", response_model=m.TruncateResponse)
def truncation(req: m.TruncateRequest) -> m.TruncateResponse:
    if not req.sizes:
        raise ConfigError("sizes must be a nonempty list of matrix orders")
    records = compute_spectrum(req.epsilon, req.count, M=req.M)
    rows = []
    for N in sorted(req.sizes):
        trunc = dense_eigenvalues(build_truncated_matrix(req.epsilon, N))
        report = compare_spectra(trunc, records, req.tol)
        for match in report.matches:
            rows.append(
                m.TruncateRow(
                    N=N,
                    index=match.index,
                    lambda_=match.lambda_,
                    nearest_re=match.nearest.real,
                    nearest_im=match.nearest.imag,
                    distance=match.distance,
                    matched=match.distance <= req.tol,
                    agreement_prefix=report.agreement_prefix,
                    non_real_count=report.non_real_count,
                )
            )
    return m.TruncateResponse(meta=_meta(req.epsilon, req.M, req.tol), data=rows)


@app.post("/v1/bounds", response_model=m.VerifyResponse)
def bounds(req: m.VerifyRequest) -> m.VerifyResponse:
    rows = [
        m.BoundRow(
            bound_id=r.bound_id,
            epsilon=r.params.epsilon,
            lambda_=r.params.lambda_,
            N_emp=r.N_emp,
            window_end=r.window_end,
            status="pass" if r.passed else "fail",
        )
        for r in run_verify_suite()
    ]
    # the suite spans many parameter sets, so the envelope slots are zeroed
    return m.VerifyResponse(meta=_meta(0.0, 0, 0.0), data=rows)


@app.post("/v1/fit", response_model=m.FitResponse)
def fit(req: m.FitRequest) -> m.FitResponse:
    if req.lambdas is not None:
        indices = req.indices or list(range(1, len(req.lambdas) + 1))
        if len(indices) != len(req.lambdas):
            raise ConfigError(
                f"{len(req.indices)} indices for {len(req.lambdas)} lambdas"
            )
        records = [
            EigenvalueRecord(
                index=idx, lambda_=lam, bracket=(lam, lam),
                residual_sign_gap=0.0, M=0,
            )
            for idx, lam in zip(indices, req.lambdas)
        ]
    else:
        records = compute_spectrum(req.epsilon, req.count, M=req.M, tol=req.tol)
    alpha, gamma = fit_power_law(records)
    row = m.FitRow(alpha=alpha, gamma=gamma, n_points=len(records))
    return m.FitResponse(meta=_meta(req.epsilon, req.M, req.tol), data=[row])
