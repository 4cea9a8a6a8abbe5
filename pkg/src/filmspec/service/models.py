"""Request and response schemas for the HTTP service.

Every response shares one envelope: {meta: {epsilon, M, tol, version},
data: [...]}.  The CLI renders these envelopes to CSV or JSON without
recomputing anything, so field order here fixes column order there.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

DEFAULT_M = 4000
DEFAULT_TOL = 1e-8
DEFAULT_N_MAX = 400
DEFAULT_COUNT = 10


class Meta(BaseModel):
    model_config = ConfigDict(extra="allow")

    epsilon: float
    M: int
    tol: float
    version: str


class SpectrumRequest(BaseModel):
    epsilon: float
    count: int = Field(DEFAULT_COUNT, ge=1)
    M: int = Field(DEFAULT_M, ge=1000)
    tol: float = Field(DEFAULT_TOL, gt=0.0)
    step: float | None = Field(None, gt=0.0)
    proj: bool = False
    n_max: int = Field(DEFAULT_N_MAX, ge=2)  # rows kept when proj is on


class EigenvalueRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    index: int
    lambda_: float = Field(alias="lambda")
    bracket_lo: float
    bracket_hi: float
    proj_norm: float | None = None


class SpectrumResponse(BaseModel):
    meta: Meta
    data: list[EigenvalueRow]


class ScanRequest(BaseModel):
    epsilon: float
    lo: float
    hi: float
    step: float = Field(0.01, gt=0.0)
    M: int = Field(DEFAULT_M, ge=1000)


class ScanRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lambda_: float = Field(alias="lambda")
    sign: int
    log_abs: float


class ScanResponse(BaseModel):
    meta: Meta
    data: list[ScanRow]


class EigvecRequest(BaseModel):
    epsilon: float
    index: int = Field(1, ge=1)
    M: int = Field(DEFAULT_M, ge=1000)
    n_max: int = Field(DEFAULT_N_MAX, ge=2)
    tol: float = Field(DEFAULT_TOL, gt=0.0)
    grid: int = Field(0, ge=0)  # 0 = coefficient rows, else theta samples


class EntryRow(BaseModel):
    n: int
    v: float


class ThetaRow(BaseModel):
    theta: float
    re: float
    im: float
    abs: float


class EigvecResponse(BaseModel):
    meta: Meta
    data: list[EntryRow] | list[ThetaRow]


class ResolventRequest(BaseModel):
    epsilon: float
    n_max: int = Field(DEFAULT_N_MAX, ge=2)
    M: int = Field(DEFAULT_M, ge=5)
    n_cols: int = Field(50, ge=1)


class ResolventStats(BaseModel):
    n_max: int
    hs_norm: float
    hs_truncated: float
    hs_tail: float
    tail_constant: float
    identity_residual: float
    inverse_eigenvalue: float


class ResolventResponse(BaseModel):
    meta: Meta
    data: list[ResolventStats]


class TruncateRequest(BaseModel):
    epsilon: float
    sizes: list[int] = Field(default=[50, 100, 200, 400])
    count: int = Field(DEFAULT_COUNT, ge=1)
    M: int = Field(DEFAULT_M, ge=1000)
    tol: float = Field(1e-3, gt=0.0)


class TruncateRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    N: int
    index: int
    lambda_: float = Field(alias="lambda")
    nearest_re: float
    nearest_im: float
    distance: float
    matched: bool
    agreement_prefix: int
    non_real_count: int


class TruncateResponse(BaseModel):
    meta: Meta
    data: list[TruncateRow]


class VerifyRequest(BaseModel):
    # empty body runs the canonical suite; kept as a model so the endpoint
    # stays POST and future knobs do not break clients
    pass


class BoundRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    bound_id: str
    epsilon: float
    lambda_: float = Field(alias="lambda")
    N_emp: int
    window_end: int
    status: str


class VerifyResponse(BaseModel):
    meta: Meta
    data: list[BoundRow]


class FitRequest(BaseModel):
    epsilon: float
    count: int = Field(12, ge=3)
    M: int = Field(DEFAULT_M, ge=1000)
    tol: float = Field(DEFAULT_TOL, gt=0.0)
    lambdas: list[float] | None = None  # supplied spectrum skips computation
    indices: list[int] | None = None  # defaults to 1..len(lambdas)


class FitRow(BaseModel):
    alpha: float
    gamma: float
    n_points: int


class FitResponse(BaseModel):
    meta: Meta
    data: list[FitRow]


class HealthResponse(BaseModel):
    status: str
    version: str
