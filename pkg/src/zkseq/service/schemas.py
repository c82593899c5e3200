"""Request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class SequenceRequest(BaseModel):
    k: int = Field(ge=2)
    elements: list[int]
    mode: Literal["auto", "classical", "tweak"] = "auto"
    t: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    c1: float = 1.0
    c2: float = 1.0
    K: Optional[int] = Field(default=None, ge=1)
    R: Optional[int] = Field(default=None, ge=1)
    max_resamples: Optional[int] = Field(default=None, ge=1)
    max_retries: int = Field(default=1000, ge=1)
    oracle_fallback: bool = True


class OrderingPayload(BaseModel):
    k: int
    ordering: list[int]
    mode: Optional[str] = None
    t: Optional[int] = None
    seed: Optional[int] = None
    resamples: int = 0
    provenance: list[dict] = []
    flags: list[str] = []


class SequenceResponse(BaseModel):
    status: Literal["ok", "failed"]
    result: Optional[OrderingPayload] = None
    reason: Optional[str] = None
    flags: list[str] = []
    witnesses: list = []


class VerifyRequest(BaseModel):
    k: int = Field(ge=2)
    ordering: list[int]
    goal: Literal["valid", "sequencing", "tweak"] = "sequencing"
    t: Optional[int] = Field(default=None, ge=1)


class VerifyResponse(BaseModel):
    ok: bool
    goal: str
    t: Optional[int] = None
    k: int
    n: int
    witness: Optional[dict] = None


class DissociateRequest(BaseModel):
    k: int = Field(ge=2)
    elements: list[int]
    dimension: bool = False
    greedy: bool = False
    target_size: Optional[int] = Field(default=None, ge=0)


class DissociateResponse(BaseModel):
    k: int
    n: int
    dissociated: bool
    dimension: Optional[int] = None
    greedy: Optional[list[int]] = None


class RectifyRequest(BaseModel):
    k: int = Field(ge=2)
    elements: list[int]
    target: Optional[float] = Field(default=None, gt=0)


class RectifyResponse(BaseModel):
    status: Literal["ok", "failed"]
    k: int
    lam: Optional[int] = None
    max_abs: Optional[int] = None
    method: Optional[str] = None
    rectified: Optional[list[int]] = None
    reason: Optional[str] = None


class DecomposeRequest(BaseModel):
    k: int = Field(ge=2)
    elements: list[int]
    R: Optional[int] = Field(default=None, ge=1)
    c1: float = 1.0
    seed: int = 0
    tolerance: float = 2.0
    retries: int = Field(default=64, ge=1)
    mode: Literal["classical", "tweak"] = "tweak"


class DecomposeResponse(BaseModel):
    status: Literal["ok", "failed"]
    decomposition: Optional[dict] = None
    properties: Optional[dict] = None
    warnings: list[str] = []
    failed: list[str] = []


class OracleRequest(BaseModel):
    k: int = Field(ge=2)
    elements: list[int]
    goal: Literal["valid", "sequencing", "tweak"] = "sequencing"
    t: Optional[int] = Field(default=None, ge=1)


class OracleResponse(BaseModel):
    k: int
    goal: str
    t: Optional[int] = None
    achievable: bool
    witness: Optional[list[int]] = None


class CensusRequest(BaseModel):
    k: int = Field(ge=2)
    max_size: int = Field(ge=1)
    goal: Literal["valid", "sequencing", "tweak"] = "sequencing"
    t: Optional[int] = Field(default=None, ge=1)


class CensusResponse(BaseModel):
    k: int
    max_size: int
    goal: str
    columns: list[str]
    rows: list[dict]
    counts: dict
    failures: int


class AnticoncentrationRequest(BaseModel):
    k: int = Field(ge=2)
    elements: list[int]
    I: list[int]
    x: int
    trials: int = Field(ge=1)
    seed: int = 0


class AcceptabilityRequest(BaseModel):
    k: int = Field(ge=2)
    elements: list[int]
    K: Optional[int] = Field(default=None, ge=1)
    R: Optional[int] = Field(default=None, ge=1)
    trials: int = Field(ge=1)
    seed: int = 0


class PermissibleDensityRequest(BaseModel):
    k: int = Field(ge=2)
    left: list[int]
    right: list[int]
    K: int = Field(ge=1)
    trials: int = Field(ge=1)
    seed: int = 0


class LLLBudgetRequest(BaseModel):
    p_hat: float = Field(ge=0.0, le=1.0)
    degree: Optional[int] = Field(default=None, ge=0)
    k: Optional[int] = Field(default=None, ge=2)
    elements: Optional[list[int]] = None
    t: Optional[int] = Field(default=None, ge=1)
    R: Optional[int] = Field(default=None, ge=1)
    K: Optional[int] = Field(default=None, ge=1)
    seed: int = 0


class UnionBoundRequest(BaseModel):
    a_size: int = Field(ge=0)
    R: int = Field(ge=1)
    type_i: float = Field(default=0.0, ge=0.0, le=1.0)
    type_ii: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = 0


class ReportResponse(BaseModel):
    status: Literal["ok"] = "ok"
    report: dict
