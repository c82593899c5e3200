"""HTTP service exposing the library.

Domain failures (a construction that could not be completed, an infeasible
set) are 200 responses with status "failed"; malformed requests are 422.
"""
from __future__ import annotations

import random

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, mc, oracle, verify
from ..dissociation import dimension, greedy_max_dissociated, is_dissociated
from ..pipeline import (ConstructionFailed, PipelineConfig, derive_K,
                        lll_dependency_degree, sequence, split_blocks)
from ..rectification import rectify_auto
from ..structure import (DecompositionError, StructureConfig, compute_R_classical,
                         compute_R_tweak, decompose, validate_decomposition)
from ..zk import GroundSet
from . import schemas

app = FastAPI(title="zkseq", version=__version__)


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


def _ground_set(k: int, elements) -> GroundSet:
    return GroundSet.of(k, elements, allow_zero=False)


@app.get("/")
def root():
    return {
        "name": "zkseq",
        "version": __version__,
        "endpoints": [
            "/sequence", "/verify",
            "/tools/dissociate", "/tools/rectify", "/tools/decompose",
            "/tools/oracle", "/tools/census",
            "/tools/mc/anticoncentration", "/tools/mc/acceptability",
            "/tools/mc/permissible-density", "/tools/mc/lll-budget",
            "/tools/mc/union-bound",
        ],
    }


@app.post("/sequence", response_model=schemas.SequenceResponse)
def sequence_endpoint(req: schemas.SequenceRequest):
    A = _ground_set(req.k, req.elements)
    cfg = PipelineConfig(mode=req.mode, t=req.t, K=req.K, R=req.R,
                         c1=req.c1, c2=req.c2, max_resamples=req.max_resamples,
                         max_retries=req.max_retries, seed=req.seed,
                         oracle_fallback=req.oracle_fallback)
    try:
        fo = sequence(A, cfg)
    except ConstructionFailed as exc:
        return schemas.SequenceResponse(status="failed", reason=exc.reason,
                                        flags=exc.flags,
                                        witnesses=[list(w) for w in exc.witnesses])
    payload = schemas.OrderingPayload(flags=fo.flags, **fo.to_json_dict())
    return schemas.SequenceResponse(status="ok", result=payload)


@app.post("/verify", response_model=schemas.VerifyResponse)
def verify_endpoint(req: schemas.VerifyRequest):
    goal = req.goal
    if goal == "tweak" and req.t is None:
        raise ValueError("goal 'tweak' needs t")
    witness = verify.explain_failure(list(req.ordering), req.k, goal, req.t)
    return schemas.VerifyResponse(ok=witness is None, goal=goal, t=req.t,
                                  k=req.k, n=len(req.ordering), witness=witness)


@app.post("/tools/dissociate", response_model=schemas.DissociateResponse)
def dissociate_endpoint(req: schemas.DissociateRequest):
    B = _ground_set(req.k, req.elements)
    resp = schemas.DissociateResponse(k=req.k, n=len(B), dissociated=is_dissociated(B))
    if req.dimension:
        resp.dimension = dimension(B)
    if req.greedy:
        resp.greedy = greedy_max_dissociated(B, target_size=req.target_size)
    return resp


@app.post("/tools/rectify", response_model=schemas.RectifyResponse)
def rectify_endpoint(req: schemas.RectifyRequest):
    B = _ground_set(req.k, req.elements)
    result = rectify_auto(B, target=req.target)
    rectified = sorted(e * result.lam % req.k for e in B.elements)
    return schemas.RectifyResponse(status="ok", k=req.k, lam=result.lam,
                                   max_abs=result.max_abs, method=result.method,
                                   rectified=rectified)


@app.post("/tools/decompose", response_model=schemas.DecomposeResponse)
def decompose_endpoint(req: schemas.DecomposeRequest):
    A = _ground_set(req.k, req.elements)
    p = A.modulus.p
    if req.R is not None:
        R = req.R
    elif req.mode == "classical":
        R = compute_R_classical(p, len(A), req.c1)
    else:
        R = compute_R_tweak(p, req.c1)
    try:
        D = decompose(A, R, StructureConfig(tolerance=req.tolerance,
                                            retries=req.retries, seed=req.seed))
    except DecompositionError as exc:
        return schemas.DecomposeResponse(status="failed", failed=exc.failed)
    report = validate_decomposition(D, A)
    return schemas.DecomposeResponse(status="ok",
                                     decomposition=D.to_json_dict(),
                                     properties=report.properties,
                                     warnings=report.warnings)


@app.post("/tools/oracle", response_model=schemas.OracleResponse)
def oracle_endpoint(req: schemas.OracleRequest):
    A = _ground_set(req.k, req.elements)
    if req.goal == "tweak" and req.t is None:
        raise ValueError("goal 'tweak' needs t")
    witness = oracle.brute_force(A, req.goal, req.t)
    return schemas.OracleResponse(k=req.k, goal=req.goal, t=req.t,
                                  achievable=witness is not None,
                                  witness=witness)


@app.post("/tools/census", response_model=schemas.CensusResponse)
def census_endpoint(req: schemas.CensusRequest):
    if req.goal == "tweak" and req.t is None:
        raise ValueError("goal 'tweak' needs t")
    report = oracle.census(req.k, req.max_size, req.goal, req.t)
    counts = {str(size): list(pair) for size, pair in sorted(report.counts.items())}
    return schemas.CensusResponse(k=req.k, max_size=req.max_size, goal=report.goal,
                                  columns=list(oracle.CENSUS_COLUMNS),
                                  rows=report.rows, counts=counts,
                                  failures=report.failures)


@app.post("/tools/mc/anticoncentration", response_model=schemas.ReportResponse)
def mc_anticoncentration(req: schemas.AnticoncentrationRequest):
    D = _ground_set(req.k, req.elements)
    report = mc.estimate_anticoncentration(D, req.I, req.x, req.trials, req.seed)
    return schemas.ReportResponse(report=report.to_json_dict())


def _fixture(k: int, elements, R, K, seed: int):
    """Decompose and order a set so the mc estimators have a live fixture."""
    from ..pipeline import _decompose_for, _order_for

    A = _ground_set(k, elements)
    cfg = PipelineConfig(seed=seed)
    R = R if R else compute_R_tweak(A.modulus.p, 1.0)
    K = K if K else derive_K(R)
    decomp = _decompose_for(A, R, cfg, seed)
    pn = _order_for(decomp, K, cfg, seed)
    return decomp, pn, K


@app.post("/tools/mc/acceptability", response_model=schemas.ReportResponse)
def mc_acceptability(req: schemas.AcceptabilityRequest):
    try:
        decomp, pn, K = _fixture(req.k, req.elements, req.R, req.K, req.seed)
    except (DecompositionError, ConstructionFailed) as exc:
        raise ValueError(f"could not build fixture: {exc}")
    if decomp.s < 1:
        raise ValueError("fixture decomposed with no blocks; acceptability needs one")
    report = mc.estimate_acceptability(decomp, pn, K, req.trials, req.seed)
    return schemas.ReportResponse(report=report.to_json_dict())


@app.post("/tools/mc/permissible-density", response_model=schemas.ReportResponse)
def mc_permissible_density(req: schemas.PermissibleDensityRequest):
    report = mc.estimate_permissible_density(req.left, req.right, req.K,
                                             req.trials, req.seed, k=req.k)
    return schemas.ReportResponse(report=report.to_json_dict())


@app.post("/tools/mc/lll-budget", response_model=schemas.ReportResponse)
def mc_lll_budget(req: schemas.LLLBudgetRequest):
    if req.degree is not None:
        report = mc.lll_budget_report(req.p_hat, req.degree, seed=req.seed)
        return schemas.ReportResponse(report=report.to_json_dict())
    if req.k is None or req.elements is None or req.t is None:
        raise ValueError("pass degree, or k + elements + t to build a plan")
    try:
        decomp, pn, K = _fixture(req.k, req.elements, req.R, req.K, req.seed)
    except (DecompositionError, ConstructionFailed) as exc:
        raise ValueError(f"could not build fixture: {exc}")
    if decomp.s < 1:
        raise ValueError("fixture decomposed with no blocks; no plan to analyze")
    plan = split_blocks(decomp, K, random.Random(req.seed), seed=req.seed)
    report = mc.lll_budget_report(req.p_hat, plan=plan, t=req.t, seed=req.seed)
    return schemas.ReportResponse(report=report.to_json_dict())


@app.post("/tools/mc/union-bound", response_model=schemas.ReportResponse)
def mc_union_bound(req: schemas.UnionBoundRequest):
    report = mc.union_bound_report(req.a_size, req.R,
                                   {"type_i": req.type_i, "type_ii": req.type_ii},
                                   seed=req.seed)
    return schemas.ReportResponse(report=report.to_json_dict())
