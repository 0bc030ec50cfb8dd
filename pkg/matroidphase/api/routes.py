from typing import Optional

from fastapi import APIRouter, Depends, File, HTTPException, Query, UploadFile

from matroidphase.config import Settings, get_settings, settings
from matroidphase.deps import get_matrix_service
from matroidphase.models.schemas import (
    FindMinorRequest,
    FindMinorResponse,
    HealthResponse,
    MatrixUploadResponse,
    PeelResponse,
    ThresholdReport,
)
from matroidphase.services.thresholds import threshold_report
from matroidphase.utils.errors import (
    InstanceTooLargeError,
    MatrixFormatError,
    OutOfRangeError,
    TargetError,
    ThresholdError,
)

router = APIRouter()


@router.get("/health", response_model=HealthResponse)
async def health(matrix_service=Depends(get_matrix_service), app_settings: Settings = Depends(get_settings)):
    return HealthResponse(status="healthy", version=app_settings.APP_VERSION, matrices=len(matrix_service))


@router.get("/thresholds", response_model=ThresholdReport)
async def thresholds(k: int = Query(..., ge=2, le=64), d: Optional[float] = Query(default=None, ge=0.0)):
    try:
        return threshold_report(k, d)
    except OutOfRangeError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except ThresholdError as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/matrices", response_model=MatrixUploadResponse)
async def upload_matrix(
    file: UploadFile = File(...),
    matrix_service=Depends(get_matrix_service),
):
    if not file.filename.lower().endswith((".mat", ".txt")):
        raise HTTPException(status_code=400, detail="Only .mat or .txt files are supported.")

    raw = await file.read()
    if len(raw) > settings.MAX_FILE_SIZE_MB * 1024 * 1024:
        raise HTTPException(status_code=413, detail=f"File exceeds {settings.MAX_FILE_SIZE_MB} MB.")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(status_code=400, detail="File must be UTF-8 encoded.")

    if not text.strip():
        raise HTTPException(status_code=422, detail="File is empty.")

    try:
        mat_id = matrix_service.add_text(text, name=file.filename)
    except MatrixFormatError as e:
        raise HTTPException(status_code=422, detail=str(e))

    matrix = matrix_service.get(mat_id).matrix
    return MatrixUploadResponse(
        mat_id=mat_id,
        q=matrix.field.q,
        rows=matrix.n_rows,
        cols=matrix.n_cols,
        nnz=matrix.nnz,
    )


@router.get("/matrices/{mat_id}/peel", response_model=PeelResponse)
async def peel(mat_id: str, matrix_service=Depends(get_matrix_service)):
    if mat_id not in matrix_service.store:
        raise HTTPException(status_code=404, detail="mat_id not found. Upload a matrix first.")

    entry = matrix_service.peel(mat_id)
    pr = entry.peel
    return PeelResponse(
        mat_id=mat_id,
        core_rows=pr.core.n_rows,
        core_cols=pr.core.n_cols,
        peeled_cols=len(pr.peeled_cols),
        rank=entry.rank,
        row_fraction=pr.row_fraction,
        col_fraction=pr.col_fraction,
    )


@router.post("/find-minor", response_model=FindMinorResponse)
async def find_minor(req: FindMinorRequest, matrix_service=Depends(get_matrix_service)):
    if req.mat_id not in matrix_service.store:
        raise HTTPException(status_code=404, detail="mat_id not found. Upload a matrix first.")
    if req.target.startswith("file:"):
        raise HTTPException(status_code=400, detail="file: targets are not accepted over HTTP.")

    try:
        outcome = matrix_service.find(req.mat_id, req.target, req.mode, req.budget, req.seed)
    except TargetError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except InstanceTooLargeError as e:
        raise HTTPException(status_code=400, detail=str(e))

    return FindMinorResponse(
        mat_id=req.mat_id,
        target=req.target,
        found=outcome.found,
        failure_code=outcome.failure_code,
        attempts=outcome.attempts,
        witness=outcome.witness.summary(True) if outcome.found else None,
    )
