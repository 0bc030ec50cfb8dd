from fastapi import HTTPException, Request, status

from matroidphase.services.matrix_store import MatrixService


def get_matrix_service(request: Request) -> MatrixService:
    matrix_service = getattr(request.app.state, "matrix_service", None)

    if matrix_service is None:
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail="Matrix service is not ready",
        )

    return matrix_service
