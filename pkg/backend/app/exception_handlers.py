"""
Global exception handlers - every error leaves as the same JSON envelope
{"success": false, "message", "error", "status_code"}
"""
from fastapi import Request, status
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException
from app.config import settings
from utils.errors import CertifierError
import logging

logger = logging.getLogger(__name__)

# Map status codes to error codes
ERROR_CODE_MAP = {
    400: "BAD_REQUEST",
    404: "NOT_FOUND",
    405: "METHOD_NOT_ALLOWED",
    413: "PAYLOAD_TOO_LARGE",
    422: "VALIDATION_ERROR",
    500: "INTERNAL_SERVER_ERROR",
}


def _envelope(status_code: int, message: str, error: str, **extra) -> JSONResponse:
    return JSONResponse(
        status_code=status_code,
        content={"success": False, "message": message, "error": error, "status_code": status_code, **extra},
    )


async def certifier_exception_handler(request: Request, exc: CertifierError) -> JSONResponse:
    """Domain errors carry their own code and status"""
    if exc.status_code >= 500:
        logger.error(f"{exc.code} on {request.url.path}: {exc.message}")
    extra = {"reason": exc.reason} if exc.reason else {}
    return _envelope(exc.status_code, exc.message, exc.code, **extra)


async def http_exception_handler(request: Request, exc: StarletteHTTPException) -> JSONResponse:
    # Don't rewrap if it's already a formatted error response
    if isinstance(exc.detail, dict) and "success" in exc.detail:
        return JSONResponse(status_code=exc.status_code, content=exc.detail)
    detail = exc.detail if isinstance(exc.detail, str) else str(exc.detail)
    return _envelope(exc.status_code, detail, ERROR_CODE_MAP.get(exc.status_code, "HTTP_ERROR"))


async def validation_exception_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
    """Field-level details so a client can tell which input was wrong"""
    details = [
        {
            "field": ".".join(str(loc) for loc in error.get("loc", [])),
            "message": error.get("msg", "Validation error"),
            "type": error.get("type", "validation_error"),
        }
        for error in exc.errors()
    ]
    return _envelope(
        status.HTTP_422_UNPROCESSABLE_ENTITY,
        "Validation error: Please check your input",
        "VALIDATION_ERROR",
        details=details,
    )


async def general_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    """Anything unexpected - log it, don't leak it"""
    if settings.ENV_MODE == "development":
        logger.error(f"Unhandled exception: {type(exc).__name__}", exc_info=exc)
    else:
        logger.error(f"Unhandled exception: {type(exc).__name__}: {exc}")
    return _envelope(
        status.HTTP_500_INTERNAL_SERVER_ERROR,
        "An internal server error occurred. Please try again later.",
        "INTERNAL_SERVER_ERROR",
    )
