"""
Main FastAPI app - the certifier over HTTP
Same services as the CLI, wrapped in the usual response envelope
"""
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException
from app.config import settings
from app.exception_handlers import (
    certifier_exception_handler,
    http_exception_handler,
    validation_exception_handler,
    general_exception_handler,
)
from routes import api_router
from utils.errors import CertifierError
import logging

# Set up logging
logging.basicConfig(level=settings.LOG_LEVEL)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Triangle Certifier API",
    description="Exact U_p densities and certificates that graphs properly containing a triangle are not strongly common",
    version="1.0.0",
)

cors_origins = settings.CORS_ORIGINS
logger.info(f"CORS configured with origins: {cors_origins}")
app.add_middleware(
    CORSMiddleware,
    allow_origins=cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.add_exception_handler(CertifierError, certifier_exception_handler)
app.add_exception_handler(StarletteHTTPException, http_exception_handler)
app.add_exception_handler(RequestValidationError, validation_exception_handler)
app.add_exception_handler(Exception, general_exception_handler)

app.include_router(api_router, prefix="/api")


@app.get("/")
async def root():
    """Just a health check endpoint"""
    return {"status": "ok", "message": "Triangle Certifier API is running"}


@app.get("/health")
async def health():
    return {"status": "healthy", "env": settings.ENV_MODE}


@app.get("/version")
async def version():
    """App version plus the certificate schema version"""
    return {"app_version": app.version, "schema_version": settings.SCHEMA_VERSION}
