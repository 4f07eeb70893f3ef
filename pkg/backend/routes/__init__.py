"""
Routes package - combining all route modules
"""
from fastapi import APIRouter
from routes.certify import router as certify_router

# main API router
api_router = APIRouter()

api_router.include_router(certify_router, tags=["certify"])
