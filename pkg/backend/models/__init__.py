# models package
from models.schemas import BaseResponse, ErrorResponse

__all__ = ["BaseResponse", "ErrorResponse"]
