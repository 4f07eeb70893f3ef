"""
Config stuff - loading env vars and setting defaults
Using pydantic-settings so every budget can be overridden from the env or .env
"""
from pydantic_settings import BaseSettings
from pydantic import ConfigDict, field_validator, computed_field, Field
from typing import List
import json


class Settings(BaseSettings):
    ENV_MODE: str = "development"  # development, production, testing
    LOG_LEVEL: str = "INFO"

    # certificate documents are versioned so old files stay re-verifiable
    SCHEMA_VERSION: str = "1.0"

    # Graph size caps - the type never goes past 30 vertices, the default
    # operational cap is 24 (2^24 block assignments is the desk-scale budget)
    VERTEX_HARD_CAP: int = Field(default=30, ge=1, le=62)
    MAX_VERTICES: int = Field(default=24, ge=1, le=30)

    # edge subsets of positive even size are enumerated as 2^(e-1) masks
    MAX_SUBSET_BITS: int = Field(default=26, ge=1)

    # density engines: k^v block assignments
    ASSIGNMENT_BUDGET: int = Field(default=2 ** 24, ge=1)
    # oracle: product operations of the naive nested enumeration
    ORACLE_BUDGET: int = Field(default=10 ** 8, ge=1)

    # canonical labels: refine and individualize until the cells allow at most
    # CANON_LEAF_BATCH relabelings, then take the minimum over those in one numpy batch
    CANON_LEAF_BATCH: int = Field(default=40_320, ge=1)
    CANON_REFINED_MAX: int = Field(default=16, ge=1)
    CANON_PERMUTATION_BUDGET: int = Field(default=4_000_000, ge=1)

    # recurrence memo only keeps graphs with at most this many non-isolated vertices
    MEMO_MAX_VERTICES: int = Field(default=10, ge=0)

    # at this many vertices the histogram switches to the numpy chunked path
    VECTORIZE_MIN_VERTICES: int = Field(default=16, ge=2)

    # lemma checks over nonadjacent pairs are skipped in scans above this size
    PAIR_CHECK_MAX_VERTICES: int = Field(default=10, ge=0)

    # witness search
    MAX_HALVINGS: int = Field(default=64, ge=1)
    LOCAL_SAMPLES: int = Field(default=3, ge=1)

    # worker pool for scan / lemma sweeps
    JOBS: int = Field(default=1, ge=1)

    # HTTP surface
    PORT: int = Field(default=8000, description="Server port")

    # Stored as a raw string so pydantic-settings doesn't try to JSON-decode it
    cors_origins_raw: str = Field(default="", validation_alias="CORS_ORIGINS", exclude=True)

    @field_validator('cors_origins_raw', mode='before')
    @classmethod
    def parse_cors_origins_raw(cls, v):
        """Store raw CORS_ORIGINS value as string, handling None and list inputs"""
        if v is None:
            return ""
        if isinstance(v, list):
            return ",".join(str(origin) for origin in v)
        return str(v) if v else ""

    @computed_field
    @property
    def CORS_ORIGINS(self) -> List[str]:
        """Parse CORS_ORIGINS from a JSON list or a comma-separated string"""
        default_origins = [
            "http://localhost:3000",
            "http://localhost:5173",
            "http://127.0.0.1:3000",
        ]
        v = self.cors_origins_raw.strip()
        if not v:
            return default_origins
        if v.startswith('['):
            try:
                parsed = json.loads(v)
                if isinstance(parsed, list):
                    origins = [str(origin).rstrip('/') for origin in parsed]
                    return origins if origins else default_origins
            except (json.JSONDecodeError, ValueError):
                pass
        origins = [origin.strip().rstrip('/') for origin in v.split(',') if origin.strip()]
        return origins if origins else default_origins

    model_config = ConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


# singleton - imported everywhere, services accept an override for tests and the CLI
settings = Settings()
