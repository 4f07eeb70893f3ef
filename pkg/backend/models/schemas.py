"""
Pydantic schemas for the wire formats - certificate documents, scan rows,
job config and the HTTP request bodies
Rationals always travel as "num/den" strings so nothing gets rounded
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from models.data_models import DeficitCertificate, GirthReport, LemmaReport, LocalWitness
from services.graph_service import to_graph6
from utils.polyq import format_rational


# Base response schema - using this everywhere for consistency
class BaseResponse(BaseModel):
    """Standard response format"""
    success: bool = True
    message: str = ""
    data: Optional[Any] = None


class ErrorResponse(BaseModel):
    """Error response format"""
    success: bool = False
    message: str
    error: Optional[str] = None
    details: Optional[Dict[str, Any]] = None


# ---------------------------------------------------------------- inputs ---


class GraphInput(BaseModel):
    """Exactly one of the three graph forms"""
    g6: Optional[str] = Field(None, max_length=200, description="graph6 token")
    edges: Optional[str] = Field(None, max_length=20000, description="'u v' pairs, comma or newline separated")
    tree: Optional[str] = Field(None, max_length=2000, description="triangle-tree steps like 'e0,v2'")
    max_vertices: Optional[int] = Field(None, ge=1, le=30)

    @model_validator(mode="after")
    def exactly_one(self):
        given = [x for x in (self.g6, self.edges, self.tree) if x is not None]
        if len(given) != 1:
            raise ValueError("give exactly one of g6, edges, tree")
        return self


class DensityRequest(GraphInput):
    engine: Literal["direct", "recurrence"] = "direct"


class CertifyRequest(GraphInput):
    include_classes: bool = True
    include_lemmas: bool = False
    max_halvings: Optional[int] = Field(None, ge=1, le=1000)


class JobConfig(BaseModel):
    """Everything the CLI flags can change for one run"""
    inputs: List[str] = Field(default_factory=list)
    output: Optional[str] = None
    format: Literal["json", "csv"] = "json"
    max_vertices: int = Field(default_factory=lambda: settings.MAX_VERTICES, ge=1, le=30)
    max_subset_bits: int = Field(default_factory=lambda: settings.MAX_SUBSET_BITS, ge=1)
    jobs: int = Field(default_factory=lambda: settings.JOBS, ge=1)
    max_halvings: int = Field(default_factory=lambda: settings.MAX_HALVINGS, ge=1)
    timings: bool = False


# ------------------------------------------------------------- documents ---


class GraphInfo(BaseModel):
    graph6: str
    n: int
    m: int
    canonical: str


class ClassEntry(BaseModel):
    canon: str
    edge_count: int
    multiplicity: int
    delta_coeffs: List[str]


class CertificateDocument(BaseModel):
    # unknown fields from newer writers are dropped on re-verification
    model_config = ConfigDict(extra="ignore")

    schema_version: str = settings.SCHEMA_VERSION
    graph: GraphInfo
    applicable: bool
    reason: str = ""
    deficit_coeffs: List[str]
    c3: str
    witness_p: Optional[str] = None
    witness_value: Optional[str] = None
    classes: Optional[List[ClassEntry]] = None
    lemma_report: Dict[str, str] = Field(default_factory=dict)
    timings_ms: Dict[str, float] = Field(default_factory=dict)

    @classmethod
    def from_certificate(
        cls,
        certificate: DeficitCertificate,
        lemma_report: Optional[LemmaReport] = None,
        timings_ms: Optional[Dict[str, float]] = None,
    ) -> "CertificateDocument":
        graph = certificate.graph
        classes = None
        if certificate.classes is not None:
            classes = [
                ClassEntry(
                    canon=entry.subgraph_class.canon,
                    edge_count=entry.subgraph_class.edge_count,
                    multiplicity=entry.subgraph_class.multiplicity,
                    delta_coeffs=entry.delta.to_strings(),
                )
                for entry in certificate.classes
            ]
        return cls(
            graph=GraphInfo(graph6=to_graph6(graph), n=graph.n, m=graph.m, canonical=certificate.canonical),
            applicable=certificate.applicable,
            reason=certificate.reason,
            deficit_coeffs=certificate.deficit.to_strings(),
            c3=format_rational(certificate.c3),
            witness_p=None if certificate.witness_p is None else format_rational(certificate.witness_p),
            witness_value=None if certificate.witness_value is None else format_rational(certificate.witness_value),
            classes=classes,
            lemma_report=lemma_report.status_map() if lemma_report is not None else {},
            timings_ms=timings_ms or {},
        )


class ScanRow(BaseModel):
    """One line of a scan; CSV columns follow the field order"""
    canonical: str = ""
    n: Optional[int] = None
    m: Optional[int] = None
    girth: Optional[int] = None
    c3: str = ""
    applicable: Optional[bool] = None
    witness_p: str = ""
    witness_value: str = ""
    lemmas_pass: Optional[bool] = None
    input: str = ""
    error: str = ""

    @field_validator("input")
    @classmethod
    def strip_input(cls, v):
        return v.strip()


class LemmaSweepSummary(BaseModel):
    max_n: int
    graphs: int = 0
    pairs: int = 0
    failures: int = 0
    by_lemma: Dict[str, Dict[str, int]] = Field(default_factory=dict)
    failed_graphs: List[str] = Field(default_factory=list)


# --------------------------------------------------------------- views ---


def local_witness_view(witness: LocalWitness) -> Dict[str, Any]:
    return {
        "p": format_rational(witness.p),
        "epsilon0": format_rational(witness.epsilon0),
        "sampled_epsilons": [format_rational(x) for x in witness.sampled_epsilons],
        "values": [format_rational(x) for x in witness.values],
        "epsilon_coeffs": witness.epsilon_polynomial.to_strings(),
    }


def girth_view(report: GirthReport) -> Dict[str, Any]:
    return {
        "girth": report.girth,
        "deficit_coeffs": report.deficit.to_strings(),
        "lowest_index": report.lowest_index,
        "lowest_sign": report.lowest_sign,
    }
