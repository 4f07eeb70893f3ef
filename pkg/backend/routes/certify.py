"""
Certificate and density routes - thin wrappers, the services do the work
Domain errors propagate to the global handlers so the envelope stays uniform.
Handlers are plain def: the exact enumeration is CPU bound and runs in the threadpool
"""
from fastapi import APIRouter

from models.schemas import (
    BaseResponse,
    CertificateDocument,
    CertifyRequest,
    DensityRequest,
    GraphInput,
    girth_view,
    local_witness_view,
)
from services.certify_service import CertifyService
from services.graph_service import Graph, canonical_form, parse_graph_input
from utils.polyq import format_rational

router = APIRouter()
service = CertifyService()


def _graph(body: GraphInput) -> Graph:
    return parse_graph_input(g6=body.g6, edges=body.edges, tree=body.tree, max_vertices=body.max_vertices)


@router.post("/certify", response_model=BaseResponse)
def certify(body: CertifyRequest):
    """Certificate document; not-applicable graphs still get one, with a reason"""
    graph = _graph(body)
    certificate = service.certify_not_strongly_common(
        graph, include_classes=body.include_classes, max_halvings=body.max_halvings
    )
    report = service.verify_lemma_suite(graph) if body.include_lemmas else None
    document = CertificateDocument.from_certificate(certificate, lemma_report=report)
    message = "Certified" if certificate.applicable else f"Not applicable: {certificate.reason}"
    return BaseResponse(success=True, message=message, data=document.model_dump(mode="json"))


@router.post("/density", response_model=BaseResponse)
def density(body: DensityRequest):
    graph = _graph(body)
    if body.engine == "recurrence":
        t = service.density.hom_density_recurrence(graph)
    else:
        t = service.density.hom_density(graph)
    return BaseResponse(
        success=True,
        message="Density computed",
        data={"canonical": canonical_form(graph), "engine": body.engine, "coeffs": t.to_strings()},
    )


@router.post("/delta", response_model=BaseResponse)
def delta(body: GraphInput):
    report = service.delta(_graph(body))
    return BaseResponse(
        success=True,
        message="Delta computed",
        data={
            "canonical": report.graph,
            "edge_count": report.edge_count,
            "delta_coeffs": report.delta.to_strings(),
            "c3": format_rational(report.c3),
            "p3_divisible": report.p3_divisible,
            "p4_divisible": report.p4_divisible,
            "has_triangle": report.has_triangle,
        },
    )


@router.post("/local", response_model=BaseResponse)
def local(body: GraphInput):
    graph = _graph(body)
    witness = service.local_witness(graph)
    return BaseResponse(
        success=True, message="Local witness found", data={"canonical": canonical_form(graph), **local_witness_view(witness)}
    )


@router.post("/explore-girth", response_model=BaseResponse)
def explore_girth(body: GraphInput):
    graph = _graph(body)
    report = service.girth_explorer(graph)
    return BaseResponse(
        success=True, message="Girth data", data={"canonical": canonical_form(graph), **girth_view(report)}
    )
