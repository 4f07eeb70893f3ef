"""
Command line surface - python -m app.cli <command> ...
Documents go to stdout (or --output), logs go to stderr
Exit codes: 0 certified / ok, 1 input, budget or verification error,
2 not applicable, 3 partial failure (scan rows with errors, lemma failures)
"""
import argparse
import csv
import io
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from app.config import settings
from models.data_models import StepKernel
from models.schemas import (
    CertificateDocument,
    JobConfig,
    ScanRow,
    girth_view,
    local_witness_view,
)
from services.certify_service import CertifyService, verify_certificate_document
from services.density_service import DensityService, affine_kernel, up_kernel
from services.graph_service import Graph, canonical_form, parse_graph_input
from services.sweep_service import SweepService, job_settings
from utils.errors import CertifierError, NotApplicableError
from utils.polyq import format_rational, to_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_APPLICABLE = 2
EXIT_PARTIAL = 3

LEMMA_SWEEP_MAX_N = 8


def _dump(payload: Any) -> str:
    # sorted keys + fixed indent keeps repeated runs byte-identical
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _job_config(args) -> JobConfig:
    return JobConfig(
        inputs=[args.input] if getattr(args, "input", None) else [],
        output=args.output,
        format=getattr(args, "format", "json"),
        max_vertices=args.max_vertices or settings.MAX_VERTICES,
        max_subset_bits=args.max_subset_bits or settings.MAX_SUBSET_BITS,
        jobs=getattr(args, "jobs", None) or settings.JOBS,
        max_halvings=args.max_halvings or settings.MAX_HALVINGS,
        timings=getattr(args, "timings", False),
    )


def _graph(args, config: JobConfig) -> Graph:
    return parse_graph_input(g6=args.g6, edges=args.edges, tree=args.tree, max_vertices=config.max_vertices)


def _service(config: JobConfig) -> CertifyService:
    return CertifyService(job_settings(config))


# --------------------------------------------------------------- commands ---


def cmd_certify(args) -> int:
    config = _job_config(args)
    graph = _graph(args, config)
    service = _service(config)
    timings: Dict[str, float] = {}

    started = time.perf_counter()
    certificate = service.certify_not_strongly_common(
        graph, include_classes=not args.no_classes, max_halvings=config.max_halvings
    )
    timings["certify"] = round((time.perf_counter() - started) * 1000, 3)

    report = None
    if not args.no_lemmas:
        started = time.perf_counter()
        report = service.verify_lemma_suite(graph)
        timings["lemmas"] = round((time.perf_counter() - started) * 1000, 3)

    document = CertificateDocument.from_certificate(
        certificate, lemma_report=report, timings_ms=timings if config.timings else None
    )
    _emit(_dump(document.model_dump(mode="json")), config.output)
    if not certificate.applicable:
        logger.warning(f"{certificate.canonical}: not applicable ({certificate.reason})")
        return EXIT_NOT_APPLICABLE
    return EXIT_OK


def _read_lines(path: Optional[str]) -> List[str]:
    if path is None or path == "-":
        return sys.stdin.read().splitlines()
    return Path(path).read_text(encoding="utf-8").splitlines()


def _rows_csv(rows: List[ScanRow]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(ScanRow.model_fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        record = row.model_dump()
        writer.writerow({k: "" if v is None else v for k, v in record.items()})
    return buffer.getvalue()


def cmd_scan(args) -> int:
    config = _job_config(args)
    rows = SweepService(config).scan(_read_lines(args.input))
    if config.format == "csv":
        _emit(_rows_csv(rows), config.output)
    else:
        _emit(_dump([row.model_dump(mode="json") for row in rows]), config.output)
    return EXIT_PARTIAL if any(row.error for row in rows) else EXIT_OK


def cmd_lemmas(args) -> int:
    if args.max_n > LEMMA_SWEEP_MAX_N:
        logger.error(f"--max-n {args.max_n} is past the sweep budget of {LEMMA_SWEEP_MAX_N}")
        return EXIT_ERROR
    config = _job_config(args)
    summary = SweepService(config).lemma_sweep(args.max_n)
    _emit(_dump(summary.model_dump(mode="json")), config.output)
    return EXIT_PARTIAL if summary.failures else EXIT_OK


def cmd_density(args) -> int:
    config = _job_config(args)
    graph = _graph(args, config)
    density = DensityService(job_settings(config))
    if args.engine == "recurrence":
        t = density.hom_density_recurrence(graph)
    else:
        t = density.hom_density(graph)
    _emit(_dump({"canonical": canonical_form(graph), "engine": args.engine, "coeffs": t.to_strings()}),
          config.output)
    return EXIT_OK


def _kernel_from_args(args) -> StepKernel:
    """--up P gives (1 + U_P)/2; --w a,b,c gives the 2-block W [[a, b], [b, c]]"""
    if args.up is not None:
        return affine_kernel(up_kernel().evaluate_at(to_rational(args.up)), Fraction(1, 2), Fraction(1, 2))
    parts = [to_rational(x) for x in args.w.split(",")]
    if len(parts) != 3:
        raise ValueError("--w takes three rationals: inside-first, across, inside-second")
    a, b, c = parts
    return StepKernel.constant_blocks((Fraction(1, 2), Fraction(1, 2)), ((a, b), (b, c)))


def cmd_inequality(args) -> int:
    config = _job_config(args)
    graph = _graph(args, config)
    kernel = _kernel_from_args(args)
    value = _service(config).inequality_check(graph, kernel)
    _emit(_dump({"canonical": canonical_form(graph), "difference": format_rational(value),
                 "violated": value < 0}), config.output)
    return EXIT_OK


def cmd_local(args) -> int:
    config = _job_config(args)
    graph = _graph(args, config)
    witness = _service(config).local_witness(graph, max_halvings=config.max_halvings)
    _emit(_dump({"canonical": canonical_form(graph), **local_witness_view(witness)}), config.output)
    return EXIT_OK


def cmd_explore_girth(args) -> int:
    config = _job_config(args)
    graph = _graph(args, config)
    report = _service(config).girth_explorer(graph)
    _emit(_dump({"canonical": canonical_form(graph), **girth_view(report)}), config.output)
    return EXIT_OK


def cmd_chain(args) -> int:
    config = _job_config(args)
    graph = _graph(args, config)
    steps = _service(config).edge_chain_trace(graph)
    payload = [
        {
            "added_edge": list(step.added_edge) if step.added_edge else None,
            "edge_count": step.edge_count,
            "has_triangle": step.has_triangle,
            "c3": format_rational(step.c3),
        }
        for step in steps
    ]
    _emit(_dump(payload), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        document = CertificateDocument.model_validate_json(Path(args.file).read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        logger.error(f"cannot read certificate {args.file}: {e}")
        return EXIT_ERROR
    problems = verify_certificate_document(document)
    for problem in problems:
        logger.error(problem)
    sys.stdout.write("ok\n" if not problems else "failed\n")
    return EXIT_ERROR if problems else EXIT_OK


# ----------------------------------------------------------------- parser ---


def _add_graph_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--g6", help="graph6 token")
    source.add_argument("--edges", help="edge list, e.g. '0 1,1 2,0 2'")
    source.add_argument("--tree", help="triangle-tree steps, e.g. 'e0,v2' ('' for K3)")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", help="write the document here instead of stdout")
    parser.add_argument("--max-vertices", type=int, help="vertex cap (default from settings)")
    parser.add_argument("--max-subset-bits", type=int, help="largest e(H) for subset enumeration")
    parser.add_argument("--max-halvings", type=int, help="witness search cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli", description="Certificates that graphs properly containing a "
                                                             "triangle are not strongly common")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="deficit certificate with exact witness")
    _add_graph_flags(p)
    _add_common_flags(p)
    p.add_argument("--timings", action="store_true", help="fill timings_ms")
    p.add_argument("--no-lemmas", action="store_true", help="skip the lemma report")
    p.add_argument("--no-classes", action="store_true", help="expansion path only, no class listing")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("scan", help="one row per graph6 line")
    p.add_argument("--input", "-i", help="graph6 file, one token per line ('-' for stdin)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--jobs", "-j", type=int)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("lemmas", help="lemma checks over every graph on <= max-n vertices")
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--jobs", "-j", type=int)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_lemmas)

    p = sub.add_parser("density", help="coefficients of t_H(U_p)")
    _add_graph_flags(p)
    _add_common_flags(p)
    p.add_argument("--engine", choices=["direct", "recurrence"], default="direct")
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("inequality", help="t_H(W) + t_H(1-W) minus the edge-power side")
    _add_graph_flags(p)
    _add_common_flags(p)
    kernel = p.add_mutually_exclusive_group(required=True)
    kernel.add_argument("--up", help="use W = (1 + U_p)/2 at this rational p")
    kernel.add_argument("--w", help="2-block W with equal halves: 'inside1,across,inside2'")
    p.set_defaults(handler=cmd_inequality)

    p = sub.add_parser("local", help="local witness (p, epsilon0)")
    _add_graph_flags(p)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_local)

    p = sub.add_parser("explore-girth", help="girth and deficit data")
    _add_graph_flags(p)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_explore_girth)

    p = sub.add_parser("chain", help="[3]Δ along a triangle-free start plus the remaining edges")
    _add_graph_flags(p)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_chain)

    p = sub.add_parser("verify", help="re-check a certificate document")
    p.add_argument("file")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr)
    try:
        return args.handler(args)
    except NotApplicableError as e:
        logger.warning(e.message)
        return EXIT_NOT_APPLICABLE
    except CertifierError as e:
        logger.error(f"{e.code}: {e.message}")
        return EXIT_ERROR
    except (ValueError, ValidationError, OSError) as e:
        logger.error(str(e))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
