"""
Sweep service - batch runs for scan and the lemma sweep
Each graph is independent, so with jobs > 1 we fan out to a process pool and
put the results back in input order; jobs == 1 stays in-process so the
density memo is shared across the whole run
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, Dict, List, Optional, Sequence

from app.config import Settings, settings as default_settings
from models.schemas import JobConfig, LemmaSweepSummary, ScanRow
from services.certify_service import CertifyService
from services.graph_service import canonical_form, enumerate_graphs, girth, parse_graph6, to_graph6
from utils.errors import CertifierError
from utils.polyq import format_rational

logger = logging.getLogger(__name__)

# one service per worker process, built lazily from the job config
_worker_service: Optional[CertifyService] = None
_worker_key: Optional[tuple] = None


def job_settings(config: JobConfig, base: Optional[Settings] = None) -> Settings:
    base = base or default_settings
    return base.model_copy(
        update={
            "MAX_VERTICES": config.max_vertices,
            "MAX_SUBSET_BITS": config.max_subset_bits,
            "MAX_HALVINGS": config.max_halvings,
            "JOBS": config.jobs,
        }
    )


def _service_for(config: JobConfig) -> CertifyService:
    global _worker_service, _worker_key
    key = (config.max_vertices, config.max_subset_bits, config.max_halvings)
    if _worker_service is None or _worker_key != key:
        _worker_service = CertifyService(job_settings(config))
        _worker_key = key
    return _worker_service


def scan_line(line: str, config: JobConfig) -> ScanRow:
    """One scan row; errors end up in the row instead of stopping the scan"""
    service = _service_for(config)
    row = ScanRow(input=line)
    try:
        graph = parse_graph6(line, config.max_vertices)
        row.canonical = canonical_form(graph)
        row.n, row.m = graph.n, graph.m
        row.girth = girth(graph)
        row.c3 = format_rational(service.delta_polynomial(graph).coeff(3))
        certificate = service.certify_not_strongly_common(
            graph, include_classes=False, max_halvings=config.max_halvings
        )
        row.applicable = certificate.applicable
        if certificate.applicable:
            row.witness_p = format_rational(certificate.witness_p)
            row.witness_value = format_rational(certificate.witness_value)
        report = service.verify_lemma_suite(graph, pairs=graph.n <= service.settings.PAIR_CHECK_MAX_VERTICES)
        row.lemmas_pass = report.all_passed
    except CertifierError as e:
        logger.warning(f"scan: {line.strip()!r}: {e.message}")
        row.error = f"{e.code}: {e.message}"
    return row


def lemma_graph(graph6: str, config: JobConfig) -> Dict:
    service = _service_for(config)
    graph = parse_graph6(graph6, config.max_vertices)
    report = service.verify_lemma_suite(graph)
    return {"graph6": graph6, "pairs": report.pairs_checked, "statuses": report.status_map(),
            "failures": report.failures()}


def run_ordered(fn: Callable, items: Sequence, config: JobConfig) -> List:
    """fn(item, config) for every item, results in input order"""
    if config.jobs <= 1 or len(items) <= 1:
        return [fn(item, config) for item in items]
    results: List = [None] * len(items)
    with ProcessPoolExecutor(max_workers=config.jobs) as executor:
        futures = {executor.submit(fn, item, config): index for index, item in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results


class SweepService:
    def __init__(self, config: Optional[JobConfig] = None):
        self.config = config or JobConfig()

    def scan(self, lines: Sequence[str]) -> List[ScanRow]:
        lines = [line.strip() for line in lines if line.strip() and not line.startswith(">>")]
        logger.info(f"scanning {len(lines)} graphs with {self.config.jobs} worker(s)")
        started = time.perf_counter()
        rows = run_ordered(scan_line, lines, self.config)
        errors = sum(1 for row in rows if row.error)
        logger.info(f"scan finished: {len(rows)} rows, {errors} errors in {time.perf_counter() - started:.1f}s")
        return rows

    def lemma_sweep(self, max_n: int) -> LemmaSweepSummary:
        """verify_lemma_suite on every isomorphism class with at most max_n vertices"""
        tokens = [to_graph6(g) for n in range(1, max_n + 1) for g in enumerate_graphs(n)]
        logger.info(f"lemma sweep over {len(tokens)} graphs (n <= {max_n})")
        summary = LemmaSweepSummary(max_n=max_n)
        for result in run_ordered(lemma_graph, tokens, self.config):
            summary.graphs += 1
            summary.pairs += result["pairs"]
            for name, status in result["statuses"].items():
                counts = summary.by_lemma.setdefault(name, {})
                counts[status] = counts.get(status, 0) + 1
            if result["failures"]:
                summary.failures += len(result["failures"])
                summary.failed_graphs.append(result["graph6"])
                logger.error(f"lemma failures on {result['graph6']}: {result['failures']}")
        logger.info(f"lemma sweep done: {summary.graphs} graphs, {summary.pairs} pairs, {summary.failures} failures")
        return summary
