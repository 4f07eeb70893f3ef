"""
Sweep service tests - scan rows, the lemma sweep and the process pool path
"""
import pytest

from models.schemas import JobConfig
from services.graph_service import enumerate_graphs, to_graph6
from services.sweep_service import SweepService, run_ordered, scan_line


def scan_lines():
    lines = [to_graph6(g) for n in range(3, 6) for g in enumerate_graphs(n)]
    # a broken row in the middle must not shift the rows after it
    return lines[:10] + ["Bx"] + lines[10:]


class TestScan:
    def test_rows_follow_input(self):
        lines = scan_lines()
        rows = SweepService(JobConfig(jobs=1)).scan([">>graph6<<", ""] + lines)
        assert [row.input for row in rows] == lines
        assert rows[10].error.startswith("GRAPH_FORMAT_ERROR")
        assert all(row.lemmas_pass for row in rows if not row.error)

    def test_parallel_scan_matches_serial(self):
        """jobs=3 goes through the process pool; rows come back identical and in input order"""
        lines = scan_lines()
        serial = SweepService(JobConfig(jobs=1)).scan(lines)
        parallel = SweepService(JobConfig(jobs=3)).scan(lines)
        assert [row.model_dump() for row in parallel] == [row.model_dump() for row in serial]

    def test_run_ordered_single_item_stays_in_process(self):
        rows = run_ordered(scan_line, ["Cx"], JobConfig(jobs=4))
        assert rows[0].witness_value == "-1/16"


class TestLemmaSweep:
    def test_up_to_four(self):
        summary = SweepService(JobConfig(jobs=1)).lemma_sweep(4)
        assert summary.graphs == 1 + 2 + 4 + 11
        assert summary.failures == 0 and summary.failed_graphs == []

    def test_parallel_sweep_matches_serial(self):
        serial = SweepService(JobConfig(jobs=1)).lemma_sweep(5)
        parallel = SweepService(JobConfig(jobs=3)).lemma_sweep(5)
        assert parallel.model_dump() == serial.model_dump()
        assert serial.graphs == 34 + 18

    @pytest.mark.slow
    def test_every_graph_up_to_six(self):
        summary = SweepService(JobConfig(jobs=3)).lemma_sweep(6)
        assert summary.graphs == 1 + 2 + 4 + 11 + 34 + 156
        assert summary.failures == 0
        assert summary.by_lemma["triangle_c3_sign"].get("fail", 0) == 0
