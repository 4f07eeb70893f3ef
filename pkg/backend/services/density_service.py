"""
Density service - homomorphism densities into step kernels
The U_p kernel gets a dedicated engine: every block assignment contributes
(2p-1)^m (-1)^(e-m) / 2^v where m counts within-block edges, so all we need is
a histogram of m over the assignments. Gray-code order lets each step update m
from a single vertex flip. A second engine runs the edge-addition recurrence
t_H = 4p f_{a,b,H-ab} - t_{H-ab} and must agree exactly.
"""
import itertools
import logging
import threading
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from app.config import Settings, settings as default_settings
from models.data_models import DensityPair, StepKernel
from services.graph_service import Graph, canonical_form
from utils.errors import BudgetExceededError, PreconditionError
from utils.polyq import Polynomial, binomial_power

logger = logging.getLogger(__name__)

VECTOR_CHUNK_BITS = 16


def up_kernel() -> StepKernel:
    """U_p: 2p-1 inside each half, -1 across"""
    diagonal = Polynomial((-1, 2))
    across = Polynomial.constant(-1)
    return StepKernel(
        k=2,
        measures=(Fraction(1, 2), Fraction(1, 2)),
        entries=((diagonal, across), (across, diagonal)),
    )


def affine_kernel(kernel: StepKernel, scale, shift) -> StepKernel:
    """Entrywise shift + scale * K, e.g. (1 + U)/2 or 2W - 1 or 1 - W"""
    return kernel.map_entries(lambda e: e * Fraction(scale) + Fraction(shift))


class DensityService:
    """
    Holds the budgets and the recurrence memo cache
    Everything else is pure, so one instance can be shared between threads
    """

    def __init__(self, config: Optional[Settings] = None):
        self.settings = config or default_settings
        self._memo: Dict[str, Polynomial] = {}
        self._memo_lock = threading.Lock()
        self.memo_hits = 0

    # ------------------------------------------------------------ budget ---

    def _check_budget(self, blocks: int, vertices: int) -> None:
        assignments = blocks ** vertices
        if assignments > self.settings.ASSIGNMENT_BUDGET:
            raise BudgetExceededError(
                f"{blocks}^{vertices} = {assignments} block assignments is over the budget of "
                f"{self.settings.ASSIGNMENT_BUDGET}"
            )

    # --------------------------------------------------------- histogram ---

    def same_block_histogram(self, graph: Graph, pinned: Optional[Dict[int, int]] = None) -> List[int]:
        """
        counts[m] = number of assignments V(H) -> {0, 1} agreeing with `pinned`
        that put exactly m edges inside a block
        """
        pinned = pinned or {}
        self._check_budget(2, graph.n)
        free = [v for v in range(graph.n) if v not in pinned]
        if len(free) >= self.settings.VECTORIZE_MIN_VERTICES:
            return self._vectorized_histogram(graph, pinned, free)
        return self._gray_histogram(graph, pinned, free)

    def _gray_histogram(self, graph: Graph, pinned: Dict[int, int], free: List[int]) -> List[int]:
        adjacency = graph.adjacency
        degrees = [a.bit_count() for a in adjacency]
        x = 0
        for v, block in pinned.items():
            if block:
                x |= 1 << v
        m = sum(1 for u, v in graph.edges if (x >> u & 1) == (x >> v & 1))
        counts = [0] * (graph.m + 1)
        counts[m] += 1
        for step in range(1, 1 << len(free)):
            i = free[(step & -step).bit_length() - 1]
            if x >> i & 1:
                same = (adjacency[i] & x).bit_count()
            else:
                same = (adjacency[i] & ~x).bit_count()
            # flipping i turns its same-block edges into cross edges and vice versa
            m += degrees[i] - 2 * same
            x ^= 1 << i
            counts[m] += 1
        return counts

    def _vectorized_histogram(self, graph: Graph, pinned: Dict[int, int], free: List[int]) -> List[int]:
        position = {v: t for t, v in enumerate(free)}
        total = np.zeros(graph.m + 1, dtype=np.int64)
        chunk = 1 << min(VECTOR_CHUNK_BITS, len(free))
        for start in range(0, 1 << len(free), chunk):
            codes = np.arange(start, start + chunk, dtype=np.int64)

            def block_of(v):
                if v in pinned:
                    return pinned[v]
                return (codes >> position[v]) & 1

            m = np.zeros(chunk, dtype=np.int16)
            for u, v in graph.edges:
                m += np.asarray(block_of(u) == block_of(v), dtype=np.int16)
            total += np.bincount(m, minlength=graph.m + 1)
        return [int(c) for c in total]

    def _histogram_density(self, counts: List[int], vertices: int, diagonal: Polynomial, across: Polynomial,
                           weight: Fraction) -> Polynomial:
        """Σ counts[m] * diagonal^m * across^(e-m) * weight"""
        e = len(counts) - 1
        diag_powers = [Polynomial.one()]
        across_powers = [Polynomial.one()]
        for _ in range(e):
            diag_powers.append(diag_powers[-1] * diagonal)
            across_powers.append(across_powers[-1] * across)
        total = Polynomial.zero()
        for m, count in enumerate(counts):
            if count:
                total = total + diag_powers[m] * across_powers[e - m] * count
        return total * weight

    # ---------------------------------------------------------- densities ---

    def hom_density(self, graph: Graph, kernel: Optional[StepKernel] = None) -> Polynomial:
        """t_H(K); K defaults to U_p. Edgeless graphs give 1"""
        kernel = kernel or up_kernel()
        if graph.m == 0:
            return Polynomial.one()
        if kernel.is_balanced_two_block():
            # global block swap is a symmetry, so pin the last vertex and double
            counts = self.same_block_histogram(graph, {graph.n - 1: 0})
            return self._histogram_density(
                counts, graph.n, kernel.entry(0, 0), kernel.entry(0, 1), Fraction(2, 2 ** graph.n)
            )
        return self.hom_density_generic(graph, kernel)

    def hom_density_generic(self, graph: Graph, kernel: StepKernel) -> Polynomial:
        """Direct product of entry polynomials over all k^v assignments (any k)"""
        self._check_budget(kernel.k, graph.n)
        if kernel.is_constant():
            return Polynomial.constant(
                self.constant_density(graph, kernel.measures, kernel.constant_values())
            )
        total = Polynomial.zero()
        for phi in itertools.product(range(kernel.k), repeat=graph.n):
            weight = Fraction(1)
            for v in phi:
                weight *= kernel.measures[v]
            term = Polynomial.constant(weight)
            for u, v in graph.edges:
                term = term * kernel.entry(phi[u], phi[v])
                if term.is_zero():
                    break
            total = total + term
        return total

    def constant_density(self, graph: Graph, measures, values) -> Fraction:
        """Same enumeration with plain rationals, for kernels without p"""
        self._check_budget(len(measures), graph.n)
        total = Fraction(0)
        for phi in itertools.product(range(len(measures)), repeat=graph.n):
            term = Fraction(1)
            for u, v in graph.edges:
                term *= values[phi[u]][phi[v]]
                if not term:
                    break
            if not term:
                continue
            for v in phi:
                term *= measures[v]
            total += term
        return total

    def _check_pair(self, graph: Graph, a: int, b: int) -> None:
        if not (0 <= a < graph.n and 0 <= b < graph.n) or a == b:
            raise PreconditionError(f"invalid vertex pair ({a}, {b}) for n={graph.n}")
        if graph.has_edge(a, b):
            raise PreconditionError(f"vertices {a} and {b} are adjacent")

    def pinned_density(self, graph: Graph, pinned: Dict[int, int]) -> Polynomial:
        """U_p density restricted to assignments that agree with `pinned`"""
        counts = self.same_block_histogram(graph, pinned)
        return self._histogram_density(
            counts, graph.n, Polynomial((-1, 2)), Polynomial.constant(-1), Fraction(1, 2 ** graph.n)
        )

    def restricted_densities(self, graph: Graph, a: int, b: int) -> DensityPair:
        """f: a, b both in the first half; g: a in the first half, b in the second"""
        self._check_pair(graph, a, b)
        f = self.pinned_density(graph, {a: 0, b: 0})
        g = self.pinned_density(graph, {a: 0, b: 1})
        return DensityPair(f=f, g=g, pair=(min(a, b), max(a, b)))

    # --------------------------------------------------------- recurrence ---

    def hom_density_recurrence(self, graph: Graph) -> Polynomial:
        """
        Remove the lexicographically last edge ab and apply
        t_H = 4p * f_{a,b,H-ab} - t_{H-ab}; memoized by canonical form
        """
        if graph.m == 0:
            return Polynomial.one()
        core_size = len({x for e in graph.edges for x in e})
        key = canonical_form(graph) if core_size <= self.settings.MEMO_MAX_VERTICES else None
        if key is not None:
            cached = self._memo.get(key)
            if cached is not None:
                self.memo_hits += 1
                return cached

        a, b = graph.edges[-1]
        smaller = graph.without_edge(a, b)
        pair = self.restricted_densities(smaller, a, b)
        result = Polynomial.p() * pair.f * 4 - self.hom_density_recurrence(smaller)

        if key is not None:
            # same key always maps to the same value, so a racing insert is harmless
            with self._memo_lock:
                self._memo.setdefault(key, result)
        return result

    def clear_memo(self) -> None:
        with self._memo_lock:
            self._memo.clear()
        self.memo_hits = 0

    @property
    def memo_size(self) -> int:
        return len(self._memo)


def edge_density_power(e: int) -> Polynomial:
    """t_{K2}(U_p)^e = (p-1)^e"""
    return binomial_power(-1, e)
