"""
Unit tests for the density service - U_p, the histogram engine, restricted
densities and the edge-addition recurrence
"""
from fractions import Fraction

import pytest

from app.config import Settings
from models.data_models import StepKernel
from services.density_service import DensityService, edge_density_power, up_kernel
from services.graph_service import Graph
from tests.conftest import cycle, path
from utils.errors import BudgetExceededError, PreconditionError
from utils.polyq import Polynomial

P = Polynomial.p()


class TestUpKernel:
    def test_entries_and_measures(self):
        kernel = up_kernel()
        assert kernel.entry(0, 0) == 2 * P - 1
        assert kernel.entry(1, 1) == 2 * P - 1
        assert kernel.entry(0, 1) == -1
        assert kernel.measures == (Fraction(1, 2), Fraction(1, 2))
        assert sum(kernel.measures) == 1

    def test_kernel_validation(self):
        """Asymmetric or badly weighted kernels are refused"""
        with pytest.raises(ValueError):
            StepKernel.constant_blocks((Fraction(1, 2), Fraction(1, 2)), ((0, 1), (0, 0)))
        with pytest.raises(ValueError):
            StepKernel.constant_blocks((Fraction(1, 2), Fraction(1, 3)), ((0, 0), (0, 0)))


class TestHomDensity:
    """t_H(U_p) from the block histogram"""

    def test_small_examples(self, density_service, k2, k3):
        assert density_service.hom_density(k2) == P - 1
        assert density_service.hom_density(k3) == Polynomial((-1, 3, -3, 2))
        assert density_service.hom_density(path(2)) == Polynomial((1, -2, 1))
        assert density_service.hom_density(Graph(5, ())) == 1

    def test_cycle_and_path_closed_forms(self, density_service):
        """Transfer-matrix eigenvalues p-1 and p"""
        for k in range(3, 9):
            assert density_service.hom_density(cycle(k)) == (P - 1) ** k + P ** k
        for k in range(1, 9):
            assert density_service.hom_density(path(k)) == (P - 1) ** k

    def test_isolated_vertex_invariance(self, density_service, paw, bowtie):
        for g in (paw, bowtie):
            assert density_service.hom_density(g.add_isolated()) == density_service.hom_density(g)

    def test_disjoint_union_multiplies(self, density_service, k3, paw, c4, cherry):
        pairs = [(k3, paw), (c4, cherry), (paw, paw)]
        for a, b in pairs:
            union = a.disjoint_union(b)
            assert density_service.hom_density(union) == density_service.hom_density(a) * density_service.hom_density(b)

    def test_denominator_and_degree(self, density_service, graphs_up_to_5):
        """2^v t_H has integer coefficients and degree at most e(H)"""
        for g in graphs_up_to_5:
            t = density_service.hom_density(g)
            assert t.degree <= g.m
            assert all((c * 2 ** g.n).denominator == 1 for c in t.coeffs)

    def test_generic_path_agrees(self, density_service, graphs_up_to_5):
        """Direct product of entry polynomials matches the histogram engine"""
        kernel = up_kernel()
        for g in graphs_up_to_5[:30]:
            assert density_service.hom_density_generic(g, kernel) == density_service.hom_density(g)

    def test_three_block_kernel(self, density_service, k3):
        """Generic path with k = 3 and a polynomial entry"""
        kernel = StepKernel(
            k=3,
            measures=(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
            entries=((P, Polynomial.zero(), Polynomial.zero()),
                     (Polynomial.zero(), P, Polynomial.zero()),
                     (Polynomial.zero(), Polynomial.zero(), P)),
        )
        # only monochromatic maps survive: 3 of 27, each p^3
        assert density_service.hom_density(k3, kernel) == P ** 3 * Fraction(1, 9)

    def test_budget(self, k3):
        service = DensityService(Settings(ASSIGNMENT_BUDGET=4))
        with pytest.raises(BudgetExceededError):
            service.hom_density(k3)


class TestHistogram:
    """Gray-code loop vs numpy path"""

    def test_total_assignments(self, density_service, diamond):
        counts = density_service.same_block_histogram(diamond)
        assert sum(counts) == 2 ** diamond.n
        assert len(counts) == diamond.m + 1
        # all vertices in one block puts every edge inside
        assert counts[diamond.m] == 2

    def test_vectorized_matches_gray(self, rng):
        gray = DensityService(Settings(VECTORIZE_MIN_VERTICES=30))
        vector = DensityService(Settings(VECTORIZE_MIN_VERTICES=2))
        for _ in range(20):
            n = int(rng.integers(3, 10))
            edges = tuple((u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4)
            g = Graph(n, edges)
            pinned = {0: 0, n - 1: 1}
            assert gray.same_block_histogram(g) == vector.same_block_histogram(g)
            assert gray.same_block_histogram(g, pinned) == vector.same_block_histogram(g, pinned)


class TestRestrictedDensities:
    """f (same block) and g (different blocks) for a nonadjacent pair"""

    def test_cherry(self, density_service, cherry):
        pair = density_service.restricted_densities(cherry, 0, 1)
        assert pair.f == Polynomial((1, -2, 2)) * Fraction(1, 4)
        assert pair.g == Polynomial((1, -2)) * Fraction(1, 4)
        assert pair.f * 2 + pair.g * 2 == (P - 1) ** 2

    def test_pair_identity_and_constant_term(self, density_service, graphs_up_to_5):
        """2f + 2g = t_H and f(0) = (-1)^e / 4"""
        for g in graphs_up_to_5:
            t = density_service.hom_density(g)
            for a, b in g.nonadjacent_pairs():
                pair = density_service.restricted_densities(g, a, b)
                assert pair.f * 2 + pair.g * 2 == t
                assert pair.f.coeff(0) == Fraction((-1) ** g.m, 4)
                assert pair.f.degree <= g.m and pair.g.degree <= g.m

    def test_block_symmetry(self, density_service, graphs_up_to_5):
        """Pinning both to the second block gives the same f"""
        for g in graphs_up_to_5[::3]:
            for a, b in g.nonadjacent_pairs():
                assert density_service.pinned_density(g, {a: 0, b: 0}) == density_service.pinned_density(g, {a: 1, b: 1})
                assert density_service.pinned_density(g, {a: 0, b: 1}) == density_service.pinned_density(g, {a: 1, b: 0})

    def test_adjacent_pair_rejected(self, density_service, k3):
        with pytest.raises(PreconditionError):
            density_service.restricted_densities(k3, 0, 1)

    def test_invalid_vertex(self, density_service, cherry):
        with pytest.raises(PreconditionError):
            density_service.restricted_densities(cherry, 0, 5)
        with pytest.raises(PreconditionError):
            density_service.restricted_densities(cherry, 1, 1)


class TestRecurrence:
    """t_H = 4p f_{a,b,H-ab} - t_{H-ab}"""

    def test_examples(self, density_service, k2, paw):
        assert density_service.hom_density_recurrence(k2) == P - 1
        assert density_service.hom_density_recurrence(paw) == Polynomial((-1, 3, -3, 2)) * (P - 1)
        assert density_service.hom_density_recurrence(Graph(4, ())) == 1

    def test_engines_agree(self, density_service, graphs_up_to_6):
        """Every graph on at most 6 vertices"""
        for g in graphs_up_to_6:
            assert density_service.hom_density_recurrence(g) == density_service.hom_density(g)

    def test_memo_used(self, density_service, c4, k3):
        density_service.hom_density_recurrence(c4)
        size = density_service.memo_size
        assert size > 0
        density_service.hom_density_recurrence(c4.relabel([2, 0, 3, 1]))
        assert density_service.memo_hits >= 1
        density_service.clear_memo()
        assert density_service.memo_size == 0

    def test_edge_power(self):
        assert edge_density_power(0) == 1
        assert edge_density_power(2) == Polynomial((1, -2, 1))
