"""
Unit tests for the graph service - parsing, canonical labels, even subgraphs,
girth, triangle trees and the isomorphism-class generator
"""
import itertools

import pytest

from app.config import settings
from services.graph_service import (
    Graph,
    canonical_form,
    enumerate_graphs,
    enumerate_graphs_by_subsets,
    even_spanning_subgraphs,
    gen_triangle_tree,
    girth,
    has_triangle,
    iter_even_subgraphs,
    parse_edge_list,
    parse_graph6,
    parse_graph_input,
    parse_triangle_tree,
    random_triangle_tree,
    to_graph6,
)
from services.oracle_service import reference_girth, reference_graph6, reference_isomorphic
from tests.conftest import cycle, path
from utils.errors import BudgetExceededError, GraphFormatError


def random_graph(rng, n, density=0.5) -> Graph:
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < density]
    return Graph(n, tuple(edges))


class TestGraphType:
    """Validation and the small helpers on Graph"""

    def test_edges_sorted_and_adjacency_consistent(self):
        g = Graph(4, ((3, 2), (1, 0), (2, 0)))
        assert g.edges == ((0, 1), (0, 2), (2, 3))
        rebuilt = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if g.adjacency[u] >> v & 1]
        assert tuple(rebuilt) == g.edges

    def test_rejects_self_loop(self):
        with pytest.raises(GraphFormatError) as exc:
            Graph(3, ((1, 1),))
        assert exc.value.reason == "self_loop"

    def test_rejects_duplicate(self):
        with pytest.raises(GraphFormatError) as exc:
            Graph(3, ((0, 1), (1, 0)))
        assert exc.value.reason == "duplicate_edge"

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphFormatError) as exc:
            Graph(2, ((0, 2),))
        assert exc.value.reason == "vertex_out_of_range"

    def test_vertex_cap(self):
        with pytest.raises(GraphFormatError):
            Graph(31, ())

    def test_core_drops_isolated(self, paw):
        g = paw.add_isolated(2)
        assert g.n == 6
        assert g.core() == paw
        assert Graph(3, ()).core() is None


class TestGraph6:
    """graph6 decoding, checked against networkx"""

    def test_examples(self, k3):
        assert parse_graph6("Bw") == k3
        assert parse_graph6("B?") == Graph(3, ())
        assert parse_graph6("Bg") == Graph(3, ((0, 1), (1, 2)))

    def test_header_tolerated(self, k3):
        assert parse_graph6(">>graph6<<Bw") == k3

    def test_matches_reference_codec(self, rng):
        """Random graphs round trip through both codecs"""
        for _ in range(200):
            g = random_graph(rng, int(rng.integers(1, 12)))
            token = to_graph6(g)
            assert parse_graph6(token) == g
            assert reference_graph6(token) == g

    def test_encoder_keeps_isolated_vertices(self, k3):
        """Trailing isolated vertices survive encoding, with and without padding bits"""
        for extra in (0, 1, 5, 17):
            g = k3.add_isolated(extra)
            token = to_graph6(g)
            assert not token.startswith(">>")
            assert parse_graph6(token) == g
            assert reference_graph6(token) == g

    @pytest.mark.parametrize(
        "token,reason",
        [
            ("", "malformed_header"),
            ("?", "malformed_header"),
            ("B\x7f", "invalid_character"),
            ("Bw?", "length_mismatch"),
            ("Bx", "trailing_bits"),
            ("~??~", "vertex_cap"),
            ("Z" + "?" * 50, "vertex_cap"),
        ],
    )
    def test_errors_are_distinct(self, token, reason):
        with pytest.raises(GraphFormatError) as exc:
            parse_graph6(token)
        assert exc.value.reason == reason


class TestEdgeList:
    """Plain 'u v' edge lists"""

    def test_triangle_and_paw(self, k3, paw):
        assert parse_edge_list("0 1\n0 2\n1 2") == k3
        assert parse_edge_list("0 1\n1 2\n0 2\n2 3") == paw

    def test_commas_and_forced_n(self):
        g = parse_edge_list("n=5\n0 1, 1 2")
        assert g.n == 5 and g.m == 2

    @pytest.mark.parametrize(
        "text,reason",
        [
            ("0 0", "self_loop"),
            ("0 1\n1 0", "duplicate_edge"),
            ("0 x", "non_integer"),
            ("0 1 2", "bad_line"),
            ("", "empty_input"),
            ("n=2\n0 3", "vertex_out_of_range"),
        ],
    )
    def test_errors(self, text, reason):
        with pytest.raises(GraphFormatError) as exc:
            parse_edge_list(text)
        assert exc.value.reason == reason

    def test_parse_graph_input_needs_one_form(self):
        with pytest.raises(GraphFormatError):
            parse_graph_input()
        with pytest.raises(GraphFormatError):
            parse_graph_input(g6="Bw", edges="0 1")


class TestCanonicalForm:
    """Isomorphism-invariant labels"""

    def test_paw_relabelled(self):
        a = Graph(4, ((0, 1), (0, 2), (1, 2), (2, 3)))
        b = Graph(4, ((1, 2), (1, 3), (2, 3), (3, 0)))
        assert canonical_form(a) == canonical_form(b)

    def test_path_and_star(self):
        """Two-edge path and two-edge star are the same graph"""
        assert canonical_form(Graph(3, ((0, 1), (1, 2)))) == canonical_form(Graph(3, ((0, 1), (0, 2))))

    def test_isolated_vertices_ignored(self, k3):
        assert canonical_form(k3.add_isolated(3)) == canonical_form(k3)
        assert canonical_form(Graph(4, ())) == "0:"

    def test_random_permutations(self, rng):
        """Labels survive relabelling, 1000 random graphs with n <= 8"""
        for _ in range(1000):
            n = int(rng.integers(2, 9))
            g = random_graph(rng, n)
            perm = [int(x) for x in rng.permutation(n)]
            assert canonical_form(g) == canonical_form(g.relabel(perm))

    def test_distinguishes_like_networkx(self, rng):
        """Equal labels iff networkx says isomorphic"""
        graphs = [random_graph(rng, 6, 0.4) for _ in range(80)]
        for a, b in itertools.combinations(graphs[:40], 2):
            assert (canonical_form(a) == canonical_form(b)) == reference_isomorphic(a, b)

    def test_refined_backend(self, rng):
        """Twelve-vertex trees keep their labels under relabelling and stay apart"""
        g = path(11)
        caterpillar = Graph(12, path(10).edges + ((5, 11),))
        for _ in range(5):
            perm = [int(x) for x in rng.permutation(12)]
            assert canonical_form(g) == canonical_form(g.relabel(perm))
            assert canonical_form(caterpillar) == canonical_form(caterpillar.relabel(perm))
        assert canonical_form(g) != canonical_form(caterpillar)

    def test_regular_graphs_need_individualization(self, rng):
        """Refinement alone cannot split a cycle; the labels still come out invariant"""
        ten = cycle(10)
        two_fives = cycle(5).disjoint_union(cycle(5))
        for _ in range(5):
            perm = [int(x) for x in rng.permutation(10)]
            assert canonical_form(ten) == canonical_form(ten.relabel(perm))
            assert canonical_form(two_fives) == canonical_form(two_fives.relabel(perm))
        assert canonical_form(ten) != canonical_form(two_fives)
        assert canonical_form(path(9)) == canonical_form(path(9).relabel(list(range(9, -1, -1))))

    def test_nine_and_ten_vertices_like_networkx(self, rng):
        """Equal labels iff isomorphic, on random graphs with 9 or 10 vertices"""
        graphs = []
        for _ in range(30):
            g = random_graph(rng, int(rng.integers(9, 11)), 0.3)
            perm = [int(x) for x in rng.permutation(g.n)]
            assert canonical_form(g) == canonical_form(g.relabel(perm))
            graphs.append(g)
        # near-isomorphic pairs are the interesting ones
        graphs.extend(g.relabel([int(x) for x in rng.permutation(g.n)]) for g in graphs[:5])
        for a, b in itertools.combinations(graphs, 2):
            assert (canonical_form(a) == canonical_form(b)) == reference_isomorphic(a, b)

    def test_search_budget(self, monkeypatch):
        """A cycle on 12 vertices needs 12 branches of 32 relabelings"""
        monkeypatch.setattr(settings, "CANON_PERMUTATION_BUDGET", 100)
        with pytest.raises(BudgetExceededError):
            canonical_form(cycle(12))
        monkeypatch.setattr(settings, "CANON_PERMUTATION_BUDGET", 384)
        assert canonical_form(cycle(12)).startswith("12:")

    def test_backend_cap(self):
        with pytest.raises(BudgetExceededError):
            canonical_form(path(17))


class TestEvenSubgraphs:
    """Classes of spanning subgraphs with a positive even number of edges"""

    def test_paw_classes(self, paw):
        classes = even_spanning_subgraphs(paw)
        by_shape = {(c.edge_count, c.representative.n): c.multiplicity for c in classes}
        # path on 3 vertices x5, two disjoint edges x1, the paw itself x1
        assert by_shape == {(2, 3): 5, (2, 4): 1, (4, 4): 1}
        assert sum(c.multiplicity for c in classes) == 7

    def test_triangle(self, k3):
        classes = even_spanning_subgraphs(k3)
        assert len(classes) == 1
        assert classes[0].multiplicity == 3 and classes[0].edge_count == 2

    def test_single_edge(self, k2):
        assert even_spanning_subgraphs(k2) == []

    def test_multiplicities_sum(self, rng):
        """Σ multiplicity = 2^(e-1) - 1 for random hosts with e <= 12"""
        for _ in range(40):
            g = random_graph(rng, 7, 0.4)
            if g.m > 12:
                continue
            classes = even_spanning_subgraphs(g)
            expected = 2 ** (g.m - 1) - 1 if g.m else 0
            assert sum(c.multiplicity for c in classes) == expected
            assert all(c.edge_count % 2 == 0 and c.edge_count == c.representative.m for c in classes)

    def test_raw_path_counts(self, diamond):
        subsets = list(iter_even_subgraphs(diamond))
        assert len(subsets) == 2 ** 4 - 1

    def test_subset_budget(self):
        with pytest.raises(BudgetExceededError):
            even_spanning_subgraphs(path(10), max_subset_bits=8)


class TestGirth:
    """Shortest cycles"""

    def test_examples(self, k3, c5):
        assert girth(k3) == 3
        assert girth(c5) == 5
        assert girth(path(2)) is None

    def test_triangle_iff_girth_three(self, rng):
        for _ in range(200):
            g = random_graph(rng, int(rng.integers(2, 9)), 0.35)
            common = any(g.common_neighbors(u, v) for u, v in g.edges)
            assert (girth(g) == 3) == common == has_triangle(g)
            assert girth(g) == reference_girth(g)

    def test_long_cycles_and_unions(self, k3):
        assert girth(cycle(12)) == 12
        assert girth(cycle(5).disjoint_union(cycle(7))) == 5
        assert girth(k3.disjoint_union(cycle(7))) == 3
        assert girth(path(5).disjoint_union(path(3))) is None
        assert girth(Graph(4, ())) is None


class TestTriangleTrees:
    """Triangle-tree replay"""

    def test_base_case(self, k3):
        assert gen_triangle_tree(parse_triangle_tree("")) == k3

    def test_edge_step_gives_diamond(self, diamond):
        g = gen_triangle_tree(parse_triangle_tree("e0"))
        assert (g.n, g.m) == (4, 5)
        assert canonical_form(g) == canonical_form(diamond)

    def test_vertex_step_gives_bowtie(self, bowtie):
        g = gen_triangle_tree(parse_triangle_tree("v0"))
        assert (g.n, g.m) == (5, 6)
        assert canonical_form(g) == canonical_form(bowtie)

    def test_dangling_index(self):
        with pytest.raises(GraphFormatError) as exc:
            gen_triangle_tree(parse_triangle_tree("e7"))
        assert exc.value.reason == "dangling_index"

    def test_bad_step(self):
        with pytest.raises(GraphFormatError):
            parse_triangle_tree("x1")

    def test_random_trees(self, rng):
        """Always girth 3, and e >= 4 once there is a step"""
        for _ in range(50):
            spec = random_triangle_tree(int(rng.integers(0, 5)), rng, max_vertices=10)
            g = gen_triangle_tree(spec)
            assert girth(g) == 3
            assert g.m >= 3
            if spec.steps:
                assert g.m >= 4
            assert g.n <= 10


class TestEnumeration:
    """One representative per isomorphism class"""

    def test_counts(self):
        assert [len(enumerate_graphs(n)) for n in range(1, 7)] == [1, 2, 4, 11, 34, 156]

    @pytest.mark.slow
    def test_count_seven(self):
        assert len(enumerate_graphs(7)) == 1044

    def test_matches_subset_dedupe(self):
        for n in range(1, 6):
            a = sorted(canonical_form(g) + f"/{g.n}" for g in enumerate_graphs(n))
            b = sorted(canonical_form(g) + f"/{g.n}" for g in enumerate_graphs_by_subsets(n))
            assert a == b

    def test_pairwise_non_isomorphic(self):
        graphs = enumerate_graphs(5)
        assert len({canonical_form(g) for g in graphs}) == len(graphs)
        assert all(g.n == 5 for g in graphs)
