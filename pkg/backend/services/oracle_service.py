"""
Oracle service - slow, obvious reference computations
Nothing here reuses the histogram or Gray-code machinery: densities are a
plain nested sum over every map V(H) -> nodes, and graph6 / isomorphism
questions go to networkx. Tests compare the fast engines against these
"""
import itertools
import logging
from fractions import Fraction
from typing import Optional

import networkx as nx

from app.config import Settings, settings as default_settings
from models.data_models import WeightedGraph
from services.graph_service import Graph, to_networkx
from utils.errors import BudgetExceededError

logger = logging.getLogger(__name__)


class OracleService:
    def __init__(self, config: Optional[Settings] = None):
        self.settings = config or default_settings

    def hom_density_numeric(self, graph: Graph, target: WeightedGraph) -> Fraction:
        """Σ over all maps of Π vertex weights * Π edge weights"""
        work = target.n ** graph.n * max(1, graph.n + graph.m)
        if work > self.settings.ORACLE_BUDGET:
            raise BudgetExceededError(
                f"oracle needs about {work} products, budget is {self.settings.ORACLE_BUDGET}"
            )
        total = Fraction(0)
        for phi in itertools.product(range(target.n), repeat=graph.n):
            term = Fraction(1)
            for v in range(graph.n):
                term *= target.vertex_weights[phi[v]]
            for u, v in graph.edges:
                term *= target.edge_weights[phi[u]][phi[v]]
            total += term
        return total

    def numeric_delta(self, graph: Graph, p) -> Fraction:
        p = Fraction(p)
        return self.hom_density_numeric(graph, up_weighted_graph(p)) - (p - 1) ** graph.m


def up_weighted_graph(p) -> WeightedGraph:
    """U_p at a concrete p as a two-node weighted graph with loops"""
    p = Fraction(p)
    inside, across = 2 * p - 1, Fraction(-1)
    return WeightedGraph(
        n=2,
        vertex_weights=(Fraction(1, 2), Fraction(1, 2)),
        edge_weights=((inside, across), (across, inside)),
    )


def reference_graph6(text: str) -> Graph:
    """Decode with networkx's graph6 codec"""
    decoded = nx.from_graph6_bytes(text.strip().encode("ascii"))
    return Graph(decoded.number_of_nodes(), tuple(tuple(sorted(e)) for e in decoded.edges()))


def reference_isomorphic(first: Graph, second: Graph) -> bool:
    """Isomorphism after dropping isolated vertices, the same notion canonical_form uses"""
    a = to_networkx(first)
    b = to_networkx(second)
    a.remove_nodes_from([v for v in list(a.nodes) if a.degree(v) == 0])
    b.remove_nodes_from([v for v in list(b.nodes) if b.degree(v) == 0])
    return nx.is_isomorphic(a, b)


def reference_girth(graph: Graph) -> Optional[int]:
    """Shortest cycle through networkx's minimum cycle basis; None for forests"""
    basis = nx.minimum_cycle_basis(to_networkx(graph))
    if not basis:
        return None
    return min(len(cycle) for cycle in basis)
