"""
Graph service - small labeled simple graphs and everything around them
Parsing (graph6, edge lists, triangle-tree steps), canonical labels,
even spanning subgraph classes, girth, and the isomorphism-class generator
used by the lemma sweeps
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from app.config import settings
from utils.errors import BudgetExceededError, GraphFormatError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

GRAPH6_OFFSET = 63
GRAPH6_HEADER = ">>graph6<<"


@dataclass(frozen=True)
class Graph:
    """
    Simple labeled graph on vertices 0..n-1
    Edges are kept sorted (smaller endpoint first, lexicographic) so every
    enumeration downstream is deterministic; adjacency is a per-vertex bitset
    """

    n: int
    edges: Tuple[Edge, ...] = ()
    adjacency: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= settings.VERTEX_HARD_CAP:
            raise GraphFormatError(
                f"vertex count {self.n} outside 1..{settings.VERTEX_HARD_CAP}", reason="vertex_cap"
            )
        normalized = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}", reason="self_loop")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(
                    f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}", reason="vertex_out_of_range"
                )
            normalized.append((u, v) if u < v else (v, u))
        normalized.sort()
        for first, second in zip(normalized, normalized[1:]):
            if first == second:
                raise GraphFormatError(f"duplicate edge {first}", reason="duplicate_edge")
        adjacency = [0] * self.n
        for u, v in normalized:
            adjacency[u] |= 1 << v
            adjacency[v] |= 1 << u
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "adjacency", tuple(adjacency))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def neighbors(self, v: int) -> List[int]:
        return [u for u in range(self.n) if self.adjacency[v] >> u & 1]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def common_neighbors(self, a: int, b: int) -> int:
        """Bitset of N(a) ∩ N(b)"""
        return self.adjacency[a] & self.adjacency[b]

    def nonadjacent_pairs(self) -> List[Edge]:
        return [(a, b) for a in range(self.n) for b in range(a + 1, self.n) if not self.has_edge(a, b)]

    def with_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.n, self.edges + ((u, v),))

    def without_edge(self, u: int, v: int) -> "Graph":
        target = (min(u, v), max(u, v))
        if target not in self.edges:
            raise GraphFormatError(f"edge {target} not present", reason="dangling_index")
        return Graph(self.n, tuple(e for e in self.edges if e != target))

    def add_isolated(self, count: int = 1) -> "Graph":
        return Graph(self.n + count, self.edges)

    def disjoint_union(self, other: "Graph") -> "Graph":
        shifted = tuple((u + self.n, v + self.n) for u, v in other.edges)
        return Graph(self.n + other.n, self.edges + shifted)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Vertex v becomes perm[v]"""
        return Graph(self.n, tuple((perm[u], perm[v]) for u, v in self.edges))

    def core(self) -> Optional["Graph"]:
        """Edge-induced core: isolated vertices dropped, order kept; None when edgeless"""
        if not self.edges:
            return None
        return Graph(*_compact(self.edges))


@dataclass(frozen=True)
class SubgraphClass:
    """One isomorphism class of positive-even spanning subgraphs of a host"""

    representative: Graph
    canon: str
    multiplicity: int
    edge_count: int


@dataclass(frozen=True)
class TriangleTreeStep:
    kind: str  # "vertex" or "edge"
    index: int


@dataclass(frozen=True)
class TriangleTreeSpec:
    steps: Tuple[TriangleTreeStep, ...] = ()


def _compact(edges: Sequence[Edge]) -> Tuple[int, Tuple[Edge, ...]]:
    """Relabel the vertices touched by `edges` to 0..k-1 keeping their order"""
    used = sorted({x for e in edges for x in e})
    index = {v: i for i, v in enumerate(used)}
    return len(used), tuple((index[u], index[v]) for u, v in edges)


# ---------------------------------------------------------------- graph6 ----


def parse_graph6(text: str, max_vertices: Optional[int] = None) -> Graph:
    """
    Decode one graph6 token (no header line needed, '>>graph6<<' is tolerated)
    Malformed header, out-of-range characters, bad length, nonzero padding and
    vertex-cap violations are reported with distinct reasons
    """
    cap = max_vertices or settings.MAX_VERTICES
    token = text.strip()
    if token.startswith(GRAPH6_HEADER):
        token = token[len(GRAPH6_HEADER):].strip()
    if not token:
        raise GraphFormatError("empty graph6 token", reason="malformed_header")

    for ch in token:
        if not GRAPH6_OFFSET <= ord(ch) <= 126:
            raise GraphFormatError(f"character {ch!r} outside the graph6 range", reason="invalid_character")

    if token[0] == "~":
        # long form is only needed for n >= 63, which is past every cap we allow
        if len(token) < 4:
            raise GraphFormatError("truncated long-form graph6 header", reason="malformed_header")
        raise GraphFormatError(f"long-form graph6 header means n >= 63, cap is {cap}", reason="vertex_cap")

    n = ord(token[0]) - GRAPH6_OFFSET
    if n == 0:
        raise GraphFormatError("graph6 header encodes zero vertices", reason="malformed_header")
    if n > cap:
        raise GraphFormatError(f"graph6 encodes {n} vertices, cap is {cap}", reason="vertex_cap")

    body = token[1:]
    nbits = n * (n - 1) // 2
    expected = (nbits + 5) // 6
    if len(body) != expected:
        raise GraphFormatError(
            f"graph6 body has {len(body)} characters, expected {expected} for n={n}", reason="length_mismatch"
        )

    bits = []
    for ch in body:
        value = ord(ch) - GRAPH6_OFFSET
        bits.extend((value >> shift) & 1 for shift in range(5, -1, -1))
    if any(bits[nbits:]):
        raise GraphFormatError("graph6 padding bits are not zero", reason="trailing_bits")

    edges = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                edges.append((i, j))
            pos += 1
    return Graph(n, tuple(edges))


def to_networkx(graph: Graph) -> nx.Graph:
    converted = nx.Graph()
    converted.add_nodes_from(range(graph.n))
    converted.add_edges_from(graph.edges)
    return converted


def to_graph6(graph: Graph) -> str:
    """Headerless graph6 token, isolated vertices kept"""
    return nx.to_graph6_bytes(to_networkx(graph), header=False).decode("ascii").strip()


# ------------------------------------------------------------- edge lists ---


def parse_edge_list(text: str, max_vertices: Optional[int] = None) -> Graph:
    """
    Lines "u v"; optional first line "n=<k>" forces the vertex count
    Commas count as line breaks so "0 1,1 2" works from the command line
    """
    cap = max_vertices or settings.MAX_VERTICES
    lines = [line.strip() for line in text.replace(",", "\n").splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]

    forced_n = None
    if lines and lines[0].replace(" ", "").lower().startswith("n="):
        raw = lines.pop(0).replace(" ", "")[2:]
        try:
            forced_n = int(raw)
        except ValueError:
            raise GraphFormatError(f"vertex count {raw!r} is not an integer", reason="non_integer")
        if forced_n < 1:
            raise GraphFormatError("forced vertex count must be positive", reason="vertex_cap")

    edges: List[Edge] = []
    seen = set()
    for number, line in enumerate(lines, start=1):
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"line {number}: expected 'u v', got {line!r}", reason="bad_line")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"line {number}: non-integer token in {line!r}", reason="non_integer")
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {number}: negative vertex index", reason="non_integer")
        if u == v:
            raise GraphFormatError(f"line {number}: self-loop at vertex {u}", reason="self_loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"line {number}: duplicate edge {key}", reason="duplicate_edge")
        seen.add(key)
        edges.append(key)

    if forced_n is None and not edges:
        raise GraphFormatError("edge list is empty", reason="empty_input")
    n = forced_n if forced_n is not None else max(x for e in edges for x in e) + 1
    if forced_n is not None and edges and max(x for e in edges for x in e) >= forced_n:
        raise GraphFormatError(f"edge endpoint exceeds forced n={forced_n}", reason="vertex_out_of_range")
    if n > cap:
        raise GraphFormatError(f"{n} vertices, cap is {cap}", reason="vertex_cap")
    return Graph(n, tuple(edges))


# --------------------------------------------------------- triangle trees ---


def parse_triangle_tree(text: str) -> TriangleTreeSpec:
    """Comma-separated steps: "e<edge index>" or "v<vertex index>"; empty means K3"""
    steps = []
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        kind = {"e": "edge", "v": "vertex"}.get(token[0].lower())
        if kind is None:
            raise GraphFormatError(f"triangle-tree step {token!r} must start with e or v", reason="bad_line")
        try:
            index = int(token[1:])
        except ValueError:
            raise GraphFormatError(f"triangle-tree step {token!r} has no integer index", reason="non_integer")
        steps.append(TriangleTreeStep(kind, index))
    return TriangleTreeSpec(tuple(steps))


def gen_triangle_tree(spec: TriangleTreeSpec) -> Graph:
    """
    Replay the attach steps starting from K3
    vertex step: glue a new triangle at an existing vertex (two new vertices)
    edge step: glue a new triangle along an existing edge (one new vertex);
    the edge index refers to the current sorted edge list
    """
    n = 3
    edges: List[Edge] = [(0, 1), (0, 2), (1, 2)]
    for number, step in enumerate(spec.steps, start=1):
        if step.kind == "vertex":
            if not 0 <= step.index < n:
                raise GraphFormatError(
                    f"step {number}: vertex {step.index} does not exist (n={n})", reason="dangling_index"
                )
            x, y = n, n + 1
            edges += [(step.index, x), (step.index, y), (x, y)]
            n += 2
        elif step.kind == "edge":
            if not 0 <= step.index < len(edges):
                raise GraphFormatError(
                    f"step {number}: edge {step.index} does not exist (m={len(edges)})", reason="dangling_index"
                )
            u, v = edges[step.index]
            edges += [(u, n), (v, n)]
            n += 1
        else:
            raise GraphFormatError(f"step {number}: unknown kind {step.kind!r}", reason="bad_line")
        edges.sort()
    return Graph(n, tuple(edges))


def random_triangle_tree(num_steps: int, rng: np.random.Generator, max_vertices: int = 10) -> TriangleTreeSpec:
    """Random attach sequence, stopping early once the vertex budget would be exceeded"""
    steps = []
    n, m = 3, 3
    for _ in range(num_steps):
        if n + 1 > max_vertices:
            break
        if n + 2 <= max_vertices and rng.random() < 0.5:
            steps.append(TriangleTreeStep("vertex", int(rng.integers(n))))
            n, m = n + 2, m + 3
        else:
            steps.append(TriangleTreeStep("edge", int(rng.integers(m))))
            n, m = n + 1, m + 2
    return TriangleTreeSpec(tuple(steps))


# ------------------------------------------------------- canonical labels ---


@lru_cache(maxsize=16)
def _permutation_table(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=np.int16)


def _rank(values: Sequence) -> List[int]:
    ranking = {value: rank for rank, value in enumerate(sorted(set(values)))}
    return [ranking[value] for value in values]


def _refine(nbrs: List[List[int]], colors: Sequence) -> List[int]:
    """Colour refinement until the number of colours stops growing; ranks depend only on signatures"""
    colors = _rank(colors)
    while True:
        signatures = [(colors[v], tuple(sorted(colors[u] for u in nb))) for v, nb in enumerate(nbrs)]
        refined = _rank(signatures)
        if len(set(refined)) == len(set(colors)):
            return refined
        colors = refined


def _cells(colors: List[int]) -> List[List[int]]:
    cells: Dict[int, List[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    return [cells[c] for c in sorted(cells)]


def _cell_relabelings(cells: List[List[int]]) -> np.ndarray:
    """Every relabeling that keeps each cell in its block of positions, one per row"""
    result = np.zeros((1, 0), dtype=np.int64)
    for cell in cells:
        table = np.asarray(cell, dtype=np.int64)[_permutation_table(len(cell))]
        result = np.concatenate(
            [np.repeat(result, len(table), axis=0), np.tile(table, (len(result), 1))], axis=1
        )
    return result


def _min_upper_bits(adjacency: np.ndarray, perms: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> bytes:
    """Lexicographically smallest packed upper-triangle row over the given relabelings"""
    bits = adjacency[perms[:, rows], perms[:, cols]]
    packed = np.packbits(bits, axis=1)
    order = np.lexsort(packed.T[::-1])
    return packed[order[0]].tobytes()


@dataclass
class _LabelSearch:
    """Individualize-and-refine search; leaves small enough are finished with a numpy minimum"""

    adjacency: np.ndarray
    nbrs: List[List[int]]
    rows: np.ndarray
    cols: np.ndarray
    leaf_batch: int
    budget: int
    tried: int = 0

    def best(self, colors: List[int]) -> bytes:
        cells = _cells(colors)
        leaf_size = math.prod(math.factorial(len(cell)) for cell in cells)
        if leaf_size <= self.leaf_batch:
            self.tried += leaf_size
            if self.tried > self.budget:
                raise BudgetExceededError(
                    f"canonical form tried more than {self.budget} relabelings"
                )
            return _min_upper_bits(self.adjacency, _cell_relabelings(cells), self.rows, self.cols)

        target = max(cells, key=len)
        best: Optional[bytes] = None
        for v in target:
            branch = _refine(self.nbrs, [(c, 0 if u == v else 1) for u, c in enumerate(colors)])
            current = self.best(branch)
            if best is None or current < best:
                best = current
        return best


@lru_cache(maxsize=200_000)
def _canonical_label(
    k: int,
    edges: Tuple[Edge, ...],
    leaf_batch: int,
    refined_max: int,
    permutation_budget: int,
) -> str:
    if k == 0:
        return "0:"
    if k > refined_max:
        raise BudgetExceededError(f"canonical form supports at most {refined_max} non-isolated vertices, got {k}")

    adjacency = np.zeros((k, k), dtype=bool)
    for u, v in edges:
        adjacency[u, v] = adjacency[v, u] = True
    rows, cols = np.triu_indices(k, 1)
    nbrs = [np.flatnonzero(adjacency[v]).tolist() for v in range(k)]

    search = _LabelSearch(adjacency, nbrs, rows, cols, leaf_batch, permutation_budget)
    best = search.best(_refine(nbrs, [len(nb) for nb in nbrs]))
    return f"{k}:{best.hex()}"


def canonical_core_label(core_vertices: int, core_edges: Tuple[Edge, ...]) -> str:
    return _canonical_label(
        core_vertices,
        core_edges,
        settings.CANON_LEAF_BATCH,
        settings.CANON_REFINED_MAX,
        settings.CANON_PERMUTATION_BUDGET,
    )


def canonical_form(graph: Graph) -> str:
    """
    Isomorphism-invariant label after dropping isolated vertices:
    "<k>:<hex of the minimal upper-triangle bitstring>" over admissible relabelings
    """
    if not graph.edges:
        return "0:"
    return canonical_core_label(*_compact(graph.edges))


# ----------------------------------------------- even spanning subgraphs ---


def _check_subset_budget(graph: Graph, max_subset_bits: Optional[int]) -> None:
    cap = max_subset_bits or settings.MAX_SUBSET_BITS
    if graph.m > cap:
        raise BudgetExceededError(f"e(H)={graph.m} is over the subset budget of {cap} edges")


def even_edge_masks(m: int) -> Iterator[int]:
    """All nonzero masks over m edges with an even popcount: 2^(m-1) - 1 of them"""
    if m < 2:
        return
    top = m - 1
    for low in range(1, 1 << top):
        yield low | ((low.bit_count() & 1) << top)


def subset_core(graph: Graph, mask: int) -> Tuple[int, Tuple[Edge, ...]]:
    chosen = [graph.edges[i] for i in range(graph.m) if mask >> i & 1]
    return _compact(chosen)


def iter_even_subgraphs(graph: Graph, max_subset_bits: Optional[int] = None) -> Iterator[Graph]:
    """Per-subset path (no dedupe): yields the core of every positive even edge subset"""
    _check_subset_budget(graph, max_subset_bits)
    for mask in even_edge_masks(graph.m):
        k, edges = subset_core(graph, mask)
        yield Graph(k, edges)


def even_spanning_subgraphs(graph: Graph, max_subset_bits: Optional[int] = None) -> List[SubgraphClass]:
    """
    Classes of spanning subgraphs with a positive even number of edges,
    keyed by the canonical form of the edge-induced core; the representative
    is the first subset met in mask order
    """
    _check_subset_budget(graph, max_subset_bits)
    buckets: Dict[str, List] = {}
    for mask in even_edge_masks(graph.m):
        k, edges = subset_core(graph, mask)
        label = canonical_core_label(k, edges)
        bucket = buckets.get(label)
        if bucket is None:
            buckets[label] = [k, edges, 1]
        else:
            bucket[2] += 1
    classes = [
        SubgraphClass(Graph(k, edges), label, count, len(edges)) for label, (k, edges, count) in buckets.items()
    ]
    classes.sort(key=lambda c: (c.edge_count, c.canon))
    logger.debug(f"{len(classes)} even subgraph classes for a host with {graph.m} edges")
    return classes


# ------------------------------------------------------------------ girth ---


def girth(graph: Graph) -> Optional[int]:
    """Length of a shortest cycle, None for forests"""
    length = nx.girth(to_networkx(graph))
    return None if math.isinf(length) else int(length)


def has_triangle(graph: Graph) -> bool:
    return any(graph.common_neighbors(u, v) for u, v in graph.edges)


# ---------------------------------------------------- isomorphism classes ---


def enumerate_graphs(n: int) -> List[Graph]:
    """
    One representative per isomorphism class of graphs on exactly n vertices
    Vertex augmentation: every class on n-1 vertices plus a new vertex joined
    to each subset of the old ones, deduped by canonical label
    """
    if n < 1:
        return []
    layer = [Graph(1, ())]
    for size in range(2, n + 1):
        found: Dict[str, Graph] = {}
        newcomer = size - 1
        for base in layer:
            for nbr_mask in range(1 << newcomer):
                extra = tuple((u, newcomer) for u in range(newcomer) if nbr_mask >> u & 1)
                candidate = Graph(size, base.edges + extra)
                found.setdefault(canonical_form(candidate), candidate)
        layer = sorted(found.values(), key=lambda g: (g.m, canonical_form(g)))
        logger.debug(f"{len(layer)} graphs on {size} vertices")
    return layer


def enumerate_graphs_by_subsets(n: int) -> List[Graph]:
    """Raw dedupe of all edge subsets of K_n; only sensible for small n"""
    pairs = list(itertools.combinations(range(n), 2))
    found: Dict[str, Graph] = {}
    for mask in range(1 << len(pairs)):
        candidate = Graph(n, tuple(pairs[i] for i in range(len(pairs)) if mask >> i & 1))
        found.setdefault(canonical_form(candidate), candidate)
    return sorted(found.values(), key=lambda g: (g.m, canonical_form(g)))


def parse_graph_input(
    g6: Optional[str] = None,
    edges: Optional[str] = None,
    tree: Optional[str] = None,
    max_vertices: Optional[int] = None,
) -> Graph:
    """Exactly one of the three input forms"""
    given = [x is not None for x in (g6, edges, tree)]
    if sum(given) != 1:
        raise GraphFormatError("give exactly one of g6, edges, tree", reason="empty_input")
    if g6 is not None:
        return parse_graph6(g6, max_vertices)
    if edges is not None:
        return parse_edge_list(edges, max_vertices)
    graph = gen_triangle_tree(parse_triangle_tree(tree))
    cap = max_vertices or settings.MAX_VERTICES
    if graph.n > cap:
        raise GraphFormatError(f"triangle tree has {graph.n} vertices, cap is {cap}", reason="vertex_cap")
    return graph
