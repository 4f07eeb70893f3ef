"""
Domain models - kernels, density pairs and the reports the certifier produces
Pydantic with arbitrary types so Fractions and Polynomials pass through untouched
"""
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, InstanceOf, computed_field, model_validator

from services.graph_service import Edge, Graph, SubgraphClass
from utils.polyq import Polynomial


class _Frozen(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class StepKernel(_Frozen):
    """
    k-block symmetric kernel; block i has measure measures[i] and the kernel is
    entries[i][j] on block i x block j (constants are degree-0 polynomials)
    """

    k: int = Field(..., ge=1)
    measures: Tuple[Fraction, ...]
    entries: Tuple[Tuple[Polynomial, ...], ...]

    @model_validator(mode="after")
    def check_shape(self):
        if len(self.measures) != self.k or len(self.entries) != self.k:
            raise ValueError("measures and entries must have k blocks")
        if any(len(row) != self.k for row in self.entries):
            raise ValueError("entries must be a k x k matrix")
        if any(m <= 0 for m in self.measures):
            raise ValueError("block measures must be positive")
        if sum(self.measures) != 1:
            raise ValueError("block measures must sum to 1")
        for i in range(self.k):
            for j in range(i + 1, self.k):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError(f"kernel is not symmetric at ({i}, {j})")
        return self

    @classmethod
    def constant_blocks(cls, measures, values) -> "StepKernel":
        """Build from plain rationals, e.g. a kernel W with values in [0, 1]"""
        return cls(
            k=len(measures),
            measures=tuple(Fraction(m) for m in measures),
            entries=tuple(tuple(Polynomial.constant(Fraction(v)) for v in row) for row in values),
        )

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries[i][j]

    def is_constant(self) -> bool:
        return all(e.degree <= 0 for row in self.entries for e in row)

    def constant_values(self) -> List[List[Fraction]]:
        if not self.is_constant():
            raise ValueError("kernel has non-constant entries")
        return [[e.coeff(0) for e in row] for row in self.entries]

    def map_entries(self, fn: Callable[[Polynomial], Polynomial]) -> "StepKernel":
        return StepKernel(
            k=self.k, measures=self.measures, entries=tuple(tuple(fn(e) for e in row) for row in self.entries)
        )

    def evaluate_at(self, p) -> "StepKernel":
        """Specialize polynomial entries at a rational p"""
        return self.map_entries(lambda e: Polynomial.constant(e(p)))

    def is_balanced_two_block(self) -> bool:
        """Two halves with equal diagonal - the shape the histogram engine handles"""
        return (
            self.k == 2
            and self.measures[0] == self.measures[1]
            and self.entries[0][0] == self.entries[1][1]
        )


class WeightedGraph(_Frozen):
    """Finite weighted graph (loops allowed) - a step kernel at a concrete p"""

    n: int = Field(..., ge=1)
    vertex_weights: Tuple[Fraction, ...]
    edge_weights: Tuple[Tuple[Fraction, ...], ...]

    @model_validator(mode="after")
    def check_weights(self):
        if len(self.vertex_weights) != self.n or len(self.edge_weights) != self.n:
            raise ValueError("weights must have n entries")
        if any(len(row) != self.n for row in self.edge_weights):
            raise ValueError("edge weights must be an n x n matrix")
        if any(w <= 0 for w in self.vertex_weights) or sum(self.vertex_weights) != 1:
            raise ValueError("vertex weights must be positive and sum to 1")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.edge_weights[i][j] != self.edge_weights[j][i]:
                    raise ValueError(f"edge weights not symmetric at ({i}, {j})")
        return self


class DensityPair(_Frozen):
    """Restricted densities for a nonadjacent pair: f (same block) and g (different blocks)"""

    f: Polynomial
    g: Polynomial
    pair: Edge


class DeltaReport(_Frozen):
    graph: str = Field(..., description="canonical label")
    edge_count: int
    delta: Polynomial
    c3: Fraction
    p3_divisible: bool
    p4_divisible: bool
    has_triangle: bool


class ClassDelta(_Frozen):
    subgraph_class: InstanceOf[SubgraphClass]
    delta: Polynomial


class DeficitCertificate(_Frozen):
    graph: InstanceOf[Graph]
    canonical: str
    applicable: bool
    reason: str = ""
    # None when the deficit came from the expansion path (sweeps)
    classes: Optional[List[ClassDelta]] = None
    deficit: Polynomial
    c3: Fraction
    witness_p: Optional[Fraction] = None
    witness_value: Optional[Fraction] = None


class LemmaCheck(BaseModel):
    """Outcome of one lemma over a graph (and all its nonadjacent pairs where relevant)"""

    name: str
    checked: int = 0
    vacuous: int = 0
    failed: int = 0
    failure: Optional[str] = None

    @computed_field
    @property
    def status(self) -> str:
        if self.failed:
            return "fail"
        if not self.checked:
            return "not-applicable"
        if self.vacuous == self.checked:
            return "vacuous-pass"
        return "pass"

    def record(self, ok: bool, datum: str = "", vacuous: bool = False) -> None:
        self.checked += 1
        if vacuous:
            self.vacuous += 1
        if not ok:
            self.failed += 1
            if self.failure is None:
                self.failure = datum


class LemmaReport(BaseModel):
    graph: str
    n: int
    m: int
    pairs_checked: int = 0
    checks: Dict[str, LemmaCheck] = Field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks.values())

    def status_map(self) -> Dict[str, str]:
        return {name: check.status for name, check in sorted(self.checks.items())}

    def failures(self) -> Dict[str, str]:
        return {name: c.failure or "" for name, c in self.checks.items() if c.status == "fail"}


class LocalWitness(_Frozen):
    p: Fraction
    epsilon0: Fraction
    sampled_epsilons: List[Fraction]
    values: List[Fraction]
    epsilon_polynomial: Polynomial = Field(..., description="coefficient j is the sum of Δ_F(p) over F with j edges")


class GirthReport(_Frozen):
    girth: Optional[int]
    deficit: Polynomial
    lowest_index: Optional[int] = None
    lowest_sign: Optional[int] = None


class ChainStep(_Frozen):
    added_edge: Optional[Edge] = None
    edge_count: int
    has_triangle: bool
    c3: Fraction
