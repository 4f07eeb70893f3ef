"""
Certify service - deficits, non-strong-commonness certificates and lemma checks
The deficit Σ_F Δ_F(p) over even spanning subgraphs has a negative p^3
coefficient whenever H properly contains a triangle, so some small dyadic p
makes it negative. We find that p and hand back everything needed to check it
"""
import logging
import math
import threading
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from app.config import Settings, settings as default_settings
from models.schemas import CertificateDocument
from models.data_models import (
    ChainStep,
    ClassDelta,
    DeficitCertificate,
    DeltaReport,
    GirthReport,
    LemmaCheck,
    LemmaReport,
    LocalWitness,
    StepKernel,
)
from services.density_service import DensityService, affine_kernel, edge_density_power
from services.graph_service import (
    Graph,
    canonical_form,
    even_spanning_subgraphs,
    girth,
    has_triangle,
    iter_even_subgraphs,
)
from utils.errors import InternalInconsistencyError, NotApplicableError, PreconditionError
from utils.polyq import Polynomial, binomial_power, divisible_by_p_power, to_rational

logger = logging.getLogger(__name__)

NO_TRIANGLE = "no triangle"
ONLY_TRIANGLE = "does not properly contain a triangle (e=3)"

# report keys of verify_lemma_suite
PAIR_COEFFICIENTS = "pair_coefficients"
COMMON_NEIGHBOR_EQUALITY = "common_neighbor_equality"
P2_TRANSFER = "p2_transfer"
EDGE_ADDITION = "edge_addition"
P3_DIVISIBILITY = "p3_divisibility"
SECOND_COEFFICIENT_SIGN = "second_coefficient_sign"
TRIANGLE_FREE_P4 = "triangle_free_p4"
TRIANGLE_C3_SIGN = "triangle_c3_sign"

LEMMA_KEYS = (
    PAIR_COEFFICIENTS,
    COMMON_NEIGHBOR_EQUALITY,
    P2_TRANSFER,
    EDGE_ADDITION,
    P3_DIVISIBILITY,
    SECOND_COEFFICIENT_SIGN,
    TRIANGLE_FREE_P4,
    TRIANGLE_C3_SIGN,
)


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


class CertifyService:
    def __init__(self, config: Optional[Settings] = None, density: Optional[DensityService] = None):
        self.settings = config or default_settings
        self.density = density or DensityService(self.settings)
        # Δ_F by canonical label of the core; idempotent inserts like the density memo
        self._class_deltas: Dict[str, Polynomial] = {}
        self._class_lock = threading.Lock()

    # -------------------------------------------------------------- delta ---

    def delta_polynomial(self, graph: Graph) -> Polynomial:
        return self.density.hom_density(graph) - edge_density_power(graph.m)

    def delta(self, graph: Graph) -> DeltaReport:
        d = self.delta_polynomial(graph)
        p3, _ = divisible_by_p_power(d, 3)
        p4, _ = divisible_by_p_power(d, 4)
        return DeltaReport(
            graph=canonical_form(graph),
            edge_count=graph.m,
            delta=d,
            c3=d.coeff(3),
            p3_divisible=p3,
            p4_divisible=p4,
            has_triangle=has_triangle(graph),
        )

    def class_delta(self, representative: Graph, canon: str) -> Polynomial:
        cached = self._class_deltas.get(canon)
        if cached is not None:
            return cached
        value = self.delta_polynomial(representative)
        with self._class_lock:
            self._class_deltas.setdefault(canon, value)
        return value

    # ------------------------------------------------------------ deficit ---

    def deficit(self, graph: Graph) -> Tuple[List[ClassDelta], Polynomial]:
        """Class path: Σ multiplicity * Δ_F over deduplicated even subgraph classes"""
        classes = []
        total = Polynomial.zero()
        for sub in even_spanning_subgraphs(graph, self.settings.MAX_SUBSET_BITS):
            d = self.class_delta(sub.representative, sub.canon)
            classes.append(ClassDelta(subgraph_class=sub, delta=d))
            total = total + d * sub.multiplicity
        return classes, total

    def raw_deficit(self, graph: Graph) -> Polynomial:
        """Per-subset path, no dedupe - kept as a cross-check for the class path"""
        total = Polynomial.zero()
        for sub in iter_even_subgraphs(graph, self.settings.MAX_SUBSET_BITS):
            total = total + self.delta_polynomial(sub)
        return total

    def expansion_deficit(self, graph: Graph) -> Polynomial:
        """
        Σ_F t_F(U_p) straight from the block histogram:
        per assignment Σ_F Π_{uv∈F} w_uv = (Π(1+w) + Π(1-w))/2 - 1, and with m
        edges inside a block Π(1+w) = (2p)^m [m = e], Π(1-w) = (2-2p)^m 2^(e-m).
        The (p-1)^e(F) side sums to ((p^e + (2-p)^e)/2 - 1)
        """
        e = graph.m
        if e < 2:
            return Polynomial.zero()
        counts = self.density.same_block_histogram(graph, {graph.n - 1: 0})
        two_minus_2p = Polynomial((2, -2))
        acc = Polynomial.zero()
        power = Polynomial.one()
        for m, count in enumerate(counts):
            if count:
                acc = acc + power * (count * 2 ** (e - m))
            power = power * two_minus_2p
        # only the all-inside assignments keep the (2p)^e term
        acc = acc + Polynomial.monomial(e, 2 ** e) * counts[e]
        even_sum = acc * Fraction(2, 2 ** graph.n) * Fraction(1, 2) - 1
        baseline = (Polynomial.monomial(e) + binomial_power(-2, e) * (-1) ** e) * Fraction(1, 2) - 1
        return even_sum - baseline

    # -------------------------------------------------------- certificate ---

    def certify_not_strongly_common(
        self, graph: Graph, include_classes: bool = True, max_halvings: Optional[int] = None
    ) -> DeficitCertificate:
        """
        Applicable iff H has a triangle and e(H) >= 4. The deficit is computed
        either way (K3 and triangle-free graphs still get their polynomial)
        """
        canonical = canonical_form(graph)
        if include_classes:
            classes, deficit = self.deficit(graph)
            check = self.expansion_deficit(graph)
            if check != deficit:
                raise InternalInconsistencyError(
                    f"class deficit {deficit} and expansion deficit {check} disagree for {canonical}"
                )
        else:
            classes, deficit = None, self.expansion_deficit(graph)

        c3 = deficit.coeff(3)
        reason = ""
        if not has_triangle(graph):
            reason = NO_TRIANGLE
        elif graph.m < 4:
            reason = ONLY_TRIANGLE
        if reason:
            logger.debug(f"{canonical} not applicable: {reason}")
            return DeficitCertificate(
                graph=graph, canonical=canonical, applicable=False, reason=reason,
                classes=classes, deficit=deficit, c3=c3,
            )

        if c3 >= 0:
            raise InternalInconsistencyError(f"[3] deficit = {c3} is not negative for {canonical}")
        witness = self.find_negative_witness(deficit, max_halvings)
        value = deficit(witness)
        if value >= 0:
            raise InternalInconsistencyError(f"witness {witness} gives non-negative deficit {value}")
        logger.info(f"certified {canonical}: deficit({witness}) = {value}")
        return DeficitCertificate(
            graph=graph, canonical=canonical, applicable=True, classes=classes,
            deficit=deficit, c3=c3, witness_p=witness, witness_value=value,
        )

    def find_negative_witness(self, d: Polynomial, max_halvings: Optional[int] = None) -> Fraction:
        """Largest p in 1/2, 1/4, ... with d(p) < 0"""
        divisible, _ = divisible_by_p_power(d, 3)
        if not divisible or d.coeff(3) >= 0:
            raise PreconditionError(f"witness search needs p^3 | d with [3]d < 0, got {d}")
        cap = self.settings.MAX_HALVINGS if max_halvings is None else max_halvings
        p = Fraction(1, 2)
        for _ in range(cap):
            if d(p) < 0:
                return p
            p /= 2
        raise InternalInconsistencyError(f"no negative value of {d} after {cap} halvings")

    # ------------------------------------------------------ lemma checks ---

    def verify_lemma_suite(self, graph: Graph, pairs: bool = True) -> LemmaReport:
        """
        Instance checks of the coefficient facts the certificate rests on
        Pairwise checks run over every nonadjacent pair unless pairs=False
        """
        report = LemmaReport(graph=canonical_form(graph), n=graph.n, m=graph.m)
        checks = {key: LemmaCheck(name=key) for key in LEMMA_KEYS}
        e = graph.m
        t_h = self.density.hom_density(graph)
        power = edge_density_power(e)
        d = t_h - power

        d3, _ = divisible_by_p_power(d, 3)
        checks[P3_DIVISIBILITY].record(d3, f"Δ = {d}")
        if has_triangle(graph):
            ok = _sign(d.coeff(3)) == (-1) ** (e - 1)
            checks[TRIANGLE_C3_SIGN].record(ok, f"[3]Δ = {d.coeff(3)} with e = {e}")
        else:
            d4, _ = divisible_by_p_power(d, 4)
            checks[TRIANGLE_FREE_P4].record(d4, f"Δ = {d}")

        if pairs:
            d2, _ = divisible_by_p_power(d, 2)
            for a, b in graph.nonadjacent_pairs():
                self._check_pair(graph, a, b, t_h, power, d, d2, checks)
                report.pairs_checked += 1

        report.checks = checks
        if not report.all_passed:
            logger.error(f"lemma failures on {report.graph}: {report.failures()}")
        return report

    def _check_pair(self, graph, a, b, t_h, power, d, d2, checks) -> None:
        e = graph.m
        pair = self.density.restricted_densities(graph, a, b)
        f, g = pair.f, pair.g
        where = f"pair ({a}, {b})"

        ok = all(f.coeff(j) * g.coeff(j) >= 0 for j in range(e + 1))
        ok = ok and f.coeff(0) == g.coeff(0) and f.coeff(1) == g.coeff(1)
        ok = ok and abs(f.coeff(2)) >= abs(g.coeff(2))
        checks[PAIR_COEFFICIENTS].record(ok, f"{where}: f = {f}, g = {g}")

        empty_common = graph.common_neighbors(a, b) == 0
        checks[COMMON_NEIGHBOR_EQUALITY].record(
            (f.coeff(2) == g.coeff(2)) == empty_common,
            f"{where}: [2]f = {f.coeff(2)}, [2]g = {g.coeff(2)}, common neighbours empty = {empty_common}",
        )

        four_f = f * 4 - power
        if d2:
            ok, _ = divisible_by_p_power(four_f, 2)
            checks[P2_TRANSFER].record(ok, f"{where}: 4f - (p-1)^e = {four_f}")
        else:
            checks[P2_TRANSFER].record(True, vacuous=True)

        bigger = graph.with_edge(a, b)
        t_bigger = self.density.hom_density(bigger)
        d_bigger = t_bigger - edge_density_power(e + 1)
        p = Polynomial.p()
        ok = t_bigger == p * f * 4 - t_h and d_bigger == p * four_f - d
        checks[EDGE_ADDITION].record(ok, f"{where}: t(H+ab) = {t_bigger}")

        checks[SECOND_COEFFICIENT_SIGN].record(
            (-1) ** e * four_f.coeff(2) >= 0, f"{where}: [2](4f - (p-1)^e) = {four_f.coeff(2)}"
        )

    # ------------------------------------------------ inequality checking ---

    def _constant_values(self, kernel: StepKernel) -> List[List[Fraction]]:
        if not kernel.is_constant():
            raise PreconditionError("kernel W must have constant entries")
        values = kernel.constant_values()
        for row in values:
            for v in row:
                if not 0 <= v <= 1:
                    raise PreconditionError(f"kernel entry {v} outside [0, 1]")
        return values

    def inequality_check(self, graph: Graph, kernel: StepKernel) -> Fraction:
        """
        t_H(W) + t_H(1-W) - t_K2(W)^e - t_K2(1-W)^e, exactly
        Negative means W breaks strong commonness for H
        """
        values = self._constant_values(kernel)
        complement = [[1 - v for v in row] for row in values]
        edge = Graph(2, ((0, 1),))
        lhs = self.density.constant_density(graph, kernel.measures, values) + self.density.constant_density(
            graph, kernel.measures, complement
        )
        rhs = (
            self.density.constant_density(edge, kernel.measures, values) ** graph.m
            + self.density.constant_density(edge, kernel.measures, complement) ** graph.m
        )
        return lhs - rhs

    def expansion_identity(self, graph: Graph, kernel: StepKernel) -> bool:
        """
        With U = 2W - 1:
        t_H(W) + t_H(1-W) = 2^(1-e) (1 + Σ_F t_F(U)) and the same with every
        t_F(U) replaced by t_K2(U)^e(F)
        """
        values = self._constant_values(kernel)
        measures = kernel.measures
        complement = [[1 - v for v in row] for row in values]
        shifted = affine_kernel(kernel, 2, -1).constant_values()
        e = graph.m
        scale = Fraction(2, 2 ** e)
        edge = Graph(2, ((0, 1),))

        lhs = self.density.constant_density(graph, measures, values) + self.density.constant_density(
            graph, measures, complement
        )
        classes = even_spanning_subgraphs(graph, self.settings.MAX_SUBSET_BITS)
        sub_sum = sum(
            (c.multiplicity * self.density.constant_density(c.representative, measures, shifted) for c in classes),
            Fraction(0),
        )
        first = lhs == scale * (1 + sub_sum)

        t_w = self.density.constant_density(edge, measures, values)
        t_u = self.density.constant_density(edge, measures, shifted)
        power_lhs = t_w ** e + (1 - t_w) ** e
        power_sum = sum((math.comb(e, j) * t_u ** j for j in range(2, e + 1, 2)), Fraction(0))
        second = power_lhs == scale * (1 + power_sum)
        if not (first and second):
            logger.error(f"expansion identity failed for {canonical_form(graph)} (first={first}, second={second})")
        return first and second

    # ------------------------------------------------------ local witness ---

    def epsilon_profile(self, graph: Graph, p: Fraction) -> Polynomial:
        """
        Polynomial in ε whose coefficient j is Σ_{F even, e(F)=j} Δ_F(p)
        Per assignment the sum of Π_{uv∈F} w_uv over |F| = j is the elementary
        symmetric e_j of the edge weights, i.e. a coefficient of
        (1 + (2p-1)z)^m (1 - z)^(e-m)
        """
        p = Fraction(p)
        e = graph.m
        if e < 2:
            return Polynomial.zero()
        counts = self.density.same_block_histogram(graph, {graph.n - 1: 0})
        inside = Polynomial((1, 2 * p - 1))
        across = Polynomial((1, -1))
        acc = Polynomial.zero()
        for m, count in enumerate(counts):
            if count:
                acc = acc + (inside ** m) * (across ** (e - m)) * count
        acc = acc * Fraction(2, 2 ** graph.n)
        coeffs = [Fraction(0)] * (e + 1)
        for j in range(2, e + 1, 2):
            coeffs[j] = acc.coeff(j) - math.comb(e, j) * (p - 1) ** j
        return Polynomial(coeffs)

    def class_epsilon_profile(self, graph: Graph, p: Fraction) -> Polynomial:
        """Same polynomial aggregated from the subgraph classes"""
        coeffs = [Fraction(0)] * (graph.m + 1)
        for entry in self.deficit(graph)[0]:
            coeffs[entry.subgraph_class.edge_count] += entry.subgraph_class.multiplicity * entry.delta(p)
        return Polynomial(coeffs)

    def local_witness(self, graph: Graph, max_halvings: Optional[int] = None) -> LocalWitness:
        """
        p from the certificate, then the largest dyadic ε0 <= 1 with exact negative samples.
        If the lowest ε-degree term is not negative at that p, p is halved again:
        for small p every even-degree term is led by a non-positive p^3 part
        """
        certificate = self.certify_not_strongly_common(graph, include_classes=False, max_halvings=max_halvings)
        if not certificate.applicable:
            raise NotApplicableError(f"no local witness: {certificate.reason}", reason=certificate.reason)
        cap = self.settings.MAX_HALVINGS if max_halvings is None else max_halvings
        p = certificate.witness_p
        for _ in range(cap):
            profile = self.epsilon_profile(graph, p)
            lowest = profile.lowest_nonzero()
            if lowest is not None and profile.coeff(lowest) < 0:
                epsilon0 = Fraction(1)
                for _ in range(cap):
                    samples = [epsilon0 / 2 ** i for i in range(self.settings.LOCAL_SAMPLES)]
                    values = [profile(eps) for eps in samples]
                    if all(v < 0 for v in values):
                        return LocalWitness(
                            p=p, epsilon0=epsilon0, sampled_epsilons=samples, values=values,
                            epsilon_polynomial=profile,
                        )
                    epsilon0 /= 2
            logger.debug(f"ε-profile at p = {p} has no negative lowest term, halving p")
            p /= 2
        raise InternalInconsistencyError(f"no local witness for {canonical_form(graph)} after {cap} halvings")

    # --------------------------------------------------------- exploring ---

    def girth_explorer(self, graph: Graph) -> GirthReport:
        """Girth and deficit data for odd-girth questions; no verdict"""
        deficit = self.expansion_deficit(graph)
        lowest = deficit.lowest_nonzero()
        return GirthReport(
            girth=girth(graph),
            deficit=deficit,
            lowest_index=lowest,
            lowest_sign=None if lowest is None else _sign(deficit.coeff(lowest)),
        )

    def edge_chain_trace(self, graph: Graph) -> List[ChainStep]:
        """
        Greedy maximal triangle-free H0 in edge order, then the remaining edges
        one by one, with [3]Δ after every step
        """
        kept: List = []
        rest: List = []
        current = Graph(graph.n, ())
        for u, v in graph.edges:
            if current.common_neighbors(u, v):
                rest.append((u, v))
            else:
                current = current.with_edge(u, v)
                kept.append((u, v))

        trace = [ChainStep(edge_count=current.m, has_triangle=False, c3=self.delta_polynomial(current).coeff(3))]
        for u, v in rest:
            current = current.with_edge(u, v)
            trace.append(
                ChainStep(
                    added_edge=(u, v),
                    edge_count=current.m,
                    has_triangle=has_triangle(current),
                    c3=self.delta_polynomial(current).coeff(3),
                )
            )
        return trace


def verify_certificate_document(document: CertificateDocument) -> List[str]:
    """
    Re-check a stored certificate with one exact evaluation; no densities
    are recomputed. Returns the problems found, empty when it holds up
    """
    problems = []
    try:
        deficit = Polynomial.from_strings(document.deficit_coeffs)
        if document.c3 and to_rational(document.c3) != deficit.coeff(3):
            problems.append(f"c3 {document.c3} does not match the deficit coefficients")
        if document.classes is not None:
            total = sum(entry.multiplicity for entry in document.classes)
            expected = 2 ** (document.graph.m - 1) - 1 if document.graph.m >= 1 else 0
            if total != expected:
                problems.append(f"class multiplicities sum to {total}, expected {expected}")
            rebuilt = Polynomial.zero()
            for entry in document.classes:
                rebuilt = rebuilt + Polynomial.from_strings(entry.delta_coeffs) * entry.multiplicity
            if rebuilt != deficit:
                problems.append("classes do not add up to the deficit")
        if document.applicable:
            if document.witness_p is None or document.witness_value is None:
                problems.append("applicable certificate without a witness")
            else:
                p = to_rational(document.witness_p)
                value = to_rational(document.witness_value)
                if not 0 < p <= Fraction(1, 2):
                    problems.append(f"witness p = {document.witness_p} outside (0, 1/2]")
                if deficit(p) != value:
                    problems.append(f"deficit at {document.witness_p} is {deficit(p)}, document says {value}")
                if value >= 0:
                    problems.append(f"witness value {document.witness_value} is not negative")
    except (ValueError, ZeroDivisionError) as e:
        problems.append(f"unreadable rational: {e}")
    return problems
