"""
Obstruction Service - exact sequences and the bounded-copies pipeline.

Exactness is checked on explicit generator presentations: every group is
Z^g modulo its relation lattice, every map an integer matrix, and images
and kernels are lattices computed through the Smith normal form.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import factorint

from grs.config import settings
from grs.exceptions import GroupSpecError, InfiniteGroupError, PresentationError
from grs.models.algebra import FgAbelianGroup, PresentedMap, SequenceSpec
from grs.models.space_form import SpaceFormGroup
from grs.schemas.reports import (
    Anchor,
    ExactnessReport,
    FeasibilityReport,
    NodeExactness,
    ObstructionVerdict,
    ProofStep,
    QuotientOutcome,
    StepKind,
    Verdict,
)
from grs.services import lattice_service as lattice
from grs.services.abelian_service import (
    enumerate_quotients,
    is_direct_double,
    tensor_Zp,
    tensor_Zpk_order,
)
from grs.services.space_form_service import abelianization, boundary_homology, make_group

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


def _relation_vectors(G: FgAbelianGroup) -> List[Vector]:
    return [tuple(row) for row in G.relation_matrix().entries]


def _check_well_defined(index: int, m: PresentedMap) -> None:
    """Relations of the source must land in the relation lattice of the target."""
    n = m.target.generator_count
    target_relations = _relation_vectors(m.target)
    for r in _relation_vectors(m.source):
        image = tuple(sum(a * b for a, b in zip(row, r)) for row in m.matrix.entries)
        if not lattice.in_lattice(image, target_relations, n):
            raise PresentationError(
                f"Map {index} ({m.source} -> {m.target}) does not respect the source relations",
                element=index,
            )


def check_exact(seq: SequenceSpec) -> ExactnessReport:
    """Image and kernel at every interior node, compared as subgroups."""
    for i, m in enumerate(seq.maps):
        _check_well_defined(i, m)

    nodes = []
    for i in range(1, len(seq.groups) - 1):
        G = seq.groups[i]
        n = G.generator_count
        relations = _relation_vectors(G)
        incoming, outgoing = seq.maps[i - 1], seq.maps[i]

        image = incoming.matrix.columns() + relations
        kernel = lattice.preimage(outgoing.matrix, _relation_vectors(outgoing.target))

        node = NodeExactness(
            index=i,
            group=G,
            image=lattice.subquotient(image, relations, n),
            kernel=lattice.subquotient(kernel, relations, n),
            image_in_kernel=lattice.contains(kernel, image, n),
            kernel_in_image=lattice.contains(image, kernel, n),
        )
        logger.debug(f"Node {i} ({G}): image {node.image}, kernel {node.kernel}")
        nodes.append(node)
    return ExactnessReport(nodes=nodes)


def _prime_rules(H: FgAbelianGroup) -> Dict[int, int]:
    """Largest exponent of each prime in H."""
    ed = H.elementary_divisors()
    return {p: max(ed.exponents(p)) for p in ed.primes()}


def _failed_rule(H: FgAbelianGroup, Q: FgAbelianGroup, tops: Dict[int, int]) -> Optional[str]:
    if H.order() != Q.order() ** 2:
        return "order"
    for p in sorted(factorint(H.order())):
        if tensor_Zp(H, p) != 2 * tensor_Zp(Q, p):
            return f"zp-doubling:{p}"
    for p, top in sorted(tops.items()):
        for k in range(2, top + 1):
            if tensor_Zpk_order(H, p, k) != tensor_Zpk_order(Q, p, k) ** 2:
                return f"prime-power-doubling:{p}^{k}"
    return None


def boundary_feasibility(h1_boundary: FgAbelianGroup, cap: Optional[int] = None) -> FeasibilityReport:
    """
    Candidates for H1(M) given H1 of the boundary: quotients Q (the map
    H1(bd) -> H1(M) is onto) with |H| = |Q|^2 and H (x) R = (Q (x) R)^2 in
    size for R = Z_p and Z/p^k.
    """
    if not h1_boundary.is_finite:
        raise InfiniteGroupError(f"{h1_boundary} is infinite", element=str(h1_boundary))
    tops = _prime_rules(h1_boundary)

    outcomes = []
    feasible = []
    for Q in enumerate_quotients(h1_boundary, cap):
        failed = _failed_rule(h1_boundary, Q, tops)
        outcomes.append(QuotientOutcome(quotient=Q, kept=failed is None, failed_rule=failed))
        if failed is None:
            feasible.append(Q)

    _, halving = is_direct_double(h1_boundary)
    logger.info(f"Feasibility of {h1_boundary}: {len(feasible)} of {len(outcomes)} quotients survive")
    return FeasibilityReport(group=h1_boundary, candidates=outcomes, feasible=feasible, halving=halving)


def max_disjoint_copies(h_ambient: FgAbelianGroup, coker: FgAbelianGroup) -> Optional[int]:
    """
    Largest I with coker^I injecting into the ambient group, or None
    (unbounded) when the cokernel is trivial.
    """
    if coker.is_trivial:
        return None

    bounds = []
    if coker.rank:
        bounds.append(h_ambient.rank // coker.rank)

    a, b = coker.elementary_divisors(), h_ambient.elementary_divisors()
    for p in a.primes():
        for e in range(1, max(a.exponents(p)) + 1):
            need = a.count_at_least(p, e)
            bounds.append(b.count_at_least(p, e) // need)
    return min(bounds)


class ObstructionService:
    """Assembles the bounded-copies argument for an end S^3/G."""

    def __init__(self, cap: Optional[int] = None):
        self.cap = settings.QUOTIENT_CAP if cap is None else cap

    def _require_catalog(self, gamma: SpaceFormGroup) -> None:
        try:
            known = make_group(gamma.family, gamma.param)
        except GroupSpecError:
            known = None
        if known != gamma:
            raise GroupSpecError(f"{gamma.label} is not a catalog entry", element=gamma.label)

    def _second_homology_steps(self, gamma: SpaceFormGroup) -> List[ProofStep]:
        h0, h1, h2, h3 = boundary_homology(gamma)
        steps = [ProofStep(
            step=3,
            claim="H2(bd) = 0 and H3(bd) = Z for the spherical space form end",
            anchor=Anchor.BOUNDARY_DUALITY,
            kind=StepKind.COMPUTED,
            result={"H0": str(h0), "H1": str(h1), "H2": str(h2), "H3": str(h3)},
        )]

        # H3(M, bd) = H^1(M) = 0 since H1(M) is finite
        steps.append(ProofStep(
            step=3,
            claim="H2(bd) -> H2(M) is onto",
            anchor=Anchor.SEQUENCE_H2,
            kind=StepKind.CITED,
            result={"H2(bd)": str(h2)},
        ))
        zero = FgAbelianGroup.trivial()
        h2_candidates = enumerate_quotients(h2, self.cap)
        h2_seq = SequenceSpec.from_matrices([zero, zero, h2, h2_candidates[-1], zero], [[], [], [], []])
        h2_report = check_exact(h2_seq)
        steps.append(ProofStep(
            step=3,
            claim="H2(M) = 0: the only quotient of H2(bd) = 0 is 0 and the sequence is exact",
            anchor=Anchor.H2_VANISHES,
            kind=StepKind.COMPUTED,
            result={"candidates": [str(q) for q in h2_candidates], "exact": h2_report.exact},
        ))

        # 0 -> H4(M, bd) = Z -> H3(bd) = Z -> H3(M) -> 0 with the first map an isomorphism
        h3_seq = SequenceSpec.from_matrices([zero, h3, h3, zero, zero], [[], [[1]], [], []])
        h3_report = check_exact(h3_seq)
        steps.append(ProofStep(
            step=3,
            claim="H3(M) = 0: H4(M, bd) = Z maps isomorphically onto H3(bd) = Z",
            anchor=Anchor.SEQUENCE_H3,
            kind=StepKind.COMPUTED,
            result={"H3(M)": "0", "exact": h3_report.exact},
        ))
        return steps

    def run_pipeline(self, gamma: SpaceFormGroup) -> ObstructionVerdict:
        self._require_catalog(gamma)
        steps: List[ProofStep] = []

        # 1. H1 of the end
        h1 = abelianization(gamma)
        steps.append(ProofStep(
            step=1,
            claim=f"H1(bd) = abelianization of {gamma.label}",
            anchor=Anchor.SMITH_FORM,
            kind=StepKind.COMPUTED,
            result=str(h1),
        ))

        # 2. Surjectivity and doubling force a direct double
        steps.append(ProofStep(
            step=2,
            claim="H1(bd) -> H1(M) is onto, so H1(M) is a quotient of H1(bd)",
            anchor=Anchor.SEQUENCE_H1,
            kind=StepKind.CITED,
            result=str(h1),
        ))
        feasibility = boundary_feasibility(h1, self.cap)
        steps.append(ProofStep(
            step=2,
            claim="H1(M) is a quotient of H1(bd) meeting the order and coefficient doubling rules",
            anchor=Anchor.ZP_DOUBLING,
            kind=StepKind.COMPUTED,
            result={
                "feasible": [str(q) for q in feasibility.feasible],
                "eliminated": {str(c.quotient): c.failed_rule for c in feasibility.candidates if not c.kept},
            },
            contradiction=not feasibility.feasible,
        ))
        doubled, halving = is_direct_double(h1)
        steps.append(ProofStep(
            step=2,
            claim="H1(bd) = A + A",
            anchor=Anchor.DIRECT_DOUBLE,
            kind=StepKind.COMPUTED,
            result={"direct_double": doubled, "halving": str(halving) if halving is not None else None},
            contradiction=not doubled,
        ))

        if doubled and gamma.flat_end:
            logger.info(f"{gamma.label}: flat end, argument does not apply")
            return self._verdict(gamma, steps)

        if doubled:
            steps.append(ProofStep(
                step=2,
                claim="a nontrivial end group with doubled H1 is D*_n with n even or 2I",
                anchor=Anchor.DICHOTOMY,
                kind=StepKind.CITED,
                result=gamma.label,
            ))

            # 3. H2(M) = 0 against b2 >= 1
            steps.extend(self._second_homology_steps(gamma))
            if gamma.b2_lower_bound is not None:
                steps.append(ProofStep(
                    step=3,
                    claim="b2 >= 1 contradicts H2(M) = 0",
                    anchor=Anchor.B2_LOWER_BOUND,
                    kind=StepKind.CITED,
                    result=gamma.b2_lower_bound.to_document(),
                    contradiction=True,
                ))

            # 4. Poincare homology sphere branch
            if gamma.rochlin:
                steps.append(ProofStep(
                    step=4,
                    claim="M would be a homology ball bounded by the Poincare homology sphere",
                    anchor=Anchor.ROCHLIN,
                    kind=StepKind.CITED,
                    result={"H1(M)": str(halving), "H2(M)": "0", "H3(M)": "0"},
                    contradiction=True,
                ))

        return self._verdict(gamma, steps)

    def _verdict(self, gamma: SpaceFormGroup, steps: List[ProofStep]) -> ObstructionVerdict:
        bounded = any(s.contradiction for s in steps)
        if bounded:
            steps.append(ProofStep(
                step=max(s.step for s in steps) + 1,
                claim="the end admits at most a bounded number of disjoint copies",
                anchor=Anchor.BOUNDED_COPIES,
                kind=StepKind.COMPUTED,
                result=[s.step for s in steps if s.contradiction],
            ))
        verdict = Verdict.BOUNDED_COPIES if bounded else Verdict.INCONCLUSIVE
        logger.info(f"{gamma.label}: {verdict.value} after {len(steps)} steps")
        return ObstructionVerdict(
            gamma=gamma.label,
            family=gamma.family.value,
            order=gamma.order,
            steps=steps,
            verdict=verdict,
        )

    def run_all(self, groups: Sequence[SpaceFormGroup], max_workers: int = 1) -> List[ObstructionVerdict]:
        if max_workers <= 1:
            return [self.run_pipeline(g) for g in groups]
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(self.run_pipeline, groups))


def run_pipeline(gamma: SpaceFormGroup, cap: Optional[int] = None) -> ObstructionVerdict:
    return ObstructionService(cap).run_pipeline(gamma)
