"""Pydantic schemas for the structured report documents emitted by every operation."""

from enum import Enum
from typing import Annotated, Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, computed_field

from grs.numeric import format_number

# Fraction or float, serialized exactly ("p/q" for non-integral rationals)
ReportNumber = Annotated[Any, PlainSerializer(format_number)]


def group_view(group: Any) -> Any:
    if group is None:
        return None
    return {"rank": group.rank, "factors": list(group.factors), "label": str(group)}


# FgAbelianGroup serialized as {rank, factors, label}
GroupField = Annotated[Any, PlainSerializer(group_view)]


class Anchor(str, Enum):
    """Citation anchors carried by reports and proof traces."""
    POINT_SELECTION = "point selection: |Rm| <= 4 Q0 on B(x0, A0 Q0^-1/2) and d(x0, y0) < 2 A0 P0^-1/2"
    ITERATE_GROWTH = "iterate growth: O_{k+1} > 4 O_k, hence O_k >= 4^k O_0"
    LEMMA_CONSTANT = "scale choice: A0 = P0^1/2 / 3 gives x0 in B(y0, 2/3)"
    SEQUENCE_SELECTION = "sequence selection: A_i = P_i^1/2 / 3, x_i in B(y_i, 2/3)"
    BOUNDED_CURVATURE = "bounded curvature: |Rm| <= C"
    QUADRATIC_GROWTH = "quadratic growth: |Rm|(x) <= C (d(x, o) + 1)^2"
    BLOWUP_SCALE = "scale-invariant blow-up: P_i (d(y_i, o) + 1)^-2 unbounded"
    BLOWUP_ABSOLUTE = "non-decaying curvature: |Rm|(y_i) >= c"
    SHI_HYPOTHESIS = "local derivative hypothesis: |Rm| <= C r^-2 and |grad f| <= r^-1"
    STEADY_IDENTITY = "steady identity: |grad f|^2 + R = 1"
    SHRINKING_BOUND = "shrinking bound: |grad f| <= sqrt(f - R)"
    LIPSCHITZ = "potential Lipschitz: |grad sqrt f| <= 1"
    NORMALIZATION = "rescaled identity: |grad f_i|^2 + R_{g_i} = f / Q_i"
    NONCOLLAPSING = "noncollapsing: Vol B(x, Q^-1/2) >= kappa Q^-2"
    VOLUME_GROWTH = "Euclidean volume growth: Vol B_r(x) >= kappa r^4"
    SMITH_FORM = "Smith normal form: U m V = D, d_1 | d_2 | ..."
    CONNECTING_ONTO = "inclusion-induced maps H_i(boundary) -> H_i(M) are onto for i = 0..3"
    COKERNEL_INJECTION = "cokernels of disjoint copies inject into H_i(N)"
    SEQUENCE_H1 = "0 -> H2(M, bd) -> H1(bd) -> H1(M) -> 0"
    SEQUENCE_H2 = "0 -> H3(M, bd) -> H2(bd) -> H2(M) -> 0"
    SEQUENCE_H3 = "0 -> H4(M, bd) -> H3(bd) -> H3(M) -> 0"
    UCT_TENSOR = "universal coefficients: H1(bd) (x) Z_p = H1(M) (x) Z_p + H1(M) (x) Z_p"
    ZP_DOUBLING = "Z_p doubling: H1(bd; Z_p) = H1(M; Z_p) + H1(M; Z_p)"
    PRIME_POWER_DOUBLING = "Z/p^k counting: |H1(bd) (x) Z/p^k| = |H1(M) (x) Z/p^k|^2"
    ORDER_IDENTITY = "order identity: |H1(bd)| = |H1(M)|^2"
    DIRECT_DOUBLE = "direct double: H1(bd) = A + A"
    H2_VANISHES = "H2(M; Z) = 0"
    BOUNDARY_DUALITY = "spherical space form: H2(S^3/G) = Hom(H1, Z) = 0, H3(S^3/G) = Z"
    DICHOTOMY = "imported fact: a doubled spherical end group is D*_n with n even or 2I"
    B2_LOWER_BOUND = "imported fact: b2 >= 1 for a Ricci-flat ALE filling of such an end"
    ROCHLIN = "imported fact (Rochlin): the Poincare homology sphere bounds no homology ball"
    BOUNDED_COPIES = "at most a bounded number of disjoint copies"


class ReportModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# Point selection

class ChainLink(ReportModel):
    point: str
    value: ReportNumber


class SelectionGuarantees(ReportModel):
    q_ge_p: bool
    dist_ok: bool
    ball_ok: bool
    nested_ok: Optional[bool] = None


class SelectionCertificate(ReportModel):
    """Witness of the point-selection conclusion for one start."""
    y0: str
    a0: float
    a0_sq: ReportNumber
    p0: ReportNumber
    chain: List[ChainLink]
    x0: str
    q0: ReportNumber
    radius: float
    radius_sq: ReportNumber
    guarantees: SelectionGuarantees


class VerificationReport(ReportModel):
    clauses: Dict[str, bool]
    failures: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(self.clauses.values())


# Growth, blow-up, Shi scale

class GrowthModel(str, Enum):
    BOUNDED = "bounded"
    QUADRATIC = "quadratic"


class GrowthFit(ReportModel):
    model: GrowthModel
    C: ReportNumber
    witness: str


class BlowupMode(str, Enum):
    SCALE_INVARIANT = "scale-invariant"
    ABSOLUTE = "absolute"


class BlowupEntry(ReportModel):
    point: str
    value: ReportNumber
    distance: ReportNumber
    ratio: ReportNumber
    certificate: Optional[SelectionCertificate] = None


class BlowupCandidates(ReportModel):
    mode: BlowupMode
    entries: List[BlowupEntry]


class ShiRadiusReport(ReportModel):
    point: str
    kind: str
    radius: ReportNumber
    cap: ReportNumber
    sup_gradf: ReportNumber
    candidate_radius: Optional[ReportNumber] = None
    constant: int = 1
    shrinking_scale: Optional[ReportNumber] = None


# Soliton audits and volumes

class AuditClause(ReportModel):
    name: str
    passed: bool
    max_residual: ReportNumber
    witness: Optional[str] = None


class AuditReport(ReportModel):
    kind: str
    tol: float
    clauses: List[AuditClause]
    gradient_constant: Optional[bool] = None

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> AuditClause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)


class VolumeViolation(ReportModel):
    point: str
    radius: ReportNumber
    volume: ReportNumber
    bound: ReportNumber
    check: str


class NoncollapsingReport(ReportModel):
    kappa: ReportNumber
    violations: List[VolumeViolation]
    kappa_max: Optional[ReportNumber] = None
    checked: int = 0


# Obstruction

class QuotientOutcome(ReportModel):
    quotient: GroupField
    kept: bool
    failed_rule: Optional[str] = None


class FeasibilityReport(ReportModel):
    group: GroupField
    candidates: List[QuotientOutcome]
    feasible: List[GroupField]
    halving: GroupField = None


class NodeExactness(ReportModel):
    index: int
    group: GroupField
    image: GroupField
    kernel: GroupField
    image_in_kernel: bool
    kernel_in_image: bool

    @computed_field
    @property
    def exact(self) -> bool:
        return self.image_in_kernel and self.kernel_in_image


class ExactnessReport(ReportModel):
    nodes: List[NodeExactness]

    @computed_field
    @property
    def exact(self) -> bool:
        return all(n.exact for n in self.nodes)


class StepKind(str, Enum):
    COMPUTED = "computed"
    CITED = "cited"


class Verdict(str, Enum):
    BOUNDED_COPIES = "bounded-copies"
    INCONCLUSIVE = "inconclusive"


class ProofStep(ReportModel):
    step: int
    claim: str
    anchor: Anchor
    kind: StepKind
    result: Any = None
    contradiction: bool = False


class ObstructionVerdict(ReportModel):
    gamma: str
    family: str
    order: int
    steps: List[ProofStep]
    verdict: Verdict

    def anchors(self) -> List[str]:
        seen: List[str] = []
        for s in self.steps:
            if s.anchor.value not in seen:
                seen.append(s.anchor.value)
        return seen


# Space forms

class SpaceFormReport(ReportModel):
    label: str
    family: str
    param: Optional[int] = None
    order: int
    abelianization: GroupField
    direct_double: bool
    halving: GroupField = None
    boundary_homology: List[GroupField] = Field(default_factory=list)
    annotations: Dict[str, Any] = Field(default_factory=dict)


class DoubleClassification(ReportModel):
    """Catalog split by whether H1 of the end is a direct double."""
    positive: List[str]
    negative: List[str]
    entries: List[SpaceFormReport] = Field(default_factory=list)


class CommandReport(ReportModel):
    """Envelope written by the CLI."""
    command: str
    result: Any
    anchors: List[str] = Field(default_factory=list)
