"""
Soliton Service - identity audits for steady and shrinking soliton samples
and volume (noncollapsing) checks on finite spaces.
"""

import logging
from typing import Callable, Dict, List, Optional, Tuple

from grs.exceptions import InvalidParameterError, NegativeRootError
from grs.models.metric import MetricSpace, ScalarField, SolitonKind, SolitonSample
from grs.numeric import FLOAT_TOLERANCE, Number, le, lt, sqrt
from grs.schemas.reports import AuditClause, AuditReport, NoncollapsingReport, VolumeViolation
from grs.services.metric_service import candidate_radii, edge_pairs

logger = logging.getLogger(__name__)


def _worst(values: Dict[str, Number]) -> Tuple[Number, Optional[str]]:
    """Largest residual and the first point attaining it."""
    if not values:
        return 0, None
    top = max(values.values())
    return top, next(p for p, v in values.items() if v == top)


def _clause(name: str, residuals: Dict[str, Number], tol: float,
            holds: Optional[Callable[[], bool]] = None) -> AuditClause:
    worst, witness = _worst(residuals)
    passed = worst <= tol if holds is None else holds()
    return AuditClause(name=name, passed=passed, max_residual=worst, witness=witness if worst else None)


def _sqrt_f(sample: SolitonSample, point: str) -> float:
    value = sample.f[point]
    if value < 0:
        raise NegativeRootError(f"f = {value} < 0 at '{point}' under a square root", element=point)
    return sqrt(value)


def audit_soliton_identities(
    sample: SolitonSample,
    space: MetricSpace,
    tol: float,
    scale: Number = 1,
) -> AuditReport:
    """
    Per-identity residuals.

    steady: R in [0, 1], |grad f|^2 + R = 1, and constancy of |grad f|^2 + R.
    shrinking: 0 < R <= f, |grad f|^2 <= f - R, |grad f|^2 + R = f (reported
    divided by `scale`), and |sqrt f(a) - sqrt f(b)| <= len on every edge.
    """
    sample.require("kind", "f", "r_scal", "gradf")
    if tol <= 0:
        raise InvalidParameterError(f"Tolerance must be positive, got {tol}", element=tol)
    points = space.points
    grad, R, f = sample.gradf, sample.r_scal, sample.f
    energy = {p: grad[p] * grad[p] + R[p] for p in points}
    clauses: List[AuditClause] = []
    gradient_constant = None

    if sample.kind is SolitonKind.STEADY:
        range_res = {p: max(0, -R[p], R[p] - 1) for p in points}
        clauses.append(_clause("scalar_range", range_res, tol))
        clauses.append(_clause("steady_normalized", {p: abs(energy[p] - 1) for p in points}, tol))
        spread = max(energy.values()) - min(energy.values())
        low = min(energy.values())
        spread_res = {p: energy[p] - low for p in points}
        clauses.append(_clause("steady_constancy", spread_res, tol))
        gradient_constant = spread <= tol
    else:
        range_res = {p: max(0, -R[p], R[p] - f[p]) for p in points}
        clauses.append(_clause(
            "scalar_range", range_res, tol,
            holds=lambda: all(R[p] > 0 and le(R[p], f[p] + tol) for p in points),
        ))
        bound_res = {p: max(0, grad[p] * grad[p] - (f[p] - R[p])) for p in points}
        clauses.append(_clause("shrinking_bound", bound_res, tol))
        clauses.append(_clause("normalization", {p: abs(energy[p] - f[p]) / scale for p in points}, tol))

        roots = {p: _sqrt_f(sample, p) for p in points}
        edge_res = {}
        for a, b, length in edge_pairs(space):
            edge_res[f"{a}|{b}"] = max(0.0, abs(roots[a] - roots[b]) - float(length))
        clauses.append(_clause("lipschitz", edge_res, tol))

    report = AuditReport(kind=sample.kind.value, tol=tol, clauses=clauses, gradient_constant=gradient_constant)
    logger.info(f"Audit ({sample.kind.value}): {[(c.name, c.passed) for c in clauses]}")
    return report


def check_noncollapsing(
    sample: SolitonSample,
    space: MetricSpace,
    field: ScalarField,
    kappa: Number,
    tol: float = FLOAT_TOLERANCE,
) -> NoncollapsingReport:
    """
    Volume lower bounds.

    At every x with Q = P(x) > 0: Vol B(x, Q^-1/2) >= kappa Q^-2.
    At every x and candidate radius r with r^2 sup_{B_r(x)} P <= 1:
    Vol B_r(x) >= kappa r^4.
    """
    sample.require("vol")
    if kappa <= 0:
        raise InvalidParameterError(f"kappa must be positive, got {kappa}", element=kappa)

    vol = sample.vol
    radii = candidate_radii(space)
    violations: List[VolumeViolation] = []
    ratios: List[Number] = []

    for x in space.points:
        ordered = sorted(zip(space.dist_row(x), space.points))

        q = field[x]
        if q > 0:
            volume = sum(vol[y] for d, y in ordered if lt(d * d * q, 1, tol))
            ratio = volume * q * q
            ratios.append(ratio)
            if lt(ratio, kappa, tol):
                violations.append(VolumeViolation(
                    point=x, radius=sqrt(1 / q), volume=volume, bound=kappa / (q * q), check="curvature-scale",
                ))

        i, volume, peak = 0, 0, 0
        for r in radii:
            while i < len(ordered) and lt(ordered[i][0], r, tol):
                volume += vol[ordered[i][1]]
                peak = max(peak, field[ordered[i][1]])
                i += 1
            if not le(r * r * peak, 1, tol):
                break
            r4 = r ** 4
            ratios.append(volume / r4)
            if lt(volume, kappa * r4, tol):
                violations.append(VolumeViolation(
                    point=x, radius=r, volume=volume, bound=kappa * r4, check="volume-growth",
                ))

    kappa_max = min(ratios) if ratios else None
    logger.info(f"Noncollapsing: {len(ratios)} checks, {len(violations)} violations, kappa_max = {kappa_max}")
    return NoncollapsingReport(kappa=kappa, violations=violations, kappa_max=kappa_max, checked=len(ratios))
