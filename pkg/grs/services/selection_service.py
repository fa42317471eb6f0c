"""
Selection Service - point selection with checkable certificates.

Starting at y0 with P0 = P(y0), the iteration moves to a point of maximal
field value exceeding 4 O_k inside the open ball of radius A0 O_k^(-1/2)
around the current point, and stops when no such point exists. Radii are
compared squared (d^2 O_k < A0^2) so exact inputs give exact verdicts.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

from grs.exceptions import InvalidParameterError, InvariantViolation, UnknownPointError, ZeroStartError
from grs.models.metric import MetricSpace, ScalarField
from grs.numeric import FLOAT_TOLERANCE, Number, is_exact, le, lt, parse_number, sqrt
from grs.schemas.reports import ChainLink, SelectionCertificate, SelectionGuarantees, VerificationReport
from grs.services.metric_service import ball_squared

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionParams:
    """Start point y0 and scale A0, stored as A0^2 to stay exact."""
    y0: str
    a0_sq: Number

    @classmethod
    def from_a0(cls, y0: str, a0) -> "SelectionParams":
        a0 = a0 if isinstance(a0, float) else parse_number(a0)
        if a0 <= 0:
            raise InvalidParameterError(f"A0 must be positive, got {a0}", element=a0)
        return cls(y0, a0 * a0)

    @classmethod
    def lemma_choice(cls, y0: str, p0: Number) -> "SelectionParams":
        """A0 = P0^(1/2) / 3."""
        return cls(y0, p0 / 9)

    @property
    def a0(self) -> float:
        return sqrt(self.a0_sq)


def iteration_bound(p0: Number, pmax: Number, tol: float = FLOAT_TOLERANCE) -> int:
    """floor(log_4(Pmax / P0)) + 1, an upper bound on the chain length."""
    if p0 <= 0:
        raise InvalidParameterError(f"P0 must be positive, got {p0}", element=p0)
    if lt(pmax, p0, tol):
        raise InvalidParameterError(f"Pmax {pmax} is below P0 {p0}", element=pmax)
    k = 0
    while le(4 ** (k + 1) * p0, pmax, tol):
        k += 1
    return k + 1


def _is_lemma_choice(params: SelectionParams, p0: Number, tol: float) -> bool:
    if is_exact(params.a0_sq, p0):
        return 9 * params.a0_sq == p0
    return le(9 * params.a0_sq, p0, tol) and le(p0, 9 * params.a0_sq, tol)


def select_point(
    space: MetricSpace,
    field: ScalarField,
    params: SelectionParams,
    tol: float = FLOAT_TOLERANCE,
) -> SelectionCertificate:
    """Run the selection iteration from params.y0 and certify the end point."""
    space.position(params.y0)
    p0 = field[params.y0]
    if p0 <= 0:
        raise ZeroStartError(f"Field vanishes at start point '{params.y0}'", element=params.y0)
    if params.a0_sq <= 0:
        raise InvalidParameterError(f"A0 must be positive, got A0^2 = {params.a0_sq}", element=params.a0_sq)

    bound = iteration_bound(p0, field.max(), tol)
    chain = [(params.y0, p0)]
    current, o_k = params.y0, p0

    while True:
        radius_sq = params.a0_sq / o_k
        best = None
        for point, d in zip(space.points, space.dist_row(current)):
            if not lt(d * d, radius_sq, tol):
                continue
            value = field[point]
            if not lt(4 * o_k, value, tol):
                continue
            # points are sorted, so strict > keeps the lexicographically first maximum
            if best is None or value > best[1]:
                best = (point, value)
        if best is None:
            break
        logger.debug(f"Step {len(chain)}: {current} ({o_k}) -> {best[0]} ({best[1]})")
        chain.append(best)
        current, o_k = best
        if len(chain) > bound:
            raise InvariantViolation(f"Chain length {len(chain)} exceeds iteration bound {bound}")

    x0, q0 = current, o_k
    radius_sq = params.a0_sq / q0
    d0 = space.dist(x0, params.y0)
    members = ball_squared(space, x0, radius_sq, tol)
    nested_ok = None
    if _is_lemma_choice(params, p0, tol):
        nested_ok = all(lt(space.dist(y, params.y0), 1, tol) for y in members)

    guarantees = SelectionGuarantees(
        q_ge_p=le(p0, q0, tol),
        dist_ok=lt(d0 * d0 * p0, 4 * params.a0_sq, tol),
        ball_ok=all(le(field[y], 4 * q0, tol) for y in members),
        nested_ok=nested_ok,
    )
    if not (guarantees.q_ge_p and guarantees.dist_ok and guarantees.ball_ok):
        raise InvariantViolation(f"Selection from '{params.y0}' produced an unsound certificate: {guarantees}")

    logger.info(f"Selected {x0} from {params.y0} after {len(chain) - 1} step(s), Q0 = {q0}")
    return SelectionCertificate(
        y0=params.y0,
        a0=params.a0,
        a0_sq=params.a0_sq,
        p0=p0,
        chain=[ChainLink(point=p, value=v) for p, v in chain],
        x0=x0,
        q0=q0,
        radius=sqrt(radius_sq),
        radius_sq=radius_sq,
        guarantees=guarantees,
    )


def verify_certificate(
    space: MetricSpace,
    field: ScalarField,
    params: SelectionParams,
    cert: SelectionCertificate,
    tol: float = FLOAT_TOLERANCE,
) -> VerificationReport:
    """
    Re-check a certificate by exhaustive scans of the distance table.
    Failures are report content; nothing is raised.
    """
    clauses = {}
    try:
        for link in cert.chain:
            space.position(link.point)
        space.position(cert.x0)
        space.position(params.y0)
    except UnknownPointError as e:
        return VerificationReport(clauses={"points_known": False}, failures=[str(e)])
    clauses["points_known"] = True

    a0_sq = params.a0_sq
    p0 = field[params.y0]
    q0 = cert.q0
    chain = cert.chain

    def close(a, b):
        return le(a, b, tol) and le(b, a, tol)

    clauses["chain_start"] = bool(chain) and chain[0].point == params.y0 and close(chain[0].value, p0)
    clauses["chain_values"] = all(close(link.value, field[link.point]) for link in chain)
    clauses["x0_last"] = bool(chain) and chain[-1].point == cert.x0 and close(q0, field[cert.x0])
    clauses["radius_matches"] = close(cert.radius_sq * q0, a0_sq)

    clauses["q_ge_p"] = le(p0, q0, tol)

    d0 = space.dist(cert.x0, params.y0)
    clauses["dist_ok"] = lt(d0 * d0 * p0, 4 * a0_sq, tol)

    ball_ok = True
    for y in space.points:
        d = space.dist(y, cert.x0)
        if lt(d * d, cert.radius_sq, tol) and lt(4 * q0, field[y], tol):
            ball_ok = False
            break
    clauses["ball_ok"] = ball_ok

    growth_ok, steps_ok = True, True
    for prev, nxt in zip(chain, chain[1:]):
        if not lt(4 * prev.value, nxt.value, tol):
            growth_ok = False
        d = space.dist(prev.point, nxt.point)
        if not lt(d * d * prev.value, a0_sq, tol):
            steps_ok = False
    clauses["chain_growth"] = growth_ok
    clauses["chain_steps"] = steps_ok

    chain_dist = True
    for link in chain:
        d = space.dist(link.point, params.y0)
        if not lt(d * d * p0, 4 * a0_sq, tol):
            chain_dist = False
    clauses["chain_dist"] = chain_dist

    pmax = max(field[p] for p in space.points)
    clauses["chain_bound"] = le(4 ** (len(chain) - 1) * p0, pmax, tol)

    if _is_lemma_choice(params, p0, tol):
        nested = True
        for y in space.points:
            d = space.dist(y, cert.x0)
            if lt(d * d, cert.radius_sq, tol) and not lt(space.dist(y, params.y0), 1, tol):
                nested = False
        clauses["nested_ok"] = nested

    failures = sorted(name for name, ok in clauses.items() if not ok)
    if failures:
        logger.info(f"Certificate for {params.y0} failed: {failures}")
    return VerificationReport(clauses=clauses, failures=failures)


def select_sequence(
    space: MetricSpace,
    field: ScalarField,
    starts: Sequence[str],
    max_workers: int = 1,
    tol: float = FLOAT_TOLERANCE,
) -> List[SelectionCertificate]:
    """One certificate per start with A_i = P_i^(1/2) / 3; results keep the order of `starts`."""

    def run(start: str) -> SelectionCertificate:
        return select_point(space, field, SelectionParams.lemma_choice(start, field[start]), tol)

    if max_workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run, starts))
    return [run(s) for s in starts]
