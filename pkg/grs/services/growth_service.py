"""
Growth Service - curvature growth fits, blow-up candidates and the
admissible radius for local derivative estimates.
"""

import logging
from statistics import median
from typing import List, Optional, Sequence

import pandas as pd

from grs.exceptions import InvalidParameterError
from grs.models.metric import MetricSpace, PointedSpace, ScalarField, SolitonKind, SolitonSample
from grs.numeric import Number
from grs.schemas.reports import BlowupCandidates, BlowupEntry, BlowupMode, GrowthFit, GrowthModel, ShiRadiusReport
from grs.services.selection_service import select_sequence

logger = logging.getLogger(__name__)


def fit_bounded(field: ScalarField) -> GrowthFit:
    """C = max P, witnessed by the lexicographically first maximizer."""
    if not len(field):
        raise InvalidParameterError("Field is empty")
    c = field.max()
    witness = next(p for p, v in field.items() if v == c)
    return GrowthFit(model=GrowthModel.BOUNDED, C=c, witness=witness)


def _ratio_table(pointed: PointedSpace, field: ScalarField) -> pd.DataFrame:
    space = pointed.space
    rows = []
    for point, d in zip(space.points, space.dist_row(pointed.base)):
        value = field[point]
        rows.append({"point": point, "value": value, "distance": d, "ratio": value / ((d + 1) * (d + 1))})
    return pd.DataFrame(rows, columns=["point", "value", "distance", "ratio"])


def fit_quadratic(pointed: PointedSpace, field: ScalarField) -> GrowthFit:
    """C = max P(x) / (d(x, o) + 1)^2."""
    table = _ratio_table(pointed, field)
    ratios = table["ratio"].tolist()
    c = max(ratios)
    witness = table["point"].tolist()[ratios.index(c)]
    return GrowthFit(model=GrowthModel.QUADRATIC, C=c, witness=witness)


def blowup_candidates(
    pointed: PointedSpace,
    field: ScalarField,
    mode: BlowupMode,
    k: int,
    with_certificates: bool = True,
    max_workers: int = 1,
) -> BlowupCandidates:
    """
    Top-k blow-up candidates.

    scale-invariant: ranked by P (d + 1)^-2, descending.
    absolute: points at distance >= the median distance from o, ranked by P.
    Ties go to the lexicographically smaller id.
    """
    mode = BlowupMode(mode)
    if k <= 0:
        raise InvalidParameterError(f"k must be positive, got {k}", element=k)
    if k > len(pointed.space):
        raise InvalidParameterError(f"k = {k} exceeds the {len(pointed.space)} points", element=k)

    table = _ratio_table(pointed, field)
    if mode is BlowupMode.SCALE_INVARIANT:
        ranked = table.sort_values(["ratio", "point"], ascending=[False, True], kind="mergesort")
    else:
        cutoff = median(table["distance"].tolist())
        far = table[[d >= cutoff for d in table["distance"]]]
        ranked = far.sort_values(["value", "point"], ascending=[False, True], kind="mergesort")
    top = ranked.head(k)

    certificates = {}
    if with_certificates:
        starts = [p for p, v in zip(top["point"], top["value"]) if v > 0]
        for cert in select_sequence(pointed.space, field, starts, max_workers=max_workers):
            certificates[cert.y0] = cert

    entries = [
        BlowupEntry(
            point=row.point,
            value=row.value,
            distance=row.distance,
            ratio=row.ratio,
            certificate=certificates.get(row.point),
        )
        for row in top.itertuples(index=False)
    ]
    logger.info(f"{mode.value} blow-up candidates: {[e.point for e in entries]}")
    return BlowupCandidates(mode=mode, entries=entries)


def _radius_cap(sample: SolitonSample, space: MetricSpace) -> Number:
    if sample.kind is SolitonKind.STEADY:
        return 1
    diameter = space.diameter
    return diameter if diameter > 0 else 1


def _candidate_radius(sample: SolitonSample, points: Sequence[str], row: List[Number], cap: Number) -> Optional[Number]:
    """Largest r in {d/2} | {1} | {cap}, r <= cap, with r * sup{ |grad f| : d < 2r } <= 1."""
    candidates = sorted({d / 2 for d in row if d > 0} | {1, cap}, reverse=True)
    for r in candidates:
        if r > cap:
            continue
        if r * max(sample.gradf[q] for q, d in zip(points, row) if d < 2 * r) <= 1:
            return r
    return None


def shi_admissible_radius(
    sample: SolitonSample,
    space: MetricSpace,
    p: str,
    base: Optional[str] = None,
) -> ShiRadiusReport:
    """
    Largest r in (0, cap] with r * sup{ |grad f|(y) : d(y, p) < 2r } <= 1.

    Between consecutive candidate radii d/2 the double ball is fixed, so the
    supremum is taken interval by interval and is attained.
    The report also carries the best radius restricted to the candidate set
    itself.
    """
    sample.require("gradf", "kind")
    row = space.dist_row(p)
    cap = _radius_cap(sample, space)

    levels: List[Number] = sorted(set(row))
    best_r, best_sup = None, None
    running = None
    for j, level in enumerate(levels):
        lower = level / 2
        if lower >= cap:
            break
        members = [q for q, d in zip(space.points, row) if d == level]
        level_sup = max(sample.gradf[q] for q in members)
        running = level_sup if running is None or level_sup > running else running
        upper = levels[j + 1] / 2 if j + 1 < len(levels) else cap
        upper = min(upper, cap)
        r = upper if running == 0 else min(upper, 1 / running)
        if r > lower and (best_r is None or r > best_r):
            best_r, best_sup = r, running

    if best_r is None:
        raise InvalidParameterError(f"No admissible radius at '{p}'", element=p)

    scale = None
    if base is not None:
        scale = 1 / (space.dist(base, p) + 1)
    logger.debug(f"Admissible radius at {p}: {best_r} (cap {cap})")
    return ShiRadiusReport(
        point=p,
        kind=sample.kind.value,
        radius=best_r,
        cap=cap,
        sup_gradf=best_sup,
        candidate_radius=_candidate_radius(sample, space.points, row, cap),
        shrinking_scale=scale if sample.kind is SolitonKind.SHRINKING else None,
    )
