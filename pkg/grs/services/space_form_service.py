"""
Space Form Service - catalog of spherical space form groups.

Abelianized presentations, direct-double classification and boundary
homology of S^3/G for the cyclic, binary dihedral and binary polyhedral
families.
"""

import logging
import re
from typing import Iterable, List, Optional, Sequence, Tuple

from grs.exceptions import GroupSpecError, InvariantViolation
from grs.models.algebra import FgAbelianGroup, IntMatrix
from grs.models.space_form import (
    B2_LOWER_BOUND,
    SpaceFormFamily,
    SpaceFormGroup,
    family_order,
)
from grs.schemas.reports import DoubleClassification, SpaceFormReport
from grs.services.abelian_service import group_from_relations, is_direct_double

logger = logging.getLogger(__name__)

# Relations in the abelianized generators (s, t):
#   2T: (st)^2 = s^3 = t^3   2O: (st)^2 = s^3 = t^4   2I: (st)^2 = s^3 = t^5
_POLYHEDRAL_RELATIONS = {
    SpaceFormFamily.BINARY_TETRAHEDRAL: ((-1, 2), (3, -3)),
    SpaceFormFamily.BINARY_OCTAHEDRAL: ((-1, 2), (3, -4)),
    SpaceFormFamily.BINARY_ICOSAHEDRAL: ((-1, 2), (3, -5)),
}

POLYHEDRAL = (
    SpaceFormFamily.BINARY_TETRAHEDRAL,
    SpaceFormFamily.BINARY_OCTAHEDRAL,
    SpaceFormFamily.BINARY_ICOSAHEDRAL,
)

_FAMILY_ALIASES = {
    "z": SpaceFormFamily.CYCLIC,
    "cyclic": SpaceFormFamily.CYCLIC,
    "dstar": SpaceFormFamily.BINARY_DIHEDRAL,
    "binary-dihedral": SpaceFormFamily.BINARY_DIHEDRAL,
    "2t": SpaceFormFamily.BINARY_TETRAHEDRAL,
    "binary-tetrahedral": SpaceFormFamily.BINARY_TETRAHEDRAL,
    "2o": SpaceFormFamily.BINARY_OCTAHEDRAL,
    "binary-octahedral": SpaceFormFamily.BINARY_OCTAHEDRAL,
    "2i": SpaceFormFamily.BINARY_ICOSAHEDRAL,
    "binary-icosahedral": SpaceFormFamily.BINARY_ICOSAHEDRAL,
}

_SPEC_PATTERN = re.compile(r"^\s*(Z|Dstar)\s*:\s*(\d+)\s*$|^\s*(2T|2O|2I)\s*$")


def _relations(family: SpaceFormFamily, n: Optional[int]) -> IntMatrix:
    if family is SpaceFormFamily.CYCLIC:
        return IntMatrix.from_rows([[n]])
    if family is SpaceFormFamily.BINARY_DIHEDRAL:
        # a^{2n} = 1, b^2 = a^n, b a b^-1 = a^-1
        return IntMatrix.from_rows([[2 * n, 0], [-n, 2], [2, 0]])
    return IntMatrix.from_rows(_POLYHEDRAL_RELATIONS[family])


def make_group(family: SpaceFormFamily, n: Optional[int] = None) -> SpaceFormGroup:
    """Catalog entry for one family member."""
    if family.has_param and n is None:
        raise GroupSpecError(f"{family.value} needs a parameter n", element=family.value)
    param = n if family.has_param else None
    annotated = (
        (family is SpaceFormFamily.BINARY_DIHEDRAL and n is not None and n % 2 == 0)
        or family is SpaceFormFamily.BINARY_ICOSAHEDRAL
    )
    return SpaceFormGroup(
        family=family,
        param=param,
        order=family_order(family, param),
        relations=_relations(family, param),
        b2_lower_bound=B2_LOWER_BOUND if annotated else None,
        rochlin=family is SpaceFormFamily.BINARY_ICOSAHEDRAL,
    )


def parse_family(name: str) -> SpaceFormFamily:
    try:
        return _FAMILY_ALIASES[name.strip().lower()]
    except KeyError:
        raise GroupSpecError(f"Unknown space form family '{name}'", element=name)


def parse_space_form(spec: str) -> SpaceFormGroup:
    """'Z:5', 'Dstar:4', '2T', '2O' or '2I'."""
    match = _SPEC_PATTERN.match(spec)
    if not match:
        raise GroupSpecError(f"Not a space form spec: '{spec}'", element=spec)
    if match.group(3):
        return make_group(parse_family(match.group(3)))
    n = int(match.group(2))
    if n < 1:
        raise GroupSpecError(f"Space form parameter must be >= 1 in '{spec}'", element=spec)
    return make_group(parse_family(match.group(1)), n)


def is_space_form_spec(spec: str) -> bool:
    return bool(_SPEC_PATTERN.match(spec))


def catalog_key(group: SpaceFormGroup) -> Tuple[int, int]:
    """Position in catalog order: family, then parameter."""
    return list(SpaceFormFamily).index(group.family), group.param or 0


def catalog(families: Optional[Iterable[SpaceFormFamily]] = None, max_param: int = 12) -> List[SpaceFormGroup]:
    """Z_n and D*_n for n <= max_param, then 2T, 2O, 2I; filtered by family."""
    if max_param < 1:
        raise GroupSpecError(f"max-param must be >= 1, got {max_param}", element=max_param)
    wanted = set(families) if families is not None else set(SpaceFormFamily)
    entries: List[SpaceFormGroup] = []
    for family in (SpaceFormFamily.CYCLIC, SpaceFormFamily.BINARY_DIHEDRAL):
        if family in wanted:
            entries.extend(make_group(family, n) for n in range(1, max_param + 1))
    entries.extend(make_group(f) for f in POLYHEDRAL if f in wanted)
    return entries


def abelianization(group: SpaceFormGroup) -> FgAbelianGroup:
    """H1(S^3/G) = G^ab from the stored abelianized presentation."""
    return group_from_relations(group.relations)


def boundary_homology(group: SpaceFormGroup) -> Tuple[FgAbelianGroup, ...]:
    """(H0, H1, H2, H3) of S^3/G; H2 = Hom(H1, Z) by duality."""
    h1 = abelianization(group)
    if not h1.is_finite or group.order % h1.order():
        raise InvariantViolation(f"Abelianization {h1} of {group.label} is not a quotient of order dividing {group.order}")
    dual_h2 = FgAbelianGroup(h1.rank)
    if not dual_h2.is_trivial:
        raise InvariantViolation(f"H2 of {group.label} is nonzero")
    z = FgAbelianGroup(1)
    return z, h1, dual_h2, z


def describe(group: SpaceFormGroup) -> SpaceFormReport:
    h1 = abelianization(group)
    doubled, halving = is_direct_double(h1)
    return SpaceFormReport(
        label=group.label,
        family=group.family.value,
        param=group.param,
        order=group.order,
        abelianization=h1,
        direct_double=doubled,
        halving=halving,
        boundary_homology=list(boundary_homology(group)),
        annotations=group.annotations(),
    )


def classify_direct_double(groups: Sequence[SpaceFormGroup]) -> DoubleClassification:
    """Split catalog entries by is_direct_double of their abelianization, listed in catalog order."""
    positive: List[str] = []
    negative: List[str] = []
    entries = []
    for group in sorted(groups, key=catalog_key):
        report = describe(group)
        entries.append(report)
        (positive if report.direct_double else negative).append(group.label)
    logger.info(f"Direct-double classification: {len(positive)} positive, {len(negative)} negative")
    return DoubleClassification(positive=positive, negative=negative, entries=entries)
