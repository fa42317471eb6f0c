"""
Spherical space form models.
Fundamental groups of S^3/G for the five families realized in the unit quaternions.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional

from grs.exceptions import InvalidParameterError
from grs.models.algebra import IntMatrix


class SpaceFormFamily(str, Enum):
    CYCLIC = "cyclic"
    BINARY_DIHEDRAL = "binary-dihedral"
    BINARY_TETRAHEDRAL = "binary-tetrahedral"
    BINARY_OCTAHEDRAL = "binary-octahedral"
    BINARY_ICOSAHEDRAL = "binary-icosahedral"

    @property
    def has_param(self) -> bool:
        return self in (SpaceFormFamily.CYCLIC, SpaceFormFamily.BINARY_DIHEDRAL)


@dataclass(frozen=True)
class FactTag:
    """An imported fact: cited, never derived here."""
    key: str
    statement: str

    def to_document(self) -> Dict[str, str]:
        return {"key": self.key, "statement": self.statement}


B2_LOWER_BOUND = FactTag(
    key="b2-lower-bound",
    statement="a Ricci-flat ALE 4-manifold with this end group has b2 >= 1",
)
ROCHLIN = FactTag(
    key="rochlin",
    statement="the Poincare homology sphere bounds no smooth homology ball",
)

_FIXED_ORDERS = {
    SpaceFormFamily.BINARY_TETRAHEDRAL: 24,
    SpaceFormFamily.BINARY_OCTAHEDRAL: 48,
    SpaceFormFamily.BINARY_ICOSAHEDRAL: 120,
}

_SHORT_LABELS = {
    SpaceFormFamily.BINARY_TETRAHEDRAL: "2T",
    SpaceFormFamily.BINARY_OCTAHEDRAL: "2O",
    SpaceFormFamily.BINARY_ICOSAHEDRAL: "2I",
}


def family_order(family: SpaceFormFamily, param: Optional[int]) -> int:
    if family is SpaceFormFamily.CYCLIC:
        return param
    if family is SpaceFormFamily.BINARY_DIHEDRAL:
        return 4 * param
    return _FIXED_ORDERS[family]


@dataclass(frozen=True)
class SpaceFormGroup:
    """
    Catalog entry: family, parameter, group order and the relation matrix
    of the abelianized presentation (rows are relations on the generators).
    """
    family: SpaceFormFamily
    param: Optional[int]
    order: int
    relations: IntMatrix
    b2_lower_bound: Optional[FactTag] = None
    rochlin: bool = False

    def __post_init__(self):
        if self.family.has_param:
            if self.param is None or self.param < 1:
                raise InvalidParameterError(f"{self.family.value} needs a parameter n >= 1", element=self.param)
        elif self.param is not None:
            raise InvalidParameterError(f"{self.family.value} takes no parameter", element=self.param)
        if self.order != family_order(self.family, self.param):
            raise InvalidParameterError(
                f"Order {self.order} does not match the {self.family.value} formula", element=self.order
            )
        if self.rochlin and self.family is not SpaceFormFamily.BINARY_ICOSAHEDRAL:
            raise InvalidParameterError("Only the binary icosahedral group carries the rochlin annotation")

    @property
    def label(self) -> str:
        if self.family is SpaceFormFamily.CYCLIC:
            return f"Z:{self.param}"
        if self.family is SpaceFormFamily.BINARY_DIHEDRAL:
            return f"Dstar:{self.param}"
        return _SHORT_LABELS[self.family]

    @property
    def flat_end(self) -> bool:
        """Trivial group: the end is flat R^4 at infinity."""
        return self.order == 1

    def annotations(self) -> Dict:
        return {
            "b2-lower-bound": self.b2_lower_bound.to_document() if self.b2_lower_bound else None,
            "rochlin": self.rochlin,
            "flat-end": self.flat_end,
        }

    def __str__(self) -> str:
        return self.label
