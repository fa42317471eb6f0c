"""Immutable domain models."""

from grs.models.algebra import ElementaryDivisors, FgAbelianGroup, IntMatrix, PresentedMap, SequenceSpec
from grs.models.metric import Edge, MetricSpace, PointedSpace, ScalarField, SolitonKind, SolitonSample
from grs.models.space_form import FactTag, SpaceFormFamily, SpaceFormGroup

__all__ = [
    "Edge",
    "ElementaryDivisors",
    "FactTag",
    "FgAbelianGroup",
    "IntMatrix",
    "MetricSpace",
    "PointedSpace",
    "PresentedMap",
    "ScalarField",
    "SequenceSpec",
    "SolitonKind",
    "SolitonSample",
    "SpaceFormFamily",
    "SpaceFormGroup",
]
