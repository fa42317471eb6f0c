"""Pydantic schemas for input documents (spaces, groups, matrices, sequences)."""

from typing import Annotated, Any, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, model_validator

from grs.models.metric import SolitonKind
from grs.numeric import format_number, parse_number

# Exact document number: int, decimal, or "p/q" string -> Fraction
DocNumber = Annotated[Any, PlainValidator(parse_number), PlainSerializer(format_number)]


class NodeDocument(BaseModel):
    """One point with its curvature proxy and optional soliton data."""
    model_config = ConfigDict(extra="forbid")

    id: str
    rm: DocNumber
    f: Optional[DocNumber] = None
    r_scal: Optional[DocNumber] = None
    gradf: Optional[DocNumber] = None
    vol: Optional[DocNumber] = None


class EdgeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    a: str
    b: str
    length: DocNumber = Field(alias="len")


class SpaceDocument(BaseModel):
    """Space document as read from JSON."""
    model_config = ConfigDict(extra="forbid")

    nodes: List[NodeDocument]
    edges: List[EdgeDocument] = Field(default_factory=list)
    base: Optional[str] = None
    kind: Optional[SolitonKind] = None


class MatrixDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    entries: List[List[int]]

    @model_validator(mode="after")
    def check_shape(self) -> "MatrixDocument":
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not form a {self.rows}x{self.cols} matrix")
        return self


class GroupDocument(BaseModel):
    """Either invariant data {rank, factors} or a presentation {generators, relations}."""
    model_config = ConfigDict(extra="forbid")

    rank: Optional[int] = Field(default=None, ge=0)
    factors: Optional[List[int]] = None
    generators: Optional[int] = Field(default=None, ge=0)
    relations: Optional[List[List[int]]] = None

    @model_validator(mode="after")
    def check_form(self) -> "GroupDocument":
        invariant = self.rank is not None or self.factors is not None
        presented = self.generators is not None or self.relations is not None
        if invariant == presented:
            raise ValueError("give either rank/factors or generators/relations")
        if presented:
            if self.generators is None:
                raise ValueError("presentation needs 'generators'")
            if any(len(r) != self.generators for r in self.relations or []):
                raise ValueError("every relation needs one coefficient per generator")
        return self


class MapDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    entries: List[List[int]]


class SequenceDocument(BaseModel):
    """groups[i] --maps[i]--> groups[i+1]."""
    model_config = ConfigDict(extra="forbid")

    groups: List[Union[GroupDocument, List[int]]]
    maps: List[MapDocument]

    @model_validator(mode="after")
    def check_lengths(self) -> "SequenceDocument":
        if len(self.maps) != len(self.groups) - 1:
            raise ValueError(f"{len(self.groups)} groups need {len(self.groups) - 1} maps, got {len(self.maps)}")
        return self
