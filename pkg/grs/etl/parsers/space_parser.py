"""
Space document parser.
Builds metric spaces, fields and soliton samples from space documents.
"""

import logging
from pathlib import Path
from typing import Any, Dict, NamedTuple, Optional, Union

from pydantic import ValidationError

from grs.etl.parsers.base import BaseParser, ParseResult
from grs.etl.validators.validator import SpaceDocumentValidator
from grs.exceptions import SpaceDocumentError
from grs.models.metric import Edge, MetricSpace, PointedSpace, ScalarField, SolitonSample
from grs.numeric import format_number
from grs.schemas.documents import SpaceDocument
from grs.services.metric_service import build_space

logger = logging.getLogger(__name__)


class LoadedSpace(NamedTuple):
    space: MetricSpace
    field: ScalarField
    sample: Optional[SolitonSample]
    base: Optional[str]

    @property
    def pointed(self) -> PointedSpace:
        if self.base is None:
            raise SpaceDocumentError("Document has no base point", code="missing-base", element="base")
        return PointedSpace(self.space, self.base)


def _document_error(e: ValidationError) -> SpaceDocumentError:
    first = e.errors()[0]
    location = ".".join(str(p) for p in first.get("loc", ()))
    return SpaceDocumentError(f"Malformed space document at '{location}': {first['msg']}", element=location)


def load_space(document: Union[SpaceDocument, Dict[str, Any]], exact: bool = True) -> LoadedSpace:
    """Validate a space document and build its metric, field and sample."""
    if not isinstance(document, SpaceDocument):
        try:
            document = SpaceDocument.model_validate(document)
        except ValidationError as e:
            raise _document_error(e)

    result = SpaceDocumentValidator().validate(document)
    if not result.is_valid:
        first = result.errors[0]
        raise SpaceDocumentError(first["message"], element=first["element"], code=first["code"], errors=result.errors)
    for warning in result.warnings:
        logger.warning(warning["message"])

    edges = [Edge(e.a, e.b, e.length) for e in document.edges]
    space = build_space([n.id for n in document.nodes], edges, exact=exact)
    field = ScalarField({n.id: n.rm for n in document.nodes})

    columns = {}
    for name in SpaceDocumentValidator.RULES["optional_fields"]:
        if getattr(document.nodes[0], name) is not None:
            columns[name] = {n.id: getattr(n, name) for n in document.nodes}
    sample = None
    if columns or document.kind is not None:
        sample = SolitonSample(kind=document.kind, **columns)

    logger.info(f"Loaded space: {len(space)} points, {len(edges)} edges, exact={space.exact}")
    return LoadedSpace(space, field, sample, document.base)


def serialize_space(
    space: MetricSpace,
    field: ScalarField,
    sample: Optional[SolitonSample] = None,
    base: Optional[str] = None,
) -> Dict[str, Any]:
    """Space document for a loaded space (nodes sorted by id, edges in input order)."""
    columns = sample.as_columns() if sample else {}
    nodes = []
    for point in space.points:
        node = {"id": point, "rm": format_number(field[point])}
        for name, values in columns.items():
            if values is not None:
                node[name] = format_number(values[point])
        nodes.append(node)
    document: Dict[str, Any] = {
        "nodes": nodes,
        "edges": [{"a": e.a, "b": e.b, "len": format_number(e.length)} for e in space.edges],
    }
    if base is not None:
        document["base"] = base
    if sample is not None and sample.kind is not None:
        document["kind"] = sample.kind.value
    return document


class SpaceParser(BaseParser):
    """Parser for space documents (JSON)."""

    error_class = SpaceDocumentError

    def __init__(self, exact: bool = True):
        self.exact = exact

    def can_parse(self, filename: str, content: bytes) -> bool:
        return self.looks_like_json(filename, content)

    def parse(self, content: bytes, filename: str) -> ParseResult:
        raw = self.decode_json(content, filename)
        loaded = load_space(raw, exact=self.exact)
        metadata = {
            "filename": filename,
            "points": len(loaded.space),
            "edges": len(loaded.space.edges),
            "exact": loaded.space.exact,
            "has_sample": loaded.sample is not None,
        }
        return ParseResult(records=loaded, metadata=metadata)


def load_space_file(path: Union[str, Path], exact: bool = True) -> LoadedSpace:
    return SpaceParser(exact=exact).parse_file(path).records
