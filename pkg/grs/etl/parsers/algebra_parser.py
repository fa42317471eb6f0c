"""
Algebra document parser.
Group specs, matrix documents and sequence documents.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

from pydantic import ValidationError

from grs.etl.parsers.base import BaseParser, ParseResult
from grs.exceptions import GroupSpecError, InvalidParameterError, PresentationError
from grs.models.algebra import FgAbelianGroup, IntMatrix, SequenceSpec
from grs.schemas.documents import GroupDocument, MatrixDocument, SequenceDocument
from grs.services.abelian_service import group_from_presentation
from grs.services.space_form_service import abelianization, is_space_form_spec, parse_space_form

logger = logging.getLogger(__name__)


def _invalid(kind: str, e: ValidationError) -> GroupSpecError:
    first = e.errors()[0]
    location = ".".join(str(p) for p in first.get("loc", ())) or kind
    return GroupSpecError(f"Malformed {kind} document at '{location}': {first['msg']}", element=location)


def group_from_document(document: Union[GroupDocument, Dict[str, Any]]) -> FgAbelianGroup:
    if not isinstance(document, GroupDocument):
        try:
            document = GroupDocument.model_validate(document)
        except ValidationError as e:
            raise _invalid("group", e)
    if document.generators is not None:
        return group_from_presentation(document.generators, document.relations or [])
    orders = [0] * (document.rank or 0) + list(document.factors or [])
    try:
        return FgAbelianGroup.from_cyclic_orders(orders)
    except InvalidParameterError as e:
        raise GroupSpecError(e.message, element=e.element)


def _from_value(value: Any, spec: str) -> FgAbelianGroup:
    if isinstance(value, list):
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise GroupSpecError(f"Cyclic orders must be integers: {spec}", element=spec)
        try:
            return FgAbelianGroup.from_cyclic_orders(value)
        except InvalidParameterError as e:
            raise GroupSpecError(e.message, element=e.element)
    if isinstance(value, dict):
        return group_from_document(value)
    raise GroupSpecError(f"Not a group spec: {spec}", element=spec)


def parse_group_spec(spec: str) -> FgAbelianGroup:
    """
    A group from a CLI spec: a JSON list of cyclic orders ("[4,2]", 0 for Z),
    a group document (inline JSON or a file path) or a space form
    ("Z:5", "Dstar:4", "2T", "2O", "2I", meaning its abelianization).
    """
    if is_space_form_spec(spec):
        return abelianization(parse_space_form(spec))
    text = spec
    path = Path(spec)
    if not spec.lstrip().startswith(("[", "{")) and path.is_file():
        text = path.read_text(encoding="utf-8")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise GroupSpecError(f"Unrecognized group spec '{spec}'", element=spec)
    return _from_value(value, spec)


def matrix_from_document(document: Union[MatrixDocument, Dict[str, Any]]) -> IntMatrix:
    if not isinstance(document, MatrixDocument):
        try:
            document = MatrixDocument.model_validate(document)
        except ValidationError as e:
            raise _invalid("matrix", e)
    return IntMatrix.from_rows(document.entries, cols=document.cols)


def _sequence_term(index: int, term: Union[GroupDocument, List[int]]) -> FgAbelianGroup:
    """Sequence terms keep their generators, so they must already be canonical."""
    if isinstance(term, GroupDocument):
        if term.generators is not None:
            raise PresentationError(
                f"Sequence term {index} must be given as rank/factors, not a presentation", element=index
            )
        rank, factors = term.rank or 0, list(term.factors or [])
    else:
        free = 0
        while free < len(term) and term[free] == 0:
            free += 1
        rank, factors = free, list(term[free:])
    try:
        return FgAbelianGroup(rank, tuple(factors))
    except InvalidParameterError as e:
        raise PresentationError(f"Sequence term {index} is not in canonical form: {e.message}", element=index)


def sequence_from_document(document: Union[SequenceDocument, Dict[str, Any]]) -> SequenceSpec:
    if not isinstance(document, SequenceDocument):
        try:
            document = SequenceDocument.model_validate(document)
        except ValidationError as e:
            raise _invalid("sequence", e)
    groups = [_sequence_term(i, g) for i, g in enumerate(document.groups)]
    return SequenceSpec.from_matrices(groups, [m.entries for m in document.maps])


class AlgebraParser(BaseParser):
    """Parser for matrix, group and sequence documents."""

    error_class = GroupSpecError

    def can_parse(self, filename: str, content: bytes) -> bool:
        return self.looks_like_json(filename, content)

    def parse(self, content: bytes, filename: str) -> ParseResult:
        data = self.decode_json(content, filename)
        if isinstance(data, dict) and "groups" in data:
            records, kind = sequence_from_document(data), "sequence"
        elif isinstance(data, dict) and "entries" in data:
            records, kind = matrix_from_document(data), "matrix"
        else:
            records, kind = _from_value(data, filename), "group"
        logger.info(f"Parsed {kind} document {filename}")
        return ParseResult(records=records, metadata={"kind": kind, "filename": filename})


def load_algebra_file(path: Union[str, Path], expected: str) -> Any:
    result = AlgebraParser().parse_file(path)
    if result.metadata["kind"] != expected:
        raise GroupSpecError(f"{path} holds a {result.metadata['kind']} document, expected a {expected}", element=str(path))
    return result.records
