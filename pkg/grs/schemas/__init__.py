"""Pydantic schemas for input documents and report documents."""

from grs.schemas.documents import GroupDocument, MatrixDocument, SequenceDocument, SpaceDocument
from grs.schemas.reports import Anchor, CommandReport, ObstructionVerdict, SelectionCertificate

__all__ = [
    "Anchor",
    "CommandReport",
    "GroupDocument",
    "MatrixDocument",
    "ObstructionVerdict",
    "SelectionCertificate",
    "SequenceDocument",
    "SpaceDocument",
]
