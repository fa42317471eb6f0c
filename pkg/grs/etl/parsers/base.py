"""
Base Parser Interface.
Defines the contract for all document parsers.
"""

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

from grs.exceptions import GrsError


@dataclass
class ParseResult:
    """Result of a parsing operation."""
    records: Any
    metadata: Dict[str, Any] = field(default_factory=dict)
    validation_errors: List[Dict[str, Any]] = field(default_factory=list)


class BaseParser(ABC):
    """Abstract base class for parsers."""

    error_class = GrsError

    @abstractmethod
    def can_parse(self, filename: str, content: bytes) -> bool:
        """Determine if this parser can handle the document."""

    @abstractmethod
    def parse(self, content: bytes, filename: str) -> ParseResult:
        """Parse the document content into domain objects."""

    def decode_json(self, content: Union[bytes, str], filename: str) -> Any:
        """Helper to decode JSON content with a located error."""
        try:
            text = content.decode("utf-8") if isinstance(content, bytes) else content
            return json.loads(text)
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise self.error_class(f"{filename}: not valid JSON ({e})", element=filename)

    def parse_file(self, path: Union[str, Path]) -> ParseResult:
        path = Path(path)
        try:
            content = path.read_bytes()
        except OSError as e:
            raise self.error_class(f"Cannot read {path}: {e.strerror}", element=str(path))
        if not self.can_parse(path.name, content):
            raise self.error_class(f"{path.name}: unsupported document format", element=str(path))
        return self.parse(content, path.name)

    @staticmethod
    def looks_like_json(filename: str, content: bytes) -> bool:
        return filename.lower().endswith(".json") or content.lstrip()[:1] in (b"{", b"[")
