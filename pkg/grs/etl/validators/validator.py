"""
Validation Engine.
Checks space documents against structural rules before a metric is built.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import networkx as nx

from grs.schemas.documents import SpaceDocument


class ValidationSeverity(Enum):
    """Validation error severity levels."""
    WARNING = "warning"
    ERROR = "error"


@dataclass
class ValidationResult:
    """Result of a validation check."""
    is_valid: bool = True
    errors: List[Dict[str, Any]] = field(default_factory=list)
    warnings: List[Dict[str, Any]] = field(default_factory=list)

    def add_error(self, code: str, message: str, field: Optional[str] = None, element: Any = None):
        """Add an error to the result."""
        self.is_valid = False
        self.errors.append({
            "code": code,
            "message": message,
            "field": field,
            "element": element,
            "severity": ValidationSeverity.ERROR.value,
        })

    def add_warning(self, code: str, message: str, field: Optional[str] = None, element: Any = None):
        """Add a warning to the result."""
        self.warnings.append({
            "code": code,
            "message": message,
            "field": field,
            "element": element,
            "severity": ValidationSeverity.WARNING.value,
        })

    def merge(self, other: "ValidationResult"):
        """Merge another validation result into this one."""
        if not other.is_valid:
            self.is_valid = False
        self.errors.extend(other.errors)
        self.warnings.extend(other.warnings)


class SpaceDocumentValidator:
    """
    Validates space documents: identifiers, edge lengths, field signs,
    optional-field consistency and connectivity.
    """

    RULES = {
        "optional_fields": ["f", "r_scal", "gradf", "vol"],
        "nonnegative": ["rm", "gradf"],
        "positive": ["vol"],
    }

    def validate(self, document: SpaceDocument) -> ValidationResult:
        result = ValidationResult()
        result.merge(self.validate_nodes(document))
        result.merge(self.validate_edges(document))
        if result.is_valid:
            result.merge(self.validate_connectivity(document))
        return result

    def validate_nodes(self, document: SpaceDocument) -> ValidationResult:
        result = ValidationResult()
        if not document.nodes:
            result.add_error("malformed-document", "Document has no nodes", field="nodes")
            return result

        seen = set()
        for node in document.nodes:
            if node.id in seen:
                result.add_error("duplicate-point", f"Duplicate point id '{node.id}'", field="id", element=node.id)
            seen.add(node.id)

            for name in self.RULES["nonnegative"]:
                value = getattr(node, name)
                if value is not None and value < 0:
                    code = "negative-field-value"
                    result.add_error(code, f"Negative {name} = {value} at '{node.id}'", field=name, element=node.id)
            for name in self.RULES["positive"]:
                value = getattr(node, name)
                if value is not None and value <= 0:
                    result.add_error(
                        "nonpositive-volume", f"Volume {value} at '{node.id}' must be > 0", field=name, element=node.id
                    )

        for name in self.RULES["optional_fields"]:
            present = [n.id for n in document.nodes if getattr(n, name) is not None]
            if present and len(present) != len(document.nodes):
                missing = next(n.id for n in document.nodes if getattr(n, name) is None)
                result.add_error(
                    "inconsistent-optional-field",
                    f"Optional field '{name}' is set on some nodes but missing at '{missing}'",
                    field=name,
                    element=missing,
                )

        if document.base is not None and document.base not in seen:
            result.add_error("unknown-point", f"Base point '{document.base}' is not a node", field="base",
                             element=document.base)
        return result

    def validate_edges(self, document: SpaceDocument) -> ValidationResult:
        result = ValidationResult()
        ids = {n.id for n in document.nodes}
        for idx, edge in enumerate(document.edges):
            label = f"{edge.a}-{edge.b}"
            for end in (edge.a, edge.b):
                if end not in ids:
                    result.add_error("unknown-point", f"Edge {idx} ({label}) names unknown point '{end}'",
                                     field="edges", element=end)
            if edge.length <= 0:
                result.add_error("nonpositive-edge-length", f"nonpositive edge length {edge.length} on {label}",
                                 field="len", element=label)
            if edge.a == edge.b:
                result.add_warning("self-loop", f"Self-loop at '{edge.a}' is ignored", field="edges", element=label)
        return result

    def validate_connectivity(self, document: SpaceDocument) -> ValidationResult:
        result = ValidationResult()
        graph = nx.Graph()
        graph.add_nodes_from(n.id for n in document.nodes)
        graph.add_edges_from((e.a, e.b) for e in document.edges)
        if not nx.is_connected(graph):
            components = sorted(sorted(c) for c in nx.connected_components(graph))
            stray = components[1][0]
            result.add_error("disconnected-graph", f"Graph is disconnected: '{stray}' is unreachable from "
                             f"'{components[0][0]}'", field="edges", element=stray)
        return result
