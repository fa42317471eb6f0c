from grs.etl.validators.validator import SpaceDocumentValidator, ValidationResult, ValidationSeverity

__all__ = ["SpaceDocumentValidator", "ValidationResult", "ValidationSeverity"]
