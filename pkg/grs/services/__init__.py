"""
Services Layer
Business logic for metric spaces, point selection, growth audits,
abelian group arithmetic, space forms and the obstruction pipeline.
"""

from grs.services.obstruction_service import ObstructionService

__all__ = ["ObstructionService"]
