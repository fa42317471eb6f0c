"""
grs-toolkit - point selection and space form obstructions

Point selection with checkable certificates on finite metric spaces,
curvature growth fits and soliton audits, plus exact abelian group
arithmetic driving the disjoint-copies obstruction for spherical space forms.
"""

__version__ = "0.3.0"
__author__ = "grs-toolkit developers"
