"""Gluing, completeness and Dehn filling equations of ideal triangulations."""

__version__ = "0.1.0"
