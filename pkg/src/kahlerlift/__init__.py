"""Tangent-bundle pseudo-/para-Kähler structures, verified with exact Taylor jets."""

__version__ = "0.1.0"
