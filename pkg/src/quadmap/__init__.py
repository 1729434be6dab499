"""Degree growth and periodic points of a quadric-preserving birational map of C^4."""

__version__ = "0.1.0"
