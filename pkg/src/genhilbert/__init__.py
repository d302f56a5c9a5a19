"""Numerical toolkit for generalized Hilbert-type operators on the unit disk."""

__version__ = "0.1.0"
