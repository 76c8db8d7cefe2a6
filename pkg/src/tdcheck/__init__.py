"""Exact-arithmetic verification toolkit for tridiagonal-pair module tables,
parameter-array admissibility and zigzag-word rank experiments."""

__version__ = "0.1.0"
