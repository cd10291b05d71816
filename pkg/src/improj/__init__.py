"""Imaginary projections of complex polynomials."""

__version__ = "0.1.0"
