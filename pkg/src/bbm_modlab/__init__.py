"""Numerical laboratory for the generalized BBM equation in modulation spaces."""

__version__ = "0.1.0"
