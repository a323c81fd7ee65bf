"""Numerical toolkit for finite-blocklength converse bounds of degradable quantum channels."""

__version__ = "0.1.0"
