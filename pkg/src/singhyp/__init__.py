"""Numerical toolkit for singular-hyperbolic skew products and their suspensions."""

__version__ = "0.1.0"
