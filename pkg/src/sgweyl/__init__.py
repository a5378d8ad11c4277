"""Exact spectral counting on the Sierpinski gasket and its double cover."""

__version__ = "0.1.0"
