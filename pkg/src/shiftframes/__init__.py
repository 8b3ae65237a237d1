"""Numerical certification of frame and Riesz properties of shift-invariant systems."""

__version__ = "0.1.0"
