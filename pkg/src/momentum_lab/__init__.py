"""Numerical checks of symplectic convexity statements at desk scale."""

__version__ = "0.1.0"
