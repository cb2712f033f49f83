"""Numerical laboratory for linearized MHD contact discontinuities (2D planar)."""

__version__ = "0.1.0"
