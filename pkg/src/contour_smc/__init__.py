"""Adaptive non-singular terminal sliding mode control with contour-error
cross-coupling for a planar two-link arm."""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
