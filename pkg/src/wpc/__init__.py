"""Harmonic Beltrami differentials built by Bergman projection on closed hyperbolic surfaces."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
