"""Exact symbolic checks for the target geometry of Lie algebroid Poisson
sigma models."""

from .kernel import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
