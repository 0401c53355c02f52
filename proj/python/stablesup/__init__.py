"""Supremum of a stable process: samplers, density estimator, bounds and checks."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
