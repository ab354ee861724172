"""Unitarisability certificates and monodromy diagnostics for trinoid potentials
built on the confluent Heun equation."""
from .params import TrinoidParams

__version__ = "0.1.0"

__all__ = ["TrinoidParams", "__version__"]
