"""GELU activations, the stochastic 0-I map, and a small dense-network lab."""

from gelu_lab import _backend
from gelu_lab._backend import use as use_backend

__version__ = "0.1.0"


def backend():
    """Name of the active kernel backend: ``"compiled"`` or ``"python"``."""
    return _backend.NAME


__all__ = ["backend", "use_backend", "__version__"]
