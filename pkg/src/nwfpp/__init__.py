"""First passage percolation on Newman-Watts small-world graphs."""
from .theory import ModelConstants, constants

__all__ = ["ModelConstants", "constants"]
__version__ = "0.1.0"
