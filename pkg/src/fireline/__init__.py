"""fireline: one-dimensional forest fire processes at and near their scaling limit."""

from .kernel import COMPILED

__version__ = "0.1.0"
__all__ = ["COMPILED", "__version__"]
