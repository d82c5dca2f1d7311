"""Exact workbench for module radicals and Zhu-type algebras of vertex operator algebras."""

from .qlinalg import KERNEL

__version__ = "0.1.0"

__all__ = ["KERNEL", "__version__"]
