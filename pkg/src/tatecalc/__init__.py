"""Exact computations around Tate cohomology, spectral sequences and periodic cyclic homology."""

__version__ = "0.1.0"
