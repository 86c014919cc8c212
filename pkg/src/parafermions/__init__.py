"""Discretely holomorphic parafermions in lattice loop models."""

__version__ = "0.1.0"
