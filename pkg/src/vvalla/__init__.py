"""Valabrega-Valla modules, associated graded depth and local cohomology annihilators."""

__version__ = "0.1.0"
