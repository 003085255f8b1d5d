"""Polycyclic 3-groups, transfer kernels, Artin patterns and quadratic class groups."""

__version__ = "0.1.0"
