"""Discrete holomorphic functions on rhombic quad-graphs: linear and integrable theories."""

__version__ = "0.1.0"
