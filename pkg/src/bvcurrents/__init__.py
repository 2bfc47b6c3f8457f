"""Exact cubical space-time currents of bounded variation."""

__version__ = "0.1.0"
