"""Execution-guided decomposition for programming by example."""

__version__ = "0.1.0"
