"""Exact toolkit for two 4-dimensional discrete Painleve mappings."""

__version__ = "0.1.0"
