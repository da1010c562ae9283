"""Exact verification toolkit for fan partitions of spherical measures."""

__version__ = "0.1.0"
