"""Exact enumeration and statistics of Carmichael numbers."""

__version__ = "0.1.0"
