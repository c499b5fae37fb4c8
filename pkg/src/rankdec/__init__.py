"""Folded rank-metric codes with interpolation-based list decoding."""

__version__ = "0.1.0"
