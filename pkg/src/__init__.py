"""Null-space preserving sparsification of dense real and complex matrices."""

__version__ = "1.0.0"
__author__ = "NPS Sparsifier Team"
