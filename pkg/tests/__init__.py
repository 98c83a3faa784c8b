"""Test package for the NPS sparsifier."""
