"""Slope stability of tangent bundles on Fano 3-folds, by exact intersection theory."""

__version__ = "0.1.0"
