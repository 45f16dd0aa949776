"""Monolingual data integration techniques for neural MT at desk scale."""

__version__ = "0.1.0"
