"""Spectral gap certification and breather computation for periodic wave equations."""

__version__ = "0.1.0"
