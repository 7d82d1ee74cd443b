"""Elliptic curve family laboratory."""

__version__ = "0.1.0"
