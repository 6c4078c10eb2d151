"""Exact strong homology of finite direct systems of cochain complexes."""

__version__ = "0.1.0"
