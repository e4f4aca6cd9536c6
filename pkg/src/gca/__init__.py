"""Exact combinatorial engine for graph complexes and cyclic homotopy algebras."""

__version__ = "0.1.0"
