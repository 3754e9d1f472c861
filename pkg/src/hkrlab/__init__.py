"""Exact computations with Witt vectors, Hochschild and cyclic homology, and graded Hopf algebras."""

__version__ = "0.1.0"
