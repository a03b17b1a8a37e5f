"""Heegaard Floer homology of knot and link surgeries from model chain complexes."""

__version__ = "0.1.0"
