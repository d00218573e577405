"""Numerical workbench for the QED-cavity model of microtubules."""

from . import cavity, gates, lattice, qteleport, soliton, transfer

__all__ = ["cavity", "gates", "lattice", "qteleport", "soliton", "transfer"]
__version__ = "0.1.0"
