"""Singular vortex dynamics: point vortices, filaments, membranes and sheets."""
__version__ = "0.1.0"
