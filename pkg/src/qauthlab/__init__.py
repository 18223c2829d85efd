"""Simulation laboratory for quantum message authentication on small Hilbert spaces."""

__version__ = "0.1.0"
