"""Interferometer phases in weakly anharmonic harmonic traps."""

__version__ = "0.1.0"
