"""Symmetry-protected MPS, measurement-based gates and the A4 spin-1 phase scan."""

__version__ = "0.1.0"
