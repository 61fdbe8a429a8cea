"""Projection-dynamics laboratory.

Relaxed and alternating projection iterations over subspaces, polyhedral
cones, one-dimensional epigraphs and homogenized cones, with diagnostics for
the summability of ``sum ||x_{n+1} - x_n||**gamma``.
"""

__version__ = "0.1.0"
