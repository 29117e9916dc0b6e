"""Exact computation of virtual Segre and Verlinde numbers of projective surfaces
via torus localization on Hilbert schemes of points, with verification harnesses
for the associated universal-series conjectures."""

__version__ = "0.1.0"
