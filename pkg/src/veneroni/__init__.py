"""Exact construction and verification of Veneroni transformations.

A Veneroni transformation of projective n-space is the birational map cut
out by the maximal minors of a matrix built from n+1 pairwise disjoint
codimension-2 flats in general position.  This package constructs the map
and its inverse with exact arithmetic, and verifies the classical facts
about it (component degrees, base-locus behaviour, composition with the
inverse, intersection-theoretic bookkeeping) symbolically or at exact
sample points.
"""

from .scalar import FieldCtx, Fp, Rational, is_prime, seeded_rng

__version__ = "0.1.0"

__all__ = [
    "FieldCtx",
    "Fp",
    "Rational",
    "is_prime",
    "seeded_rng",
    "__version__",
]
