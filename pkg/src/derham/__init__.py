"""Exact computation of rational de Rham cohomology.

The package computes Betti numbers and explicit generating cocycles of
algebraic differential forms for

* complements of hypersurfaces (and of codimension-2 complete
  intersections of two hypersurfaces) in affine space,
* open and closed subsets of projective space,
* open subsets of smooth complete 2-dimensional toric varieties,

using Weyl-algebra Groebner bases, Bernstein-Sato polynomials and
Cech-de Rham gluing.  All arithmetic is exact over the rationals.
"""

from derham.exactla import RatMatrix, Subquotient, rank_kernel, subquotient_basis

__all__ = [
    "RatMatrix",
    "Subquotient",
    "rank_kernel",
    "subquotient_basis",
]
