"""Exact verification toolkit for Pfaffian ideals and Koszul homology.

The package builds the length-3 equivariant complexes attached to the
2n-Pfaffians of a generic skew-symmetric matrix, the Koszul complexes of
Pfaffian and Huneke-Ulrich ideal generators, and checks everything that can
be checked by exact linear algebra: the complex condition d*d = 0, rank
certificates for acyclicity, degree-slice homology dimensions against
closed-form predictions, duality pairings, integer torsion, and minimal
graded Betti numbers.  All arithmetic is exact (integers, rationals, prime
fields); there is no floating point anywhere.
"""

from pfk.rings import ZZ, QQ, GF, CoeffDomain
from pfk.sparsemat import SparseMatrix

__all__ = ["ZZ", "QQ", "GF", "CoeffDomain", "SparseMatrix"]

__version__ = "0.1.0"
