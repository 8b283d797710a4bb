"""
csrec - Chern-Simons reciprocity checks for closed 3-manifolds.

Three independent routes to CS invariants are provided:

1. saddle   - critical values of the figure-eight surgery potential
2. seifert  - exact Q/Z values for Seifert manifolds with three singular fibers
3. homology - the group-homology pairing with the extended Bloch cocycle

verify combines them into pass/fail reports for the statement that
24 times the sum of CS over the irreducible character variety vanishes in C/Z.
"""

__version__ = "0.3.0"
