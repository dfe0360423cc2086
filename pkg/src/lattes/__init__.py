"""Numerical laboratory for Lattès endomorphisms of the projective plane.

Theta and Weierstrass functions on the Gaussian lattice, line-bundle types on
complex tori, reflection groups and their invariants, the explicit Lattès maps
of P^2 with their torus semi-conjugacies, and escape-rate Green functions of
their polynomial lifts.
"""

__version__ = "0.1.0"
