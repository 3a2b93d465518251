"""Verification toolkit for bounded-quotient continued fractions.

Continuant enumeration and denominator census, exact Kloosterman sums and
their bounds, incomplete counting sums, exhaustive SL2 lattice-point
counting, Good zeta-function dimension brackets and exponential sums over
explicit norm families.
"""

__version__ = "0.1.0"
