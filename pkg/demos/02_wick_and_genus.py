#!/usr/bin/env python3
"""Exact finite-N moments and the genus expansion.

At finite matrix size the Gaussian expectation of a normalized trace word
is a Laurent polynomial in N whose coefficients count gluings by genus.
The Wick oracle computes it by splitting and merging traces; the census
enumerates gluings and traces faces through the rotation system.  The two
routes share no code and must agree exactly.
"""

from mmwb import LaurentN, Monomial, census, wick_finite_N

print(__doc__)

print("One star with 2k half-edges:")
for k in range(1, 6):
    w = Monomial((1,) * (2 * k))
    oracle = wick_finite_N(w)
    counts = census([w])
    rebuilt = LaurentN({-2 * g: c for g, c in counts.counts.items()})
    status = "agree" if oracle == rebuilt else "DISAGREE"
    print(f"  E[(1/N) Tr A^{2 * k:<2}] = {str(oracle):40s} census {counts}  [{status}]")

print("\nTwo colors (independent matrices): only color-respecting gluings count:")
for word in ((1, 2), (1, 2, 2, 1), (1, 2, 1, 2), (1, 1, 2, 2)):
    w = Monomial(word)
    print(f"  E[(1/N) Tr {str(w):12s}] = {wick_finite_N(w)}")

print("\nThe alternating word X1 X2 X1 X2 only glues on the torus:")
print(f"  census: {census([Monomial((1, 2, 1, 2))])}")
