"""Series form of the shifted inverse and the eigenvalue picture behind it.

Shifting I - P by e r moves the chain's unit eigenvalue to r.e and leaves
the rest at 1 - lambda_i. The inverse therefore exists iff r.e != 0, and
the power series sum_n (P - e r)^n converges iff the spectral radius of
P - e r is below one, which happens exactly when 0 < r.e < 2.
"""

import numpy as np

from gfmarkov import (
    SeriesDivergentError,
    fundamental_matrix,
    reference_vector,
    series_fundamental,
    spectral_radius_estimate,
    validate_stochastic,
    verify_spectral_shift,
)

P = validate_stochastic([[0.9, 0.1], [0.2, 0.8]])
ones = np.ones(2)

# spectral facts, verified with closed-form 2x2 eigenvalues
r = reference_vector([0.5, 0.5])
report = verify_spectral_shift(P, r)
print("spectral shift checks:")
for c in report.checks:
    print(f"  {c.name:28s} passed={c.passed}  residual={c.residual:.2e}")

# truncation error tracks the reported tail bound
exact = fundamental_matrix(P, r).Z
print("\nseries convergence (r.e = 1):")
for terms in (2, 8, 32, 128):
    approx = series_fundamental(P, r, terms)
    gap = np.abs(approx.Z - exact).max()
    print(f"  T={terms:4d}  tail bound {approx.tail_norm:.2e}  "
          f"actual gap {gap:.2e}")

# the radius of P - e r crosses 1 exactly at the ends of (0, 2)
print("\nspectral radius of P - e r against r.e:")
for target in (0.2, 1.0, 1.8, 2.2):
    rv = np.array([0.5, 0.5]) * target
    est = spectral_radius_estimate(P.matrix - np.outer(ones, rv), iters=400)
    print(f"  r.e = {target:>4.1f}  rho = {est.value:.6f}")

try:
    series_fundamental(P, reference_vector([1.1, 1.1]), 10)
except SeriesDivergentError as e:
    print("\nseries refused outside (0, 2):", e)
