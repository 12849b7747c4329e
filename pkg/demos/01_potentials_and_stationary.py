"""Potentials and the stationary distribution from one shifted solve.

The classical fundamental matrix (I - P + e pi)^-1 needs pi before it can
be formed. Shifting by any row vector r with r.e != 0 removes that step:
g = (I - P + e r)^-1 f and pi = r (I - P + e r)^-1 come straight from the
model data. Different r's move g by a constant vector and leave pi alone.
"""

import numpy as np

from gfmarkov import (
    potentials,
    potentials_classic,
    reference_vector,
    renormalize_potentials,
    stationary,
    validate_stochastic,
)

P = validate_stochastic([
    [0.6, 0.3, 0.1],
    [0.2, 0.5, 0.3],
    [0.1, 0.2, 0.7],
])
f = np.array([2.0, 0.0, -1.0])

print("chain:")
print(P.matrix)

# any reference with r.e != 0 works; none of these require pi
for r_values in ([1.0, 0.0, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.9, -0.2, 0.5]):
    r = reference_vector(r_values)
    pi = stationary(P, r)
    sol = potentials(P, f, r)
    print(f"\nr = {r_values}  (r.e = {r.dot_with_ones:.3g})")
    print("  pi        =", np.round(pi.pi, 10))
    print("  g         =", np.round(sol.g, 10))
    print("  eta = r.g =", round(sol.eta, 12))

# the classical route is the special case r = pi
classic = potentials_classic(P, f)
print("\nclassical (r = pi):   g =", np.round(classic.g, 10))

# every solution is a constant shift of every other
r1 = reference_vector([1.0, 0.0, 0.0])
generic = potentials(P, f, r1)
shifted = renormalize_potentials(generic, classic.reference)
print("renormalized generic: g =", np.round(shifted.g, 10))
print("max difference:", np.abs(shifted.g - classic.g).max())
