"""Numerical tolerance settings shared across the library."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Tolerance knobs for validation and linear algebra.

    ``solve_tol`` is a per-state base; residual checks on an n-state
    system use ``solve_tol_for(n) = solve_tol * n``.
    """

    row_tol: float = 1e-9          # row-sum / sign slack for model validation
    edge_tol: float = 0.0          # support-graph threshold: edge iff entry > edge_tol
    solve_tol: float = 1e-10       # linear-solve residual, scaled by state count
    poisson_tol: float = 1e-8      # Poisson-equation residual on returned solutions
    re_tol: float = 1e-12          # minimum |r.e| for a usable reference vector
    re_eq1_tol: float = 1e-9       # |r.e - 1| slack for reference-level formulas
    series_margin: float = 1e-6    # distance from the (0, 2) divergence boundary
    pivot_tol: float = 1e-12       # relative pivot floor for near-singularity

    def solve_tol_for(self, n: int) -> float:
        return self.solve_tol * max(n, 1)


DEFAULT = Tolerances()
