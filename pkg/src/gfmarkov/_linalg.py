"""Dense linear-algebra helpers.

All solves go through one pivoted LU factorization so that every caller
shares the same numerics (and the same near-singularity detection).
Eigenvalues of 2x2 and 3x3 matrices come from closed-form roots of the
characteristic polynomial; nothing here requires a general eigensolver.
"""

from __future__ import annotations

import cmath
import warnings

import numpy as np
import scipy.linalg

from .errors import NearSingularError

OMEGA = complex(-0.5, 0.5 * 3.0 ** 0.5)  # primitive cube root of unity


def shifted_matrix(P: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Return I - P + e r for a row-stochastic P and row vector r."""
    n = P.shape[0]
    return np.eye(n) - P + np.outer(np.ones(n), r)


def lu_factor_checked(M: np.ndarray, pivot_tol: float):
    """Pivoted LU factorization, rejecting numerically singular inputs.

    The smallest |U_ii| is compared with pivot_tol * max(1, largest |U_ii|);
    below that the matrix is treated as singular to working precision.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M)
    pivots = np.abs(np.diag(lu))
    floor = pivot_tol * max(1.0, float(pivots.max(initial=0.0)))
    if pivots.size and float(pivots.min()) <= floor:
        raise NearSingularError(
            "factorization pivot below tolerance; matrix is singular to "
            f"working precision (min pivot {pivots.min():.3e})",
            min_pivot=float(pivots.min()),
        )
    return lu, piv


def shifted_solve(P: np.ndarray, r: np.ndarray, rhs: np.ndarray,
                  pivot_tol: float) -> np.ndarray:
    """Solve (I - P + e r) x = rhs."""
    lu_piv = lu_factor_checked(shifted_matrix(P, r), pivot_tol)
    return scipy.linalg.lu_solve(lu_piv, rhs)


def shifted_solve_transposed(P: np.ndarray, r: np.ndarray, rhs: np.ndarray,
                             pivot_tol: float) -> np.ndarray:
    """Solve (I - P + e r)^T x = rhs, i.e. x (I - P + e r) = rhs as rows."""
    lu_piv = lu_factor_checked(shifted_matrix(P, r), pivot_tol)
    return scipy.linalg.lu_solve(lu_piv, rhs, trans=1)


def solve_checked(M: np.ndarray, rhs: np.ndarray, pivot_tol: float,
                  transposed: bool = False) -> np.ndarray:
    """Solve M x = rhs (or M^T x = rhs) through the checked factorization."""
    lu_piv = lu_factor_checked(M, pivot_tol)
    return scipy.linalg.lu_solve(lu_piv, rhs, trans=1 if transposed else 0)


def inverse_by_columns(M: np.ndarray, pivot_tol: float) -> np.ndarray:
    """Explicit inverse, assembled one identity column at a time."""
    n = M.shape[0]
    lu_piv = lu_factor_checked(M, pivot_tol)
    cols = [scipy.linalg.lu_solve(lu_piv, np.eye(n)[:, j]) for j in range(n)]
    return np.column_stack(cols)


def one_norm_condition(M: np.ndarray, M_inv: np.ndarray) -> float:
    """Exact 1-norm condition number given the explicit inverse."""
    norm = np.abs(M).sum(axis=0).max
    return float(norm() * np.abs(M_inv).sum(axis=0).max())


def _polish_root(x: complex, coeffs: tuple[float, ...]) -> complex:
    # one or two Newton steps on the monic polynomial; cheap insurance
    for _ in range(2):
        p = 0j
        dp = 0j
        for c in coeffs:
            dp = dp * x + p
            p = p * x + c
        if dp == 0:
            break
        x = x - p / dp
    return x


def _quadratic_roots(b: float, c: float) -> list[complex]:
    # x^2 + b x + c with real coefficients
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        sq = disc ** 0.5
        q = -0.5 * (b + (sq if b >= 0.0 else -sq))
        if q != 0.0:
            return [complex(q), complex(c / q)]
        return [complex(0.0), complex(-b)]
    im = 0.5 * (-disc) ** 0.5
    re = -0.5 * b
    return [complex(re, im), complex(re, -im)]


def _cubic_roots(a: float, b: float, c: float) -> list[complex]:
    # x^3 + a x^2 + b x + c via the depressed cubic t^3 + p t + q
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    shift = a / 3.0
    disc = cmath.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3)
    u3 = -q / 2.0 + disc
    alt = -q / 2.0 - disc
    if abs(alt) > abs(u3):
        u3 = alt
    if u3 == 0:
        roots = [complex(-shift)] * 3
    else:
        u = u3 ** (1.0 / 3.0)
        roots = []
        for k in range(3):
            uk = u * OMEGA ** k
            roots.append(uk - p / (3.0 * uk) - shift)
    coeffs = (1.0, a, b, c)
    return [_polish_root(x, coeffs) for x in roots]


def small_matrix_eigenvalues(M: np.ndarray) -> np.ndarray:
    """Eigenvalues of a 1x1, 2x2, or 3x3 real matrix, in closed form."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 1:
        return np.array([complex(M[0, 0])])
    if n == 2:
        tr = M[0, 0] + M[1, 1]
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        return np.array(_quadratic_roots(-tr, det))
    if n == 3:
        tr = M[0, 0] + M[1, 1] + M[2, 2]
        m2 = (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
              + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
              + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
        det = (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
               - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
               + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))
        return np.array(_cubic_roots(-tr, m2, -det))
    raise ValueError("closed-form eigenvalues are only available up to 3x3")


def match_spectra(expected: np.ndarray, computed: np.ndarray) -> float:
    """Greedy multiset match; returns the largest pairing distance."""
    remaining = list(computed)
    worst = 0.0
    for lam in expected:
        dists = [abs(lam - mu) for mu in remaining]
        k = int(np.argmin(dists))
        worst = max(worst, dists[k])
        remaining.pop(k)
    return worst
