"""Shifted fundamental matrix of a discrete-time chain and what it yields.

For a row-stochastic P and any row vector r with r.e != 0, the matrix
I - P + e r is invertible (the zero eigenvalue of I - P shifts to r.e,
the rest stay at 1 - lambda_i). One factorization of it produces:

* potentials: g solves (I - P + e r) g = f and satisfies r.g = eta,
* the stationary distribution: pi solves pi (I - P + e r) = r,
* the classical fundamental matrix as the special case r = pi.

No pre-computation of pi is needed for the first two. Whenever
0 < r.e < 2 the inverse also equals the power series sum_n (P - e r)^n,
which grounds the truncated/sample-path approximations in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log

import numpy as np

from . import _linalg
from .config import DEFAULT, Tolerances
from .errors import (
    DimensionMismatchError,
    NearSingularError,
    NotAperiodicError,
    NotIrreducibleError,
    ReferenceNotDistributionLikeError,
    SeriesDivergentError,
)
from .model import (
    ReferenceVector,
    RewardVector,
    StochasticMatrix,
    diagnose_chain,
    reference_vector,
    reward_vector,
    uniform_reference,
)
from .report import CheckResult, VerificationReport

__all__ = [
    "FundamentalMatrix",
    "PotentialSolution",
    "StationaryDistribution",
    "SpectralRadiusEstimate",
    "NORM_ETA",
    "NORM_MINUS_ETA",
    "NORM_ZERO",
    "fundamental_matrix",
    "stationary",
    "potentials",
    "potentials_classic",
    "renormalize_potentials",
    "series_fundamental",
    "potentials_reference_level",
    "spectral_radius_estimate",
    "verify_spectral_shift",
]

NORM_ETA = "r·g=eta"
NORM_MINUS_ETA = "r·g=-eta"
NORM_ZERO = "r·g=0"


@dataclass(frozen=True)
class FundamentalMatrix:
    """Inverse (exact or truncated-series) of the shifted matrix.

    ``tail_norm`` is only set for series approximations and reports
    ||(P - e r)^(T+1)||_inf, an upper-bound proxy for the truncation error.
    """

    Z: np.ndarray
    reference: ReferenceVector
    source: StochasticMatrix
    condition_estimate: float | None = None
    tail_norm: float | None = None
    terms: int | None = None


@dataclass(frozen=True)
class PotentialSolution:
    """Potential vector with its average reward and normalization record.

    ``normalization`` states which linear condition pins down the member
    of the g + c e family that ``g`` is: r.g = eta for discrete-chain
    solves, r.g = -eta for the continuous-time shifted solve, r.g = 0 for
    reference-level approximations.
    """

    g: np.ndarray
    eta: float
    reference: ReferenceVector
    normalization: str = NORM_ETA


@dataclass(frozen=True)
class StationaryDistribution:
    """Long-run state occupancy; nonnegative, sums to one."""

    pi: np.ndarray


@dataclass(frozen=True)
class SpectralRadiusEstimate:
    """Power-iteration estimate of a spectral radius.

    ``uncertain`` flags runs whose growth ratios had not settled; the value
    is still the best available estimate.
    """

    value: float
    uncertain: bool
    iterations: int

    def __float__(self) -> float:
        return self.value


def _as_chain(P) -> StochasticMatrix:
    if isinstance(P, StochasticMatrix):
        return P
    from .model import validate_stochastic
    return validate_stochastic(P)


def _as_reference(r, n: int, cfg: Tolerances) -> ReferenceVector:
    if r is None:
        return uniform_reference(n, cfg=cfg)
    if not isinstance(r, ReferenceVector):
        r = reference_vector(r, cfg=cfg)
    if len(r) != n:
        raise DimensionMismatchError(
            f"reference vector has length {len(r)}, expected {n}",
            expected=n, got=len(r))
    return r


def _as_rewards(f, n: int) -> RewardVector:
    if not isinstance(f, RewardVector):
        f = reward_vector(f)
    if len(f) != n:
        raise DimensionMismatchError(
            f"reward vector has length {len(f)}, expected {n}",
            expected=n, got=len(f))
    return f


def _require_irreducible(P: StochasticMatrix, cfg: Tolerances,
                         need_aperiodic: bool = False) -> None:
    diag = diagnose_chain(P, cfg=cfg)
    if not diag.irreducible:
        raise NotIrreducibleError(
            "chain is not irreducible "
            f"({diag.num_closed_classes} closed class(es))",
            num_closed_classes=diag.num_closed_classes)
    if need_aperiodic and not diag.aperiodic:
        raise NotAperiodicError(
            f"chain is periodic with period {diag.period}", period=diag.period)


def fundamental_matrix(P, r=None, *, allow_unchecked: bool = False,
                       cfg: Tolerances = DEFAULT) -> FundamentalMatrix:
    """Explicit inverse of I - P + e r, assembled column by column.

    Exists for inspection and verification; bulk consumers should prefer
    the single solves in :func:`potentials` / :func:`stationary`.
    """
    P = _as_chain(P)
    r = _as_reference(r, P.size, cfg)
    if not allow_unchecked:
        _require_irreducible(P, cfg)
    M = _linalg.shifted_matrix(P.matrix, r.values)
    Z = _linalg.inverse_by_columns(M, cfg.pivot_tol)
    cond = _linalg.one_norm_condition(M, Z)
    return FundamentalMatrix(Z, r, P, condition_estimate=cond)


def stationary(P, r=None, *, allow_unchecked: bool = False,
               cfg: Tolerances = DEFAULT) -> StationaryDistribution:
    """Stationary distribution via one transposed solve of the shifted matrix.

    pi solves pi (I - P + e r) = r; no explicit inverse and no
    pre-computed pi are involved. Entries within solve tolerance below
    zero are clamped and the vector renormalized; anything more negative
    signals numerical failure.
    """
    P = _as_chain(P)
    r = _as_reference(r, P.size, cfg)
    if not allow_unchecked:
        _require_irreducible(P, cfg)
    pi = _linalg.shifted_solve_transposed(P.matrix, r.values, r.values,
                                          cfg.pivot_tol)
    tol = cfg.solve_tol_for(P.size)
    low = float(pi.min(initial=0.0))
    if low < -tol:
        raise NearSingularError(
            f"stationary solve produced entry {low:.3e} below -solve_tol; "
            "the chain is numerically reducible", min_entry=low)
    pi = np.maximum(pi, 0.0)
    pi = pi / pi.sum()
    return StationaryDistribution(pi)


def potentials(P, f, r=None, *, allow_unchecked: bool = False,
               cfg: Tolerances = DEFAULT) -> PotentialSolution:
    """Potential vector from one linear solve, no pi required.

    g solves (I - P + e r) g = f; the returned solution satisfies the
    Poisson equation g = f - eta e + P g with eta = r.g (= pi.f).
    """
    P = _as_chain(P)
    r = _as_reference(r, P.size, cfg)
    f = _as_rewards(f, P.size)
    if not allow_unchecked:
        _require_irreducible(P, cfg)
    g = _linalg.shifted_solve(P.matrix, r.values, f.values, cfg.pivot_tol)
    eta = float(r.values @ g)
    return PotentialSolution(g, eta, r, NORM_ETA)


def potentials_classic(P, f, *, allow_unchecked: bool = False,
                       cfg: Tolerances = DEFAULT) -> PotentialSolution:
    """Potentials through the classical route: compute pi first, shift by it.

    Equivalent to :func:`potentials` with r = pi; the result satisfies
    pi.g = eta.
    """
    P = _as_chain(P)
    pi = stationary(P, None, allow_unchecked=allow_unchecked, cfg=cfg)
    r_pi = reference_vector(pi.pi, cfg=cfg)
    return potentials(P, f, r_pi, allow_unchecked=allow_unchecked, cfg=cfg)


def renormalize_potentials(sol: PotentialSolution, r_new, *,
                           cfg: Tolerances = DEFAULT) -> PotentialSolution:
    """Shift a potential solution by the constant that makes r_new.g = eta.

    Any g + c e solves the same Poisson equation; this picks
    c = (eta - r_new.g) / (r_new.e).
    """
    r_new = _as_reference(r_new, sol.g.shape[0], cfg)
    c = (sol.eta - float(r_new.values @ sol.g)) / r_new.dot_with_ones
    return PotentialSolution(sol.g + c, sol.eta, r_new, NORM_ETA)


def series_fundamental(P, r=None, terms: int = 50, *,
                       allow_unchecked: bool = False,
                       cfg: Tolerances = DEFAULT) -> FundamentalMatrix:
    """Truncated power series sum_{n=0}^{T} (P - e r)^n.

    Converges to the exact inverse iff the spectral radius of P - e r is
    below one, which for an irreducible aperiodic chain happens exactly
    when 0 < r.e < 2. The reported tail_norm is ||(P - e r)^(T+1)||_inf.
    """
    P = _as_chain(P)
    r = _as_reference(r, P.size, cfg)
    if terms < 0:
        raise ValueError("terms must be >= 0")
    re = r.dot_with_ones
    if not (cfg.series_margin < re < 2.0 - cfg.series_margin):
        raise SeriesDivergentError(
            f"series diverges: r.e = {re:.6g} is outside (0, 2)",
            dot_with_ones=re)
    if not allow_unchecked:
        _require_irreducible(P, cfg, need_aperiodic=True)
    n = P.size
    M = P.matrix - np.outer(np.ones(n), r.values)
    acc = np.eye(n)
    term = np.eye(n)
    for _ in range(terms):
        term = term @ M
        acc += term
    tail = term @ M
    tail_norm = float(np.abs(tail).sum(axis=1).max())
    return FundamentalMatrix(acc, r, P, tail_norm=tail_norm, terms=terms)


def potentials_reference_level(P, f, r=None, horizon: int = 50, *,
                               allow_unchecked: bool = False,
                               cfg: Tolerances = DEFAULT) -> PotentialSolution:
    """Potentials as accumulated reward minus a scalar reference level.

    Computes the truncated accumulated reward acc_T = sum_{t<=T} P^t f and
    returns g = acc_T - e (r . acc_T). Requires r.e = 1; the result is the
    member of the potential family with r.g = 0, approached as T grows
    past the chain's mixing time. eta is reported separately as pi.f.
    """
    P = _as_chain(P)
    r = _as_reference(r, P.size, cfg)
    f = _as_rewards(f, P.size)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if abs(r.dot_with_ones - 1.0) > cfg.re_eq1_tol:
        raise ReferenceNotDistributionLikeError(
            f"reference-level form needs r.e = 1, got {r.dot_with_ones:.6g}",
            dot_with_ones=r.dot_with_ones)
    if not allow_unchecked:
        _require_irreducible(P, cfg, need_aperiodic=True)
    from .estimator import truncated_accumulated_reward
    acc = truncated_accumulated_reward(P, f, horizon)
    g = acc - float(r.values @ acc)
    pi = stationary(P, r, allow_unchecked=True, cfg=cfg)
    eta = float(pi.pi @ f.values)
    return PotentialSolution(g, eta, r, NORM_ZERO)


def spectral_radius_estimate(M, iters: int = 200, seed: int = 0) -> SpectralRadiusEstimate:
    """Estimate the spectral radius by seeded power iteration.

    Tracks per-step growth ratios of the normalized iterate and returns
    the geometric mean over a trailing window, which smooths the
    oscillation a dominant complex pair induces. This is an estimate, not
    a certificate; ``uncertain`` is set when the last two windows disagree.
    """
    M = np.asarray(M, dtype=float)
    if iters < 1:
        raise ValueError("iters must be >= 1")
    n = M.shape[0]
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    v = rng.standard_normal(n)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        v = np.zeros(n)
        v[0] = 1.0
    else:
        v = v / nv
    ratios: list[float] = []
    for k in range(iters):
        w = M @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return SpectralRadiusEstimate(0.0, False, k + 1)
        ratios.append(nw)
        v = w / nw
    window = min(len(ratios), 32)
    tail = ratios[-window:]
    value = exp(sum(log(x) for x in tail) / window)
    uncertain = True
    if len(ratios) >= 2 * window:
        prev = ratios[-2 * window:-window]
        prev_value = exp(sum(log(x) for x in prev) / window)
        uncertain = abs(value - prev_value) > 1e-6 * max(1.0, value)
    return SpectralRadiusEstimate(value, uncertain, iters)


def verify_spectral_shift(P, r=None, *, cfg: Tolerances = DEFAULT) -> VerificationReport:
    """Check the eigenvalue-shift facts of the matrix I - P + e r.

    Always verifies (I - P + e r) e = (r.e) e. For 2x2 and 3x3 inputs it
    additionally compares the full spectrum against {r.e} union
    {1 - lambda_i} using closed-form characteristic-polynomial roots, so
    no general eigensolver is involved.
    """
    P = _as_chain(P)
    r = _as_reference(r, P.size, cfg)
    n = P.size
    checks: list[CheckResult] = []

    M = _linalg.shifted_matrix(P.matrix, r.values)
    ones = np.ones(n)
    resid = float(np.abs(M @ ones - r.dot_with_ones * ones).max())
    tol = cfg.solve_tol_for(n)
    checks.append(CheckResult("ones_column_eigenvector", resid <= tol, resid))

    if n <= 3:
        lam = _linalg.small_matrix_eigenvalues(P.matrix)
        k1 = int(np.argmin(np.abs(lam - 1.0)))
        unit_resid = float(abs(lam[k1] - 1.0))
        checks.append(CheckResult("chain_unit_eigenvalue",
                                  unit_resid <= 1e-8, unit_resid))
        expected = np.array(
            [complex(r.dot_with_ones)]
            + [1.0 - lam[i] for i in range(n) if i != k1])
        computed = _linalg.small_matrix_eigenvalues(M)
        worst = _linalg.match_spectra(expected, computed)
        checks.append(CheckResult("shifted_spectrum", worst <= 1e-8, worst))

    return VerificationReport(tuple(checks))
