"""Domain types for finite Markov models and their structural validation.

Covers row-stochastic transition matrices, transition-rate (generator)
matrices, reward and reference vectors, randomized-policy MDP models,
chain diagnostics (irreducibility, period), and uniformization of a
continuous-time process into an equivalent discrete chain.

All types are immutable after construction and safe to share across
threads; every operation in this module is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .config import DEFAULT, Tolerances
from .errors import (
    DimensionMismatchError,
    GammaTooSmallError,
    NegativeEntryError,
    NegativeOffDiagonalError,
    NonSquareError,
    ReferenceDegenerateError,
    RowSumViolationError,
)

__all__ = [
    "StochasticMatrix",
    "GeneratorMatrix",
    "RewardVector",
    "ReferenceVector",
    "MdpModel",
    "ChainDiagnostics",
    "validate_stochastic",
    "validate_generator",
    "validate_mdp",
    "diagnose_chain",
    "uniformize",
    "min_uniformization_rate",
    "reward_vector",
    "reference_vector",
    "uniform_reference",
    "e1_reference",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic transition matrix of a finite discrete-time chain.

    Construct through :func:`validate_stochastic`; rows are guaranteed
    nonnegative with sums within a few ulp of 1. ``max_correction``
    reports the largest entry change validation applied.
    """

    matrix: np.ndarray
    max_correction: float = 0.0

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class GeneratorMatrix:
    """Transition-rate matrix of a finite continuous-time process.

    Off-diagonal entries are nonnegative rates (1/time); each row sums to
    zero, with the diagonal adjusted during validation to absorb rounding.
    """

    matrix: np.ndarray
    max_correction: float = 0.0

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class RewardVector:
    """Per-state (or per state-action pair) reward rates."""

    values: np.ndarray

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ReferenceVector:
    """Row vector r with r.e bounded away from zero.

    The free parameter of every shifted-matrix formula: it selects which
    member of the constant-offset solution family is returned, via the
    normalization r.g = eta.
    """

    values: np.ndarray
    dot_with_ones: float

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MdpModel:
    """Finite MDP with a fixed randomized policy.

    ``transitions[s, a, s2]`` is the probability of moving to s2 when
    action a is taken in state s; ``rewards[s, a]`` the one-step reward;
    ``policy[s, a]`` the probability the policy picks a in s.
    """

    transitions: np.ndarray
    rewards: np.ndarray
    policy: np.ndarray

    @property
    def states(self) -> int:
        return self.transitions.shape[0]

    @property
    def actions(self) -> int:
        return self.transitions.shape[1]


@dataclass(frozen=True)
class ChainDiagnostics:
    """Structural facts about a chain's support graph."""

    irreducible: bool
    aperiodic: bool
    period: int
    num_closed_classes: int


def _require_square(raw: np.ndarray, err: str) -> np.ndarray:
    a = np.asarray(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquareError(f"{err}: expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonSquareError(f"{err}: entries must be finite")
    return a


# rows whose sums are this close to 1 are left untouched, which makes
# validation idempotent (renormalizing again would only shuffle last bits)
_ROW_SUM_EXACT = 16 * np.finfo(float).eps


def _settle_row_sums(m: np.ndarray, rows: np.ndarray) -> None:
    # nudge the largest entry of each renormalized row toward a bitwise-1.0
    # sum; pairwise-summation rounding can refuse the last ulp, so this is
    # best effort on top of the _ROW_SUM_EXACT guarantee
    for i in np.nonzero(rows)[0]:
        j = int(np.argmax(np.abs(m[i])))
        for _ in range(4):
            s = float(m[i].sum())
            if s == 1.0:
                break
            m[i, j] += 1.0 - s


def _validate_distribution_rows(a: np.ndarray, tol: float, what: str) -> np.ndarray:
    """Clamp tiny negatives, reject real ones, renormalize rows to sum 1.

    After renormalization every row sum is within a few ulp of 1; rows
    already that close are not modified at all.
    """
    if not np.all(np.isfinite(a)):
        raise NonSquareError(f"{what}: entries must be finite")
    low = a.min(initial=0.0)
    if low < -tol:
        i, j = np.unravel_index(int(np.argmin(a)), a.shape)
        raise NegativeEntryError(
            f"{what}: entry ({i},{j}) = {a[i, j]:.6g} is below -row_tol",
            row=int(i), col=int(j), value=float(a[i, j]))
    a = np.maximum(a, 0.0)
    sums = a.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > tol):
        i = int(np.argmax(np.abs(sums - 1.0)))
        raise RowSumViolationError(
            f"{what}: row {i} sums to {sums[i]:.17g}; |sum - 1| exceeds row_tol",
            row=i, row_sum=float(sums[i]))
    stale = np.abs(sums - 1.0) > _ROW_SUM_EXACT
    out = a.copy()
    out[stale] = a[stale] / sums[stale, None]
    _settle_row_sums(out, stale)
    return out


def validate_stochastic(raw, row_tol: float | None = None, *,
                        cfg: Tolerances = DEFAULT) -> StochasticMatrix:
    """Validate and renormalize a transition matrix.

    Entries in [-row_tol, 0) are clamped to zero; anything more negative is
    rejected. Row sums must lie within row_tol of 1, then get renormalized
    so downstream algebra sees machine-consistent stochasticity. Validating
    the output again returns it unchanged, bit for bit.
    """
    tol = cfg.row_tol if row_tol is None else float(row_tol)
    if tol <= 0:
        raise ValueError("row_tol must be positive")
    a = _require_square(raw, "transition matrix")
    out = _validate_distribution_rows(a, tol, "transition matrix")
    correction = float(np.abs(out - np.asarray(raw, dtype=float)).max(initial=0.0))
    return StochasticMatrix(_freeze(out), correction)


def validate_generator(raw, row_tol: float | None = None, *,
                       cfg: Tolerances = DEFAULT) -> GeneratorMatrix:
    """Validate a transition-rate matrix, forcing exact zero row sums.

    Off-diagonal rates in [-row_tol, 0) are clamped to zero; each row sum
    must lie within row_tol of 0 and the diagonal is then set to minus the
    off-diagonal sum, which also guarantees a nonpositive diagonal.
    """
    tol = cfg.row_tol if row_tol is None else float(row_tol)
    if tol <= 0:
        raise ValueError("row_tol must be positive")
    a = _require_square(raw, "generator matrix")
    n = a.shape[0]
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    if off.min(initial=0.0) < -tol:
        i, j = np.unravel_index(int(np.argmin(off)), off.shape)
        raise NegativeOffDiagonalError(
            f"off-diagonal rate ({i},{j}) = {a[i, j]:.6g} is negative",
            row=int(i), col=int(j), value=float(a[i, j]))
    off = np.maximum(off, 0.0)
    sums = off.sum(axis=1) + np.diag(a)
    bad = np.abs(sums) > tol
    if np.any(bad):
        i = int(np.argmax(np.abs(sums)))
        raise RowSumViolationError(
            f"row {i} sums to {sums[i]:.17g}; |sum| exceeds row_tol",
            row=i, row_sum=float(sums[i]))
    out = off
    out[np.arange(n), np.arange(n)] = -off.sum(axis=1)
    correction = float(np.abs(out - np.asarray(raw, dtype=float)).max(initial=0.0))
    return GeneratorMatrix(_freeze(out), correction)


def reward_vector(values, expected_len: int | None = None) -> RewardVector:
    v = np.asarray(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise DimensionMismatchError("reward vector entries must be finite")
    if expected_len is not None and v.shape[0] != expected_len:
        raise DimensionMismatchError(
            f"reward vector has length {v.shape[0]}, expected {expected_len}",
            expected=expected_len, got=int(v.shape[0]))
    return RewardVector(_freeze(v))


def reference_vector(values, *, cfg: Tolerances = DEFAULT) -> ReferenceVector:
    """Build a reference vector, rejecting r with |r.e| below re_tol."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ReferenceDegenerateError("reference vector entries must be finite")
    dot = float(v.sum())
    if abs(dot) < cfg.re_tol:
        raise ReferenceDegenerateError(
            f"|r.e| = {abs(dot):.3e} is below re_tol; the shifted matrix "
            "would be singular", dot_with_ones=dot)
    return ReferenceVector(_freeze(v), dot)


def uniform_reference(n: int, *, cfg: Tolerances = DEFAULT) -> ReferenceVector:
    """The default reference (1/n, ..., 1/n); r.e = 1."""
    return reference_vector(np.full(n, 1.0 / n), cfg=cfg)


def e1_reference(n: int, *, cfg: Tolerances = DEFAULT) -> ReferenceVector:
    """The first coordinate vector (1, 0, ..., 0)."""
    v = np.zeros(n)
    v[0] = 1.0
    return reference_vector(v, cfg=cfg)


def validate_mdp(transitions, rewards, policy, row_tol: float | None = None, *,
                 cfg: Tolerances = DEFAULT) -> MdpModel:
    """Validate an MDP model with a fixed randomized policy.

    Transition rows p(s,a,.) and policy rows must be probability
    distributions within row_tol; both are exactly renormalized.
    """
    tol = cfg.row_tol if row_tol is None else float(row_tol)
    p = np.asarray(transitions, dtype=float)
    if p.ndim != 3 or p.shape[0] != p.shape[2]:
        raise NonSquareError(
            f"transition tensor must have shape (S, A, S), got {p.shape}")
    S, A = p.shape[0], p.shape[1]
    f = np.asarray(rewards, dtype=float)
    if f.shape != (S, A):
        raise DimensionMismatchError(
            f"rewards must have shape ({S}, {A}), got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise DimensionMismatchError("rewards must be finite")
    pol = np.asarray(policy, dtype=float)
    if pol.shape != (S, A):
        raise DimensionMismatchError(
            f"policy must have shape ({S}, {A}), got {pol.shape}")
    if not np.all(np.isfinite(pol)):
        raise DimensionMismatchError("policy must be finite")

    flat = _validate_distribution_rows(p.reshape(S * A, S), tol, "transition tensor")
    pol_rows = _validate_distribution_rows(pol, tol, "policy")
    return MdpModel(
        _freeze(flat.reshape(S, A, S)),
        _freeze(f.copy()),
        _freeze(pol_rows),
    )


def _scc_period(adj: np.ndarray, nodes: np.ndarray) -> int:
    """gcd of cycle lengths inside one strongly connected component.

    Breadth-first levels from an arbitrary root; every in-component edge
    (u, v) contributes level(u) + 1 - level(v) to the gcd (tree edges
    contribute 0 and drop out). Returns 0 for a cycle-free component.
    """
    members = set(int(x) for x in nodes)
    root = int(nodes[0])
    level = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.nonzero(adj[u])[0]:
                v = int(v)
                if v in members and v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u in members:
        for v in np.nonzero(adj[u])[0]:
            v = int(v)
            if v in members:
                g = gcd(g, level[u] + 1 - level[v])
    return abs(g)


def diagnose_chain(P: StochasticMatrix, *, cfg: Tolerances = DEFAULT) -> ChainDiagnostics:
    """Irreducibility, period, and closed-class count from the support graph.

    An edge i -> j exists iff P(i,j) > edge_tol (default: strictly
    positive). The reported period is the gcd of all directed cycle
    lengths; for reducible chains that is the gcd across the components
    that contain cycles, so aperiodic <=> period == 1 by construction.
    """
    adj = np.asarray(P.matrix) > cfg.edge_tol
    n_comp, labels = connected_components(
        csr_matrix(adj), directed=True, connection="strong")
    irreducible = n_comp == 1

    num_closed = 0
    period = 0
    for comp in range(n_comp):
        nodes = np.nonzero(labels == comp)[0]
        inside = labels == comp
        if not adj[np.ix_(nodes, ~inside)].any():
            num_closed += 1
        p = _scc_period(adj, nodes)
        if p:
            period = gcd(period, p)
    period = period or 1
    return ChainDiagnostics(
        irreducible=bool(irreducible),
        aperiodic=period == 1,
        period=int(period),
        num_closed_classes=int(num_closed),
    )


def min_uniformization_rate(B: GeneratorMatrix) -> float:
    """Largest exit rate max_s |B(s,s)|, the smallest admissible gamma."""
    return float(np.abs(np.diag(B.matrix)).max(initial=0.0))


def uniformize(B: GeneratorMatrix, gamma: float, *,
               cfg: Tolerances = DEFAULT) -> StochasticMatrix:
    """Embed a rate matrix into the discrete chain P = I + B / gamma.

    gamma must be at least the largest exit rate, otherwise the diagonal
    of P would go negative.
    """
    gamma = float(gamma)
    rate = min_uniformization_rate(B)
    if gamma <= 0.0 or gamma < rate:
        raise GammaTooSmallError(
            f"gamma = {gamma:.6g} must be positive and at least the largest "
            f"exit rate {rate:.6g}", gamma=gamma, min_rate=rate)
    P = np.eye(B.size) + np.asarray(B.matrix) / gamma
    return validate_stochastic(P, cfg.row_tol, cfg=cfg)
