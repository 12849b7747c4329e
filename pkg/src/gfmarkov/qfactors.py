"""Q-factors of a fixed randomized policy, solved in closed form.

The state-action pairs of an MDP under a policy form a chain of their
own: lift the transition tensor to an (S*A) x S matrix, embed the policy
as the block-diagonal S x (S*A) matrix L, and their product is the
row-stochastic state-action chain. The Q-factor vector then solves
(I - PL + e r) Q = f exactly like chain potentials do, with r any
state-action row vector with r.e != 0 and r.Q = eta on the solution.

State-action vectors are ordered state-major: (s0,a0), (s0,a1), ...,
(s1,a0), ..., the same order as ``rewards.reshape(-1)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _linalg
from .config import DEFAULT, Tolerances
from .gfm import _as_reference, stationary
from .model import MdpModel, ReferenceVector, StochasticMatrix
from .report import CheckResult, VerificationReport

__all__ = [
    "PolicyMatrix",
    "ActionTransitionMatrix",
    "StateActionChain",
    "QSolution",
    "build_policy_matrix",
    "action_transition_matrix",
    "build_state_action_chain",
    "qfactors_solve",
    "q_consistency_report",
]


@dataclass(frozen=True)
class PolicyMatrix:
    """Block-diagonal embedding of the policy, shape S x (S*A).

    Row s holds the policy distribution over actions in the block of
    state s and zeros elsewhere, so rows sum to one.
    """

    L: np.ndarray


@dataclass(frozen=True)
class ActionTransitionMatrix:
    """Lifted transitions, shape (S*A) x S: row (s,a) is p(s,a,.)."""

    P: np.ndarray


@dataclass(frozen=True)
class StateActionChain:
    """Row-stochastic chain on state-action pairs: the product P L."""

    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class QSolution:
    """Q-factor vector with its average reward and induced state values.

    ``induced_g[s]`` is the policy-weighted mean of Q over actions at s,
    which plays the role of the state potential.
    """

    q: np.ndarray
    eta: float
    reference: ReferenceVector
    induced_g: np.ndarray


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def build_policy_matrix(m: MdpModel) -> PolicyMatrix:
    """Exact block-diagonal construction of L from the policy rows."""
    S, A = m.states, m.actions
    L = np.zeros((S, S * A))
    for s in range(S):
        L[s, s * A:(s + 1) * A] = m.policy[s]
    return PolicyMatrix(_freeze(L))


def action_transition_matrix(m: MdpModel) -> ActionTransitionMatrix:
    """Lift the transition tensor to rows indexed by (state, action)."""
    S, A = m.states, m.actions
    return ActionTransitionMatrix(_freeze(m.transitions.reshape(S * A, S).copy()))


def build_state_action_chain(m: MdpModel, *, cfg: Tolerances = DEFAULT) -> StateActionChain:
    """The state-action chain P L, re-checked for row stochasticity."""
    P = action_transition_matrix(m).P
    L = build_policy_matrix(m).L
    tilde = P @ L
    sums = tilde.sum(axis=1)
    worst = float(np.abs(sums - 1.0).max(initial=0.0))
    if worst > cfg.row_tol:
        # both factors are exactly row-stochastic, so this cannot happen
        # short of overflow-scale inputs
        raise AssertionError(f"state-action chain rows drifted by {worst:.3e}")
    return StateActionChain(_freeze(tilde))


def _zero_probability_actions(m: MdpModel) -> list[tuple[int, int]]:
    pairs = np.argwhere(m.policy == 0.0)
    return [(int(s), int(a)) for s, a in pairs]


def qfactors_solve(m: MdpModel, r=None, *, cfg: Tolerances = DEFAULT) -> QSolution:
    """Solve (I - PL + e r) Q = f over state-action pairs.

    Only simplicity of the chain's unit eigenvalue is required (the solve
    raises NearSingular otherwise); actions the policy never takes keep
    their rows and get a warning, since they can make the state-action
    chain reducible even when the induced state chain is fine.
    """
    S, A = m.states, m.actions
    chain = build_state_action_chain(m, cfg=cfg)
    r = _as_reference(r, S * A, cfg)
    dead = _zero_probability_actions(m)
    if dead:
        warnings.warn(
            "policy assigns zero probability to state-action pairs "
            f"{dead}; the state-action chain may be reducible",
            stacklevel=2)
    f = m.rewards.reshape(-1)
    q = _linalg.shifted_solve(chain.matrix, r.values, f, cfg.pivot_tol)
    eta = float(r.values @ q)
    induced_g = (m.policy * q.reshape(S, A)).sum(axis=1)
    return QSolution(q, eta, r, induced_g)


def q_consistency_report(m: MdpModel, q: QSolution, *,
                         cfg: Tolerances = DEFAULT) -> VerificationReport:
    """Residuals of the defining Q-factor relations for a solved model.

    Checks the pointwise definition Q(s,a) = f(s,a) - eta + sum_s2
    p(s,a,s2) g(s2) with g the induced state values, the equivalent
    fixed-point form through the state-action chain, the chain's row
    sums, and eta against the state-action stationary average reward.
    """
    S, A = m.states, m.actions
    f = m.rewards.reshape(-1)
    chain = build_state_action_chain(m, cfg=cfg)
    checks: list[CheckResult] = []

    P_sa = action_transition_matrix(m).P
    point = q.q - (f - q.eta + P_sa @ q.induced_g)
    resid = float(np.abs(point).max())
    checks.append(CheckResult("q_pointwise_definition",
                              resid <= cfg.poisson_tol, resid))

    fixed = q.q - (f - q.eta + chain.matrix @ q.q)
    resid = float(np.abs(fixed).max())
    checks.append(CheckResult("q_fixed_point",
                              resid <= cfg.poisson_tol, resid))

    rows = float(np.abs(chain.matrix.sum(axis=1) - 1.0).max())
    checks.append(CheckResult("state_action_rows_stochastic",
                              rows <= 1e-12, rows))

    sm = StochasticMatrix(chain.matrix, 0.0)
    pi = stationary(sm, q.reference, allow_unchecked=True, cfg=cfg)
    resid = float(abs(q.eta - pi.pi @ f))
    checks.append(CheckResult("eta_vs_stationary_reward",
                              resid <= cfg.poisson_tol, resid))

    return VerificationReport(tuple(checks))
