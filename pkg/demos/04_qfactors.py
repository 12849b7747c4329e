"""Q-factors of a fixed randomized policy, solved like chain potentials.

State-action pairs form their own chain: lift the transition tensor to an
(S*A) x S matrix, embed the policy as a block-diagonal S x (S*A) matrix,
and their product is row-stochastic. Q then solves (I - PL + e r) Q = f
for any state-action reference with r.e != 0.
"""

import numpy as np

from gfmarkov import (
    build_policy_matrix,
    build_state_action_chain,
    q_consistency_report,
    qfactors_solve,
    uniform_reference,
    validate_mdp,
)

# two states, two actions: action 0 is "stay-ish", action 1 is "move"
p = np.array([
    [[0.9, 0.1], [0.2, 0.8]],
    [[0.3, 0.7], [0.6, 0.4]],
])
rewards = np.array([[1.0, 0.3], [0.0, 0.8]])
policy = np.array([[0.7, 0.3], [0.4, 0.6]])
m = validate_mdp(p, rewards, policy)

L = build_policy_matrix(m)
chain = build_state_action_chain(m)
print("policy matrix L:")
print(L.L)
print("state-action chain PL:")
print(np.round(chain.matrix, 6))

q = qfactors_solve(m, uniform_reference(4))
print("\nQ (state-major order):", np.round(q.q, 10))
print("eta =", round(q.eta, 12))
print("induced state values:", np.round(q.induced_g, 10))

report = q_consistency_report(m, q)
print("\nconsistency checks:")
for c in report.checks:
    print(f"  {c.name:30s} passed={c.passed}  residual={c.residual:.2e}")
