"""Shared test helpers: random instances and independent oracles.

The oracles deliberately avoid the library's solution path (the shifted
matrix): stationary distributions come from a least-squares solve of
pi P = pi with the normalization row appended, potentials from the
rank-completed Poisson system. Spectra come from numpy's eigensolver,
which the library itself never uses.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from gfmarkov import validate_generator, validate_mdp, validate_stochastic

REPO_ROOT = Path(__file__).resolve().parent.parent
MODELS = REPO_ROOT / "models"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def models_dir() -> Path:
    return MODELS


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


def random_chain(rng: np.random.Generator, n: int, floor: float = 0.02):
    """Strictly positive random transition matrix: irreducible, aperiodic."""
    raw = rng.gamma(1.0, 1.0, size=(n, n)) + floor
    return validate_stochastic(raw / raw.sum(axis=1, keepdims=True))


def random_periodic_chain(n: int):
    """Deterministic n-cycle: irreducible with period n."""
    P = np.zeros((n, n))
    for i in range(n):
        P[i, (i + 1) % n] = 1.0
    return validate_stochastic(P)


def random_reference(rng: np.random.Generator, n: int,
                     lo: float = 0.1, hi: float = 1.9) -> np.ndarray:
    """Signed random row vector with r.e drawn uniformly from [lo, hi]."""
    while True:
        v = rng.normal(size=n)
        s = v.sum()
        if abs(s) > 0.2:
            break
    return v * (rng.uniform(lo, hi) / s)


def random_generator_matrix(rng: np.random.Generator, n: int, floor: float = 0.02):
    """Strictly positive off-diagonal rates: ergodic generator."""
    off = rng.gamma(1.0, 1.0, size=(n, n)) + floor
    np.fill_diagonal(off, 0.0)
    B = off.copy()
    np.fill_diagonal(B, -off.sum(axis=1))
    return validate_generator(B)


def random_mdp(rng: np.random.Generator, S: int, A: int, floor: float = 0.05):
    """Strictly positive transitions and policy: irreducible closed chain."""
    p = rng.gamma(1.0, 1.0, size=(S, A, S)) + floor
    p = p / p.sum(axis=2, keepdims=True)
    policy = rng.gamma(1.0, 1.0, size=(S, A)) + floor
    policy = policy / policy.sum(axis=1, keepdims=True)
    rewards = rng.uniform(0.0, 1.0, size=(S, A))
    return validate_mdp(p, rewards, policy)


def oracle_stationary(P: np.ndarray) -> np.ndarray:
    """Solve pi P = pi, pi e = 1 by least squares on the stacked system."""
    n = P.shape[0]
    A = np.vstack([np.eye(n) - P.T, np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    return pi


def spectra_gap(a, b) -> float:
    """Largest pairing distance between two eigenvalue multisets."""
    b = list(b)
    worst = 0.0
    for lam in a:
        k = min(range(len(b)), key=lambda i: abs(lam - b[i]))
        worst = max(worst, abs(lam - b[k]))
        b.pop(k)
    return worst


def oracle_potentials(P: np.ndarray, f: np.ndarray, r: np.ndarray):
    """Poisson-equation solve with the normalization row r.g = eta appended.

    eta is pi.f from the stationary oracle; the stacked system
    [(I - P); r] g = [f - eta e; eta] pins the unique family member with
    r.g = eta.
    """
    n = P.shape[0]
    pi = oracle_stationary(P)
    eta = float(pi @ f)
    A = np.vstack([np.eye(n) - P, r.reshape(1, -1)])
    b = np.concatenate([f - eta, [eta]])
    g, *_ = np.linalg.lstsq(A, b, rcond=None)
    return g, eta
