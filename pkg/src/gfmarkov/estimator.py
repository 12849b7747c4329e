"""Sample-path simulation and online potential estimation.

The estimator follows the single-component stochastic-approximation
loop: observe (s, f_t, s'), form the residual

    z_t = f_t - sum_i r(i) ghat(i) + ghat(s') - ghat(s)

with the current estimate, and update only ghat(s) by alpha_t * z_t.
Its fixed point is the solution of (I - P + e r) g = f, the same vector
the direct solve returns, normalized by r.g = eta. Convergence is
statistical, never per-seed guaranteed.

Randomness comes from numpy's PCG64 bit generator, which has a
documented, platform-stable 64-bit stream: identical seeds reproduce
identical paths and traces bit for bit.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import ScheduleInvalidError
from .gfm import _as_reference, _as_rewards, _require_irreducible
from .model import StochasticMatrix

__all__ = [
    "StepSchedule",
    "SimulationConfig",
    "EstimateTrace",
    "simulate_chain",
    "online_potentials",
    "truncated_accumulated_reward",
    "write_trace_csv",
]


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes alpha_t for the stochastic-approximation update.

    The power family alpha_t = a / (b + t)^p satisfies the
    sum alpha = inf, sum alpha^2 < inf conditions when 0.5 < p <= 1.
    For 0 < p <= 0.5 only the looser pair (sum alpha = inf, alpha -> 0)
    holds, and ``loose_only`` flags that no convergence claim is attached.
    """

    kind: str  # "robbins_monro_power" | "constant" | "custom"
    a: float = 1.0
    b: float = 10.0
    p: float = 1.0
    alpha_const: float = 0.1
    fn: Callable[[int], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "robbins_monro_power":
            if self.a <= 0 or self.b <= 0 or not (0.0 < self.p <= 1.0):
                raise ScheduleInvalidError(
                    f"power schedule needs a > 0, b > 0, 0 < p <= 1; got "
                    f"a={self.a}, b={self.b}, p={self.p}")
        elif self.kind == "constant":
            if self.alpha_const <= 0:
                raise ScheduleInvalidError("constant step size must be positive")
        elif self.kind == "custom":
            if self.fn is None:
                raise ScheduleInvalidError("custom schedule needs a callable")
        else:
            raise ScheduleInvalidError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def robbins_monro(cls, a: float = 1.0, b: float = 10.0, p: float = 1.0) -> "StepSchedule":
        return cls("robbins_monro_power", a=a, b=b, p=p)

    @classmethod
    def constant(cls, alpha: float) -> "StepSchedule":
        return cls("constant", alpha_const=alpha)

    @classmethod
    def custom(cls, fn: Callable[[int], float]) -> "StepSchedule":
        return cls("custom", fn=fn)

    @property
    def satisfies_robbins_monro(self) -> bool:
        return self.kind == "robbins_monro_power" and 0.5 < self.p <= 1.0

    @property
    def loose_only(self) -> bool:
        return self.kind == "robbins_monro_power" and self.p <= 0.5

    def alpha(self, t: int) -> float:
        if self.kind == "robbins_monro_power":
            return self.a / (self.b + t) ** self.p
        if self.kind == "constant":
            return self.alpha_const
        return float(self.fn(t))

    def alphas(self, steps: int) -> np.ndarray:
        """Vectorized alpha_0 .. alpha_{steps-1}, validated positive."""
        if self.kind == "robbins_monro_power":
            out = self.a / (self.b + np.arange(steps, dtype=float)) ** self.p
        elif self.kind == "constant":
            out = np.full(steps, self.alpha_const)
        else:
            out = np.array([float(self.fn(t)) for t in range(steps)])
        if steps and float(out.min()) <= 0.0:
            t_bad = int(np.argmin(out))
            raise ScheduleInvalidError(
                f"step size alpha_{t_bad} = {out[t_bad]:.6g} is not positive",
                t=t_bad)
        return out


DEFAULT_SCHEDULE = StepSchedule.robbins_monro(1.0, 10.0, 1.0)


@dataclass(frozen=True)
class SimulationConfig:
    """Run length, stopping rule, and seed for one estimation run."""

    seed: int = 0
    max_steps: int = 100_000
    epsilon: float = 1e-4
    check_interval: int = 1000

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.check_interval < 1:
            raise ValueError("check_interval must be >= 1")


@dataclass(frozen=True)
class EstimateTrace:
    """Result of one estimation run.

    ``history`` holds (t, max-abs change of ghat since the previous
    checkpoint); ``samples`` holds (t, state, reward, z_t, eta_hat) rows
    for CSV export. ``residual_count/sum/sumsq`` accumulate z_t statistics
    when requested.
    """

    g_hat: np.ndarray
    eta_hat: float
    steps_run: int
    converged: bool
    seed: int
    history: tuple[tuple[int, float], ...] = ()
    samples: tuple[tuple[int, int, float, float, float], ...] = ()
    residual_count: int = 0
    residual_sum: float = 0.0
    residual_sumsq: float = 0.0

    @property
    def residual_mean(self) -> float:
        return self.residual_sum / self.residual_count if self.residual_count else 0.0

    @property
    def residual_std(self) -> float:
        if self.residual_count < 2:
            return 0.0
        mean = self.residual_mean
        var = self.residual_sumsq / self.residual_count - mean * mean
        return max(var, 0.0) ** 0.5


def _sample_states(P: np.ndarray, s0: int, steps: int, seed: int) -> np.ndarray:
    """Walk the chain for `steps` transitions by inverse-CDF sampling.

    Each transition consumes one uniform draw and picks the first index
    whose cumulative row probability exceeds it, in stored row order.
    """
    n = P.shape[0]
    if not 0 <= s0 < n:
        raise ValueError(f"start state {s0} out of range [0, {n})")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    u = rng.random(steps).tolist()
    cum_rows = [row.tolist() for row in np.cumsum(P, axis=1)]
    last = n - 1
    out = [0] * (steps + 1)
    out[0] = s = int(s0)
    for t in range(steps):
        j = bisect_right(cum_rows[s], u[t])
        s = j if j < last else last
        out[t + 1] = s
    return np.array(out, dtype=np.int64)


def simulate_chain(P, f, s0: int, steps: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic seeded sample path of (state, reward) pairs.

    Returns `steps` transitions as arrays of length steps + 1: the
    visited states starting at s0, and the reward f(state) at each.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not isinstance(P, StochasticMatrix):
        from .model import validate_stochastic
        P = validate_stochastic(P)
    f = _as_rewards(f, P.size)
    states = _sample_states(np.asarray(P.matrix), s0, steps, seed)
    return states, f.values[states]


def truncated_accumulated_reward(P, f, horizon: int) -> np.ndarray:
    """Expected reward accumulated over t = 0..horizon, by recursion.

    acc_0 = f and acc_k = f + P acc_{k-1}; exact matrix arithmetic, no
    simulation. Feeds the reference-level potential formula.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if not isinstance(P, StochasticMatrix):
        from .model import validate_stochastic
        P = validate_stochastic(P)
    f = _as_rewards(f, P.size)
    acc = f.values.copy()
    for _ in range(horizon):
        acc = f.values + P.matrix @ acc
    return acc


def online_potentials(source, f, r=None, schedule: StepSchedule | None = None,
                      cfg: SimulationConfig | None = None, *,
                      s0: int = 0, g0=None, track_residuals: bool = False,
                      allow_unchecked: bool = False,
                      tolerances: Tolerances = DEFAULT) -> EstimateTrace:
    """Estimate potentials online from a sample path.

    ``source`` is either a StochasticMatrix (a path of cfg.max_steps
    transitions is simulated with cfg.seed) or a precomputed integer
    state path. Every step recomputes sum_i r(i) ghat(i) with the current
    estimate and updates the single component ghat(s).

    Stops when the max-abs change of ghat over a check interval falls
    below cfg.epsilon, or at cfg.max_steps. eta_hat = r.ghat at the end.
    """
    schedule = schedule or DEFAULT_SCHEDULE
    cfg = cfg or SimulationConfig()

    if not isinstance(source, StochasticMatrix) and np.asarray(source).ndim == 2:
        from .model import validate_stochastic
        source = validate_stochastic(source)

    if isinstance(source, StochasticMatrix):
        if not allow_unchecked:
            _require_irreducible(source, tolerances, need_aperiodic=True)
        states = _sample_states(np.asarray(source.matrix), s0,
                                cfg.max_steps, cfg.seed)
        n = source.size
    else:
        states = np.asarray(source, dtype=np.int64)
        if states.ndim != 1 or states.shape[0] < 2:
            raise ValueError("state path must be 1-D with at least 2 entries")
        n = np.asarray(f).reshape(-1).shape[0]
        if states.min() < 0 or states.max() >= n:
            raise ValueError("state path entries out of range for the rewards")

    f = _as_rewards(f, n)
    r = _as_reference(r, n, tolerances)
    steps = states.shape[0] - 1
    alphas = schedule.alphas(steps).tolist()

    # hot loop in plain python floats; numpy scalar indexing is slower here
    st = states.tolist()
    fv = f.values.tolist()
    rv = r.values.tolist()
    g = [0.0] * n if g0 is None else [float(x) for x in np.asarray(g0).reshape(-1)]
    if len(g) != n:
        raise ValueError(f"g0 must have length {n}")

    interval = cfg.check_interval
    eps = cfg.epsilon
    snapshot = list(g)
    history: list[tuple[int, float]] = []
    samples: list[tuple[int, int, float, float, float]] = []
    converged = False
    steps_run = steps
    zc = 0
    zs = 0.0
    zss = 0.0

    for t in range(steps):
        s = st[t]
        sp = st[t + 1]
        rdot = 0.0
        for ri, gi in zip(rv, g):
            rdot += ri * gi
        z = fv[s] - rdot + g[sp] - g[s]
        g[s] += alphas[t] * z
        if track_residuals:
            zc += 1
            zs += z
            zss += z * z
        if t % interval == 0:
            eta_t = 0.0
            for ri, gi in zip(rv, g):
                eta_t += ri * gi
            samples.append((t, s, fv[s], z, eta_t))
        if (t + 1) % interval == 0:
            delta = max(abs(a - b) for a, b in zip(g, snapshot))
            history.append((t + 1, delta))
            if delta < eps:
                converged = True
                steps_run = t + 1
                break
            snapshot = list(g)

    g_arr = np.array(g)
    eta_hat = float(r.values @ g_arr)
    return EstimateTrace(
        g_hat=g_arr,
        eta_hat=eta_hat,
        steps_run=steps_run,
        converged=converged,
        seed=int(cfg.seed),
        history=tuple(history),
        samples=tuple(samples),
        residual_count=zc,
        residual_sum=zs,
        residual_sumsq=zss,
    )


def write_trace_csv(trace: EstimateTrace, stream) -> None:
    """Write the sampled trace rows as CSV: t, state, reward, z_t, eta_hat."""
    stream.write("t,state,reward,z_t,eta_hat\n")
    for t, s, rew, z, eta in trace.samples:
        stream.write(f"{t},{s},{rew:.12g},{z:.12g},{eta:.12g}\n")
