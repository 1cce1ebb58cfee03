"""Online Mirror Descent over policy ensembles with entropy regularization.

Scores y accumulate on-policy Q values; the entropic mirror map (softmax)
turns scores into policies. Everything is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import time

import numpy as np

from .graphon import DiscretizedGraphon
from .mfg import (
    Environment,
    forward,
    initial_marginals,
    neighborhood_mf,
    uniform_policy,
    _best_responses_all,
    _check_policy,
    _kernels_rewards,
    _policy_values_all,
    _q_tables_all,
)


def mirror_map(y_row: np.ndarray) -> np.ndarray:
    """Softmax of one score row, computed with max subtraction."""
    y_row = np.asarray(y_row, dtype=float)
    if not np.all(np.isfinite(y_row)):
        raise ValueError("mirror map scores must be finite")
    z = np.exp(y_row - y_row.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


def _mirror_all(y: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(y)):
        raise ValueError("mirror map scores must be finite")
    z = np.exp(y - y.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


@dataclass
class OmdState:
    """Score accumulators plus the policy they currently induce."""

    y: np.ndarray
    policy: np.ndarray
    tau: int
    gamma: float

    @classmethod
    def fresh(cls, env: Environment, m: int, gamma: float) -> "OmdState":
        if gamma < 0:
            raise ValueError("gamma must be >= 0")
        y = np.zeros((m, env.horizon, env.num_states, env.num_actions))
        return cls(y=y, policy=_mirror_all(y), tau=0, gamma=gamma)


@dataclass
class OmdTrace:
    """Exploitability (and optionally policies) recorded along the run."""

    iterations: list = field(default_factory=list)
    exploitability: list = field(default_factory=list)
    seconds: list = field(default_factory=list)
    policies: list = field(default_factory=list)

    def append(self, iteration, expl, secs, policy=None):
        self.iterations.append(int(iteration))
        self.exploitability.append(float(expl))
        self.seconds.append(float(secs))
        if policy is not None:
            self.policies.append(policy)

    def __len__(self):
        return len(self.iterations)


def omd_step(state: OmdState, env: Environment, wd: DiscretizedGraphon) -> OmdState:
    """One mirror-descent update from the mean field the current policy induces."""
    pi = _check_policy(state.policy, env, wd.m)
    mf = forward(env, pi, wd)
    g = neighborhood_mf(wd, mf)
    p, r = _kernels_rewards(env, g)
    q = _q_tables_all(env, p, r, pi)
    y = state.y + state.gamma * q
    return OmdState(y=y, policy=_mirror_all(y), tau=state.tau + 1, gamma=state.gamma)


def run_omd(env: Environment, wd: DiscretizedGraphon, gamma: float, iterations: int,
            eval_every: int = 1, snapshot_policies: bool = False):
    """Learn an equilibrium policy ensemble; returns (policy, mean field, trace).

    Starts from zero scores (the uniform policy). The trace records the
    exploitability of the policy after every ``eval_every``-th update (always
    including the final one); with ``iterations=0`` it records the uniform
    policy itself at iteration 0.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if eval_every < 1:
        raise ValueError("eval_every must be >= 1")
    m = wd.m
    state = OmdState.fresh(env, m, gamma)
    mu0 = initial_marginals(env, m)
    trace = OmdTrace()
    started = time.perf_counter()

    tau = 0
    while True:
        mf = forward(env, state.policy, wd)
        g = neighborhood_mf(wd, mf)
        p, r = _kernels_rewards(env, g)

        record = (tau == iterations) or (tau > 0 and tau % eval_every == 0)
        if record:
            br_vals = _best_responses_all(env, p, r, mu0)[1]
            pol_vals = _policy_values_all(env, p, r, state.policy, mu0)
            raw = float(np.mean(br_vals - pol_vals))
            if raw < -1e-9:
                raise ValueError(f"best response fell below the policy value by {-raw:.3e}")
            expl = max(raw, 0.0)
            trace.append(tau, expl, time.perf_counter() - started,
                         state.policy.copy() if snapshot_policies else None)
        if tau == iterations:
            return state.policy, mf, trace

        q = _q_tables_all(env, p, r, state.policy)
        y = state.y + state.gamma * q
        state = OmdState(y=y, policy=_mirror_all(y), tau=state.tau + 1, gamma=state.gamma)
        tau += 1
