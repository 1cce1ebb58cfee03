"""Shared test environments and brute-force oracles.

The oracles enumerate trajectories or deterministic policies directly and
never touch the backward-induction code paths they are checking.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from graphon_mfg.mfg import Environment


class ToyEnv(Environment):
    """2 states, 2 actions, transitions and rewards coupled to the measure."""

    num_states = 2
    num_actions = 2

    def __init__(self, horizon=2, mu0=(0.6, 0.4)):
        self.horizon = horizon
        self.mu0 = np.asarray(mu0, dtype=float)

    def transition(self, x, u, g):
        p_stay = 0.2 + 0.5 / (1.0 + float(g[0])) + 0.1 * u + 0.1 * x
        out = np.empty(2)
        out[x] = p_stay
        out[1 - x] = 1.0 - p_stay
        return out

    def reward(self, x, u, g):
        return float(x) - 0.5 * u + 0.3 * float(g[1]) / (1.0 + float(g[1]))


class IdentityEnv(Environment):
    """Agents never move; zero reward."""

    num_actions = 1

    def __init__(self, num_states=2, horizon=3, mu0=None):
        self.num_states = num_states
        self.horizon = horizon
        self.mu0 = (np.full(num_states, 1.0 / num_states) if mu0 is None
                    else np.asarray(mu0, dtype=float))

    def transition(self, x, u, g):
        out = np.zeros(self.num_states)
        out[x] = 1.0
        return out

    def reward(self, x, u, g):
        return 0.0


class ConstRewardEnv(IdentityEnv):
    """Identity dynamics, reward 1 everywhere."""

    def reward(self, x, u, g):
        return 1.0


def _model_tables(env, g_m):
    """Scalar-interface lookup tables P[t][x][u] (list) and R[t][x][u]."""
    kernels = [[[list(map(float, env.transition(x, u, g_m[t])))
                 for u in range(env.num_actions)]
                for x in range(env.num_states)]
               for t in range(env.horizon)]
    rewards = [[[float(env.reward(x, u, g_m[t]))
                 for u in range(env.num_actions)]
                for x in range(env.num_states)]
               for t in range(env.horizon)]
    return kernels, rewards


def enum_value(env, g_m, pi_m, mu0=None):
    """Expected total reward by explicit summation over all trajectories."""
    mu0 = np.asarray(env.mu0 if mu0 is None else mu0, dtype=float)
    kernels, rewards = _model_tables(env, g_m)
    total = 0.0
    for x0 in range(env.num_states):
        total += mu0[x0] * _enum_from(env, kernels, rewards, pi_m, 0, x0)
    return total


def _enum_from(env, kernels, rewards, pi_m, t, x):
    if t == env.horizon:
        return 0.0
    acc = 0.0
    for u in range(env.num_actions):
        pu = pi_m[t][x][u]
        if pu == 0.0:
            continue
        cont = sum(kernels[t][x][u][y] * _enum_from(env, kernels, rewards, pi_m, t + 1, y)
                   for y in range(env.num_states))
        acc += pu * (rewards[t][x][u] + cont)
    return acc


def enum_q(env, g_m, pi_m, t, x, u):
    """Q(t, x, u): force (x, u) at time t, then follow the policy."""
    step = env.reward(x, u, g_m[t])
    kernel = env.transition(x, u, g_m[t])
    cont = 0.0
    for y in range(env.num_states):
        if t + 1 < env.horizon:
            cont += kernel[y] * sum(
                pi_m[t + 1, y, u2] * enum_q(env, g_m, pi_m, t + 1, y, u2)
                for u2 in range(env.num_actions)
            )
    return step + cont


def enum_best_response(env, g_m, mu0=None):
    """Max value over every deterministic policy, via trajectory enumeration."""
    mu0 = np.asarray(env.mu0 if mu0 is None else mu0, dtype=float)
    kernels, rewards = _model_tables(env, g_m)
    best_val = -np.inf
    best_pol = None
    choices = env.horizon * env.num_states
    for assignment in itertools.product(range(env.num_actions), repeat=choices):
        pol = np.zeros((env.horizon, env.num_states, env.num_actions))
        for idx, action in enumerate(assignment):
            t, x = divmod(idx, env.num_states)
            pol[t, x, action] = 1.0
        val = sum(mu0[x0] * _enum_from(env, kernels, rewards, pol, 0, x0)
                  for x0 in range(env.num_states))
        if val > best_val:
            best_val = val
            best_pol = pol
    return best_pol, best_val


@pytest.fixture
def toy_env():
    return ToyEnv()


@pytest.fixture
def toy_neighborhood(toy_env):
    """A frozen, non-trivial measure ensemble for one class."""
    rng = np.random.default_rng(271828)
    return rng.uniform(0.0, 2.0, size=(1, toy_env.horizon + 1, toy_env.num_states))
