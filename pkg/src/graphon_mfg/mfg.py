"""Discretized graphon mean field game engine.

Agent classes m = 0..M-1 carry state marginals mu[m, t] (shape M x (T+1) x X),
policies pi[m, t, x] (shape M x T x X x U) and see the neighborhood measure

    G[m, t] = (1/M) * sum_j weights[m, j] * mu[j, t]

which is a bounded nonnegative measure, not a probability vector. Rewards are
summed over t = 0..T-1 with terminal value zero.
"""

from __future__ import annotations

import numpy as np

from .graphon import DiscretizedGraphon

MASS_TOL = 1e-9          # marginal drift considered exact
MASS_REPAIR_TOL = 1e-6   # renormalize below this, raise above
KERNEL_ROW_TOL = 1e-6    # kernel rows further off than this are an env bug


class Environment:
    """Finite-state, finite-action model with neighborhood-coupled dynamics.

    Subclasses set ``num_states``, ``num_actions``, ``horizon`` and ``mu0``
    (a length-X simplex vector, or an (M, X) matrix for class-dependent
    starts) and implement ``transition``/``reward``. The measure ``g`` passed
    in is a length-X nonnegative vector whose total mass may exceed 1.
    """

    num_states: int
    num_actions: int
    horizon: int
    mu0: np.ndarray

    def transition(self, x: int, u: int, g: np.ndarray) -> np.ndarray:
        """Probability vector over next states."""
        raise NotImplementedError

    def reward(self, x: int, u: int, g: np.ndarray) -> float:
        raise NotImplementedError

    def kernel_batch(self, g_batch: np.ndarray) -> np.ndarray:
        """Transition tensors (B, X, U, X) for a batch of measures (B, X).

        Default falls back to the scalar interface; models override this
        with vectorized numpy for speed.
        """
        b = g_batch.shape[0]
        out = np.empty((b, self.num_states, self.num_actions, self.num_states))
        for i in range(b):
            for x in range(self.num_states):
                for u in range(self.num_actions):
                    out[i, x, u] = self.transition(x, u, g_batch[i])
        return out

    def reward_batch(self, g_batch: np.ndarray) -> np.ndarray:
        """Reward tables (B, X, U) for a batch of measures (B, X)."""
        b = g_batch.shape[0]
        out = np.empty((b, self.num_states, self.num_actions))
        for i in range(b):
            for x in range(self.num_states):
                for u in range(self.num_actions):
                    out[i, x, u] = self.reward(x, u, g_batch[i])
        return out


def uniform_policy(m: int, env: Environment) -> np.ndarray:
    """The uniform policy ensemble, OMD's starting point."""
    shape = (m, env.horizon, env.num_states, env.num_actions)
    return np.full(shape, 1.0 / env.num_actions)


def initial_marginals(env: Environment, m: int) -> np.ndarray:
    """Broadcast env.mu0 to one simplex row per class."""
    mu0 = np.asarray(env.mu0, dtype=float)
    if mu0.ndim == 1:
        mu0 = np.broadcast_to(mu0, (m, env.num_states))
    if mu0.shape != (m, env.num_states):
        raise ValueError(f"mu0 must have shape ({env.num_states},) or ({m}, {env.num_states})")
    if np.any(mu0 < 0) or np.any(np.abs(mu0.sum(axis=1) - 1.0) > MASS_TOL):
        raise ValueError("mu0 rows must be probability vectors")
    return np.array(mu0)


def _check_policy(pi, env, m):
    expect = (m, env.horizon, env.num_states, env.num_actions)
    pi = np.asarray(pi, dtype=float)
    if pi.shape != expect:
        raise ValueError(f"policy ensemble must have shape {expect}, got {pi.shape}")
    return pi


def _checked_kernels(env, g_flat):
    p = env.kernel_batch(np.asarray(g_flat, dtype=float))
    if np.any(p < 0):
        raise ValueError("transition kernel produced a negative probability")
    row_sums = p.sum(axis=-1)
    if np.any(np.abs(row_sums - 1.0) > KERNEL_ROW_TOL):
        worst = float(np.abs(row_sums - 1.0).max())
        raise ValueError(f"transition kernel rows must sum to 1 (worst drift {worst:.3e})")
    return p


def neighborhood_mf(wd: DiscretizedGraphon, mf: np.ndarray) -> np.ndarray:
    """Neighborhood measures G[m, t] = (1/M) sum_j w[m, j] mu[j, t]."""
    mf = np.asarray(mf, dtype=float)
    if mf.ndim != 3 or mf.shape[0] != wd.m:
        raise ValueError(f"mean field ensemble must have {wd.m} classes, got shape {mf.shape}")
    return np.einsum("ij,jtx->itx", wd.weights, mf) / wd.m


def forward(env: Environment, pi: np.ndarray, wd: DiscretizedGraphon) -> np.ndarray:
    """Propagate the per-class marginals under the policy ensemble.

    Marginal drift up to MASS_TOL is kept as-is, below MASS_REPAIR_TOL it is
    renormalized, and anything larger is treated as an environment bug.
    """
    m = wd.m
    pi = _check_policy(pi, env, m)
    t_end = env.horizon
    x_n = env.num_states
    mu = np.empty((m, t_end + 1, x_n))
    mu[:, 0] = initial_marginals(env, m)
    scaled_w = wd.weights / m
    for t in range(t_end):
        g_t = scaled_w @ mu[:, t]
        p = _checked_kernels(env, g_t)
        nxt = np.einsum("mx,mxu,mxuy->my", mu[:, t], pi[:, t], p)
        drift = np.abs(nxt.sum(axis=1) - 1.0)
        if np.any(drift >= MASS_REPAIR_TOL):
            raise ValueError(f"marginal mass drifted by {drift.max():.3e} at t={t + 1}")
        repair = drift > MASS_TOL
        if np.any(repair):
            nxt[repair] /= nxt[repair].sum(axis=1, keepdims=True)
        mu[:, t + 1] = nxt
    return mu


def _kernels_rewards(env, g):
    """Transition tensors and reward tables over classes and decision times.

    g has shape (M, T+1, X); only t < T is consumed. Returns
    (M, T, X, U, X) kernels and (M, T, X, U) rewards.
    """
    m, t_tot, x_n = g.shape
    t_end = env.horizon
    flat = g[:, :t_end].reshape(m * t_end, x_n)
    p = _checked_kernels(env, flat).reshape(m, t_end, x_n, env.num_actions, x_n)
    r = env.reward_batch(flat).reshape(m, t_end, x_n, env.num_actions)
    return p, r


def _policy_values_all(env, p, r, pi, mu0):
    """J per class for a frozen neighborhood ensemble (batched over classes)."""
    m, t_end = p.shape[0], p.shape[1]
    v = np.zeros((m, env.num_states))
    for t in reversed(range(t_end)):
        q = r[:, t] + np.einsum("mxuy,my->mxu", p[:, t], v)
        v = np.einsum("mxu,mxu->mx", pi[:, t], q)
    return np.einsum("mx,mx->m", mu0, v)


def _q_tables_all(env, p, r, pi):
    """On-policy Q(t, x, u) for every class under a frozen neighborhood."""
    m, t_end = p.shape[0], p.shape[1]
    q_all = np.empty_like(r)
    v = np.zeros((m, env.num_states))
    for t in reversed(range(t_end)):
        q = r[:, t] + np.einsum("mxuy,my->mxu", p[:, t], v)
        q_all[:, t] = q
        v = np.einsum("mxu,mxu->mx", pi[:, t], q)
    return q_all

def _best_responses_all(env, p, r, mu0):
    """Optimal deterministic policies and values against a frozen neighborhood."""
    m, t_end = p.shape[0], p.shape[1]
    pol = np.zeros((m, t_end, env.num_states, env.num_actions))
    v = np.zeros((m, env.num_states))
    for t in reversed(range(t_end)):
        q = r[:, t] + np.einsum("mxuy,my->mxu", p[:, t], v)
        best_u = np.argmax(q, axis=2)  # lowest maximizing index
        np.put_along_axis(pol[:, t], best_u[:, :, None], 1.0, axis=2)
        v = np.take_along_axis(q, best_u[:, :, None], axis=2)[:, :, 0]
    return pol, np.einsum("mx,mx->m", mu0, v)


def policy_value(env: Environment, g: np.ndarray, pi: np.ndarray, m: int) -> float:
    """Expected total reward of class m's policy against frozen neighborhoods."""
    g = np.asarray(g, dtype=float)
    p, r = _kernels_rewards(env, g[m : m + 1])
    mu0 = initial_marginals(env, g.shape[0])[m : m + 1]
    return float(_policy_values_all(env, p, r, np.asarray(pi)[m : m + 1], mu0)[0])


def q_evaluate(env: Environment, g: np.ndarray, pi: np.ndarray, m: int) -> np.ndarray:
    """On-policy Q table (T, X, U) for class m against frozen neighborhoods."""
    g = np.asarray(g, dtype=float)
    p, r = _kernels_rewards(env, g[m : m + 1])
    return _q_tables_all(env, p, r, np.asarray(pi)[m : m + 1])[0]


def best_response(env: Environment, g: np.ndarray, m: int):
    """Backward-induction optimum for class m: (deterministic policy, value).

    Ties pick the lowest action index, so the result is reproducible.
    """
    g = np.asarray(g, dtype=float)
    p, r = _kernels_rewards(env, g[m : m + 1])
    mu0 = initial_marginals(env, g.shape[0])[m : m + 1]
    pol, vals = _best_responses_all(env, p, r, mu0)
    return pol[0], float(vals[0])


def exploitability(env: Environment, pi: np.ndarray, wd: DiscretizedGraphon) -> float:
    """Average best-response gain over classes against the induced mean field."""
    mf = forward(env, pi, wd)
    g = neighborhood_mf(wd, mf)
    p, r = _kernels_rewards(env, g)
    mu0 = initial_marginals(env, wd.m)
    br_vals = _best_responses_all(env, p, r, mu0)[1]
    pol_vals = _policy_values_all(env, p, r, _check_policy(pi, env, wd.m), mu0)
    raw = float(np.mean(br_vals - pol_vals))
    if raw < -1e-9:
        raise ValueError(f"best response fell below the policy value by {-raw:.3e}")
    return max(raw, 0.0)


def monotonicity_gap(env: Environment, pi: np.ndarray, pi2: np.ndarray,
                     wd: DiscretizedGraphon) -> float:
    """Pairwise weak-monotonicity diagnostic.

    Averages J(mu, pi) + J(mu', pi') - J(mu, pi') - J(mu', pi) over classes,
    each J freezing the mean field generated by its own first argument.
    Nonpositivity for all pairs is the uniqueness condition; no sign is
    asserted here.
    """
    m = wd.m
    pi = _check_policy(pi, env, m)
    pi2 = _check_policy(pi2, env, m)
    mu0 = initial_marginals(env, m)
    g_a = neighborhood_mf(wd, forward(env, pi, wd))
    g_b = neighborhood_mf(wd, forward(env, pi2, wd))
    p_a, r_a = _kernels_rewards(env, g_a)
    p_b, r_b = _kernels_rewards(env, g_b)
    j_a_pi = _policy_values_all(env, p_a, r_a, pi, mu0)
    j_a_pi2 = _policy_values_all(env, p_a, r_a, pi2, mu0)
    j_b_pi = _policy_values_all(env, p_b, r_b, pi, mu0)
    j_b_pi2 = _policy_values_all(env, p_b, r_b, pi2, mu0)
    # grouped per mean field so gap(pi, pi2) == gap(pi2, pi) bitwise
    return float(np.mean((j_a_pi - j_a_pi2) + (j_b_pi2 - j_b_pi)))
