import numpy as np
import pytest

from graphon_mfg.envs import make_cyber_env, CyberParams
from graphon_mfg.graphon import ConstantGraphon, DiscretizedGraphon, discretize
from graphon_mfg.mfg import (
    Environment,
    best_response,
    exploitability,
    forward,
    monotonicity_gap,
    neighborhood_mf,
    policy_value,
    q_evaluate,
    uniform_policy,
)

from conftest import ConstRewardEnv, IdentityEnv, ToyEnv, enum_best_response, enum_q, enum_value


def wd_of(weights):
    w = np.asarray(weights, dtype=float)
    m = w.shape[0]
    return DiscretizedGraphon(weights=w, representatives=(np.arange(m) + 0.5) / m)


class TestNeighborhood:
    def test_single_class_scaling(self):
        mf = np.array([[[0.5, 0.5]] * 3])
        g = neighborhood_mf(wd_of([[2.0]]), mf)
        assert np.array_equal(g, np.full((1, 3, 2), 1.0))

    def test_zero_weights(self):
        mf = np.random.default_rng(0).dirichlet(np.ones(3), size=(2, 4))
        g = neighborhood_mf(wd_of(np.zeros((2, 2))), mf)
        assert np.array_equal(g, np.zeros((2, 4, 3)))

    def test_two_class_average(self):
        mf = np.array([[[1.0, 0.0]], [[0.0, 1.0]]])
        g = neighborhood_mf(wd_of(np.ones((2, 2))), mf)
        assert np.allclose(g, 0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="classes"):
            neighborhood_mf(wd_of(np.ones((2, 2))), np.zeros((3, 4, 2)))


class UniformKickEnv(Environment):
    """Transitions ignore everything and land uniformly; zero reward."""

    num_states = 3
    num_actions = 2

    def __init__(self, horizon=4):
        self.horizon = horizon
        self.mu0 = np.array([1.0, 0.0, 0.0])

    def transition(self, x, u, g):
        return np.full(3, 1.0 / 3.0)

    def reward(self, x, u, g):
        return 0.0


class ChainEnv(Environment):
    """P(1|0) = 0.5, P(1|1) = 1, single action, zero reward."""

    num_states = 2
    num_actions = 1

    def __init__(self, horizon=2):
        self.horizon = horizon
        self.mu0 = np.array([1.0, 0.0])

    def transition(self, x, u, g):
        return np.array([0.5, 0.5]) if x == 0 else np.array([0.0, 1.0])

    def reward(self, x, u, g):
        return 0.0


class DriftingEnv(IdentityEnv):
    """Kernel rows deliberately off unity by a configurable amount."""

    def __init__(self, drift, **kw):
        super().__init__(**kw)
        self.drift = drift

    def transition(self, x, u, g):
        out = super().transition(x, u, g)
        return out * (1.0 + self.drift)


class TestForward:
    def test_identity_keeps_initial(self):
        env = IdentityEnv(num_states=3, horizon=5, mu0=(0.2, 0.3, 0.5))
        mf = forward(env, uniform_policy(2, env), wd_of(np.ones((2, 2))))
        assert np.allclose(mf, np.array([0.2, 0.3, 0.5]), atol=1e-15)

    def test_uniform_kick(self):
        env = UniformKickEnv()
        mf = forward(env, uniform_policy(1, env), wd_of([[1.0]]))
        assert np.array_equal(mf[0, 0], env.mu0)
        assert np.allclose(mf[0, 1:], 1.0 / 3.0, atol=1e-15)

    def test_two_step_chain(self):
        env = ChainEnv()
        mf = forward(env, uniform_policy(1, env), wd_of([[1.0]]))
        assert np.allclose(mf[0, 2], [0.25, 0.75], atol=1e-12)

    def test_mass_conservation(self):
        env = make_cyber_env(CyberParams(horizon=20))
        wd = wd_of(np.full((4, 4), 1.3))
        mf = forward(env, uniform_policy(4, env), wd)
        assert np.abs(mf.sum(axis=2) - 1.0).max() <= 1e-9

    def test_small_drift_is_repaired(self):
        env = DriftingEnv(5e-8, num_states=2, horizon=3, mu0=(1.0, 0.0))
        mf = forward(env, uniform_policy(1, env), wd_of([[1.0]]))
        assert np.abs(mf.sum(axis=2) - 1.0).max() <= 1e-9

    def test_large_drift_raises(self):
        env = DriftingEnv(0.1, num_states=2, horizon=3, mu0=(1.0, 0.0))
        with pytest.raises(ValueError, match="sum to 1"):
            forward(env, uniform_policy(1, env), wd_of([[1.0]]))

    def test_negative_kernel_raises(self):
        class NegativeEnv(IdentityEnv):
            def transition(self, x, u, g):
                return np.array([1.5, -0.5])

        env = NegativeEnv(num_states=2, horizon=2, mu0=(1.0, 0.0))
        with pytest.raises(ValueError, match="negative"):
            forward(env, uniform_policy(1, env), wd_of([[1.0]]))

    def test_dense_graphon_degenerates_to_classical_mfg(self):
        env = make_cyber_env(CyberParams(horizon=15))
        wd = discretize(ConstantGraphon(1.0), 6)
        pi = uniform_policy(6, env)
        mf = forward(env, pi, wd)
        g = neighborhood_mf(wd, mf)
        for m in range(6):
            assert np.abs(mf[m] - mf[0]).max() <= 1e-12
            assert np.abs(g[m] - mf.mean(axis=0)).max() <= 1e-12


class TestPolicyValue:
    def test_zero_reward(self, toy_env, toy_neighborhood):
        env = IdentityEnv(num_states=2, horizon=4, mu0=(1.0, 0.0))
        g = np.zeros((1, 5, 2))
        assert policy_value(env, g, uniform_policy(1, env), 0) == 0.0

    def test_constant_reward_counts_steps(self):
        env = ConstRewardEnv(num_states=2, horizon=50, mu0=(0.5, 0.5))
        g = np.zeros((1, 51, 2))
        assert policy_value(env, g, uniform_policy(1, env), 0) == pytest.approx(50.0, abs=1e-12)

    def test_matches_path_enumeration(self, toy_env, toy_neighborhood):
        rng = np.random.default_rng(5)
        pi = rng.dirichlet(np.ones(2), size=(1, toy_env.horizon, 2))
        val = policy_value(toy_env, toy_neighborhood, pi, 0)
        oracle = enum_value(toy_env, toy_neighborhood[0], pi[0])
        assert val == pytest.approx(oracle, abs=1e-12)


class TestQEvaluate:
    def test_zero_reward(self):
        env = IdentityEnv(num_states=2, horizon=3, mu0=(1.0, 0.0))
        q = q_evaluate(env, np.zeros((1, 4, 2)), uniform_policy(1, env), 0)
        assert np.array_equal(q, np.zeros((3, 2, 1)))

    def test_terminal_row_is_reward(self, toy_env, toy_neighborhood):
        pi = uniform_policy(1, toy_env)
        q = q_evaluate(toy_env, toy_neighborhood, pi, 0)
        t_last = toy_env.horizon - 1
        for x in range(2):
            for u in range(2):
                assert q[t_last, x, u] == toy_env.reward(x, u, toy_neighborhood[0, t_last])

    def test_matches_path_enumeration(self, toy_env, toy_neighborhood):
        rng = np.random.default_rng(6)
        pi = rng.dirichlet(np.ones(2), size=(1, toy_env.horizon, 2))
        q = q_evaluate(toy_env, toy_neighborhood, pi, 0)
        for t in range(toy_env.horizon):
            for x in range(2):
                for u in range(2):
                    oracle = enum_q(toy_env, toy_neighborhood[0], pi[0], t, x, u)
                    assert q[t, x, u] == pytest.approx(oracle, abs=1e-12)


class TestBestResponse:
    def test_action_independent_rewards_tie(self, toy_neighborhood):
        class ActionBlindEnv(ToyEnv):
            def reward(self, x, u, g):
                return float(x) + 0.1 * float(g[0])

            def transition(self, x, u, g):
                return super().transition(x, 0, g)

        env = ActionBlindEnv()
        _, val = best_response(env, toy_neighborhood, 0)
        uniform_val = policy_value(env, toy_neighborhood, uniform_policy(1, env), 0)
        assert val == pytest.approx(uniform_val, abs=1e-12)

    def test_single_action(self):
        env = ChainEnv()
        pol, _ = best_response(env, np.zeros((1, 3, 2)), 0)
        assert np.array_equal(pol, np.ones((2, 2, 1)))

    def test_matches_policy_enumeration(self, toy_env, toy_neighborhood):
        pol, val = best_response(toy_env, toy_neighborhood, 0)
        oracle_pol, oracle_val = enum_best_response(toy_env, toy_neighborhood[0])
        assert val == pytest.approx(oracle_val, abs=1e-12)
        assert np.array_equal(pol, oracle_pol)

    def test_dominates_random_policies(self, toy_env, toy_neighborhood):
        _, val = best_response(toy_env, toy_neighborhood, 0)
        rng = np.random.default_rng(17)
        for _ in range(100):
            pi = rng.dirichlet(np.ones(2), size=(1, toy_env.horizon, 2))
            assert val >= policy_value(toy_env, toy_neighborhood, pi, 0) - 1e-12


class TestExploitability:
    def test_single_action_is_zero(self):
        env = ChainEnv(horizon=4)
        assert exploitability(env, uniform_policy(2, env), wd_of(np.ones((2, 2)))) == 0.0

    def test_blind_reward_is_zero(self):
        class BlindEnv(ToyEnv):
            def reward(self, x, u, g):
                return float(x)

            def transition(self, x, u, g):
                return super().transition(x, 0, np.zeros(2))

        env = BlindEnv()
        val = exploitability(env, uniform_policy(3, env), wd_of(np.ones((3, 3))))
        assert val <= 1e-12

    def test_cyber_uniform_strictly_positive(self):
        env = make_cyber_env(CyberParams(horizon=10))
        val = exploitability(env, uniform_policy(3, env), wd_of(np.full((3, 3), 0.8)))
        assert val > 0.01

    def test_cross_checked_against_enumeration(self):
        env = make_cyber_env(CyberParams(horizon=3))
        wd = wd_of(np.array([[1.0, 0.5], [0.5, 2.0]]))
        pi = uniform_policy(2, env)
        val = exploitability(env, pi, wd)
        mf = forward(env, pi, wd)
        g = neighborhood_mf(wd, mf)
        gaps = []
        for m in range(2):
            _, br = enum_best_response(env, g[m])
            gaps.append(br - enum_value(env, g[m], pi[m]))
        assert val == pytest.approx(np.mean(gaps), abs=1e-12)

    def test_nonnegative_for_random_policies(self):
        env = make_cyber_env(CyberParams(horizon=8))
        wd = wd_of(np.full((2, 2), 1.1))
        rng = np.random.default_rng(23)
        for _ in range(20):
            pi = rng.dirichlet(np.ones(2), size=(2, 8, 4))
            assert exploitability(env, pi, wd) >= 0.0


class TestMonotonicityGap:
    def test_identical_policies_zero(self):
        env = make_cyber_env(CyberParams(horizon=5))
        wd = wd_of(np.full((2, 2), 0.9))
        pi = uniform_policy(2, env)
        assert monotonicity_gap(env, pi, pi, wd) == 0.0

    def test_neighborhood_blind_reward_zero(self):
        class BlindEnv(ToyEnv):
            def reward(self, x, u, g):
                return float(x) - 0.3 * u

            def transition(self, x, u, g):
                return super().transition(x, u, np.zeros(2))

        env = BlindEnv(horizon=3)
        rng = np.random.default_rng(31)
        pi = rng.dirichlet(np.ones(2), size=(2, 3, 2))
        pi2 = rng.dirichlet(np.ones(2), size=(2, 3, 2))
        gap = monotonicity_gap(env, pi, pi2, wd_of(np.ones((2, 2))))
        assert abs(gap) <= 1e-12

    def test_swap_symmetry_exact(self):
        env = make_cyber_env(CyberParams(horizon=6))
        wd = wd_of(np.array([[1.0, 0.4], [0.4, 1.5]]))
        rng = np.random.default_rng(37)
        pi = rng.dirichlet(np.ones(2), size=(2, 6, 4))
        pi2 = rng.dirichlet(np.ones(2), size=(2, 6, 4))
        assert monotonicity_gap(env, pi, pi2, wd) == monotonicity_gap(env, pi2, pi, wd)
