"""Benchmark environments: cyber security, its two-class variant, beach bar.

All three expose the :class:`~graphon_mfg.mfg.Environment` contract with
vectorized kernels. Defaults are the reference parameter sets used in the
experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .mfg import Environment

CYBER_STATES = ("DI", "DS", "UI", "US")
HETERO_STATES = ("PriDI", "PriDS", "PriUI", "PriUS", "CorDI", "CorDS", "CorUI", "CorUS")


def q_infection(p_direct, p_from_d, p_from_u):
    """Overall per-step infection probability from three independent channels.

    Computed as the complement product 1 - (1-p_direct)(1-p_D)(1-p_U) with
    each factor clamped to <= 1 first; identical to the expanded
    inclusion-exclusion formula whenever all inputs are probabilities, and
    still a valid probability when the network terms beta*G exceed 1.
    """
    p_direct = np.asarray(p_direct, dtype=float)
    p_from_d = np.asarray(p_from_d, dtype=float)
    p_from_u = np.asarray(p_from_u, dtype=float)
    if np.any(p_direct < 0) or np.any(p_from_d < 0) or np.any(p_from_u < 0):
        raise ValueError("infection channel probabilities must be >= 0")
    prod = (1.0 - np.minimum(p_direct, 1.0)) * (1.0 - np.minimum(p_from_d, 1.0)) \
        * (1.0 - np.minimum(p_from_u, 1.0))
    out = np.minimum(1.0, 1.0 - prod)
    return float(out) if out.ndim == 0 else out


def _check_prob(name, v, lo=0.0, hi=1.0, lo_open=False):
    if not (lo < v if lo_open else lo <= v) or v > hi:
        bound = f"({lo}, {hi}]" if lo_open else f"[{lo}, {hi}]"
        raise ValueError(f"{name} must lie in {bound}")


@dataclass(frozen=True)
class CyberParams:
    """Defense/infection model over states DI, DS, UI, US."""

    horizon: int = 50
    mu0: tuple = (0.25, 0.25, 0.25, 0.25)
    q_rec_d: float = 0.3
    q_rec_u: float = 0.2
    lam: float = 0.3          # success probability of a requested status switch
    v_h: float = 0.1          # attack intensity
    z_inf_d: float = 0.05
    z_inf_u: float = 0.1
    beta_dd: float = 0.1
    beta_ud: float = 0.2
    beta_du: float = 0.7
    beta_uu: float = 0.8
    k_d: float = 0.7
    k_i: float = 2.0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        _check_prob("q_rec_d", self.q_rec_d)
        _check_prob("q_rec_u", self.q_rec_u)
        _check_prob("lam", self.lam, lo_open=True)
        for name in ("v_h", "z_inf_d", "z_inf_u", "beta_dd", "beta_ud", "beta_du", "beta_uu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        _check_prob("v_h * z_inf_d", self.v_h * self.z_inf_d)
        _check_prob("v_h * z_inf_u", self.v_h * self.z_inf_u)
        if self.k_d < 0 or self.k_i < 0:
            raise ValueError("costs must be >= 0")
        mu0 = np.asarray(self.mu0, dtype=float)
        if mu0.shape != (4,) or np.any(mu0 < 0) or abs(mu0.sum() - 1.0) > 1e-9:
            raise ValueError("mu0 must be a probability vector over 4 states")


def _cyber_block(lam, q_rec_d, q_rec_u, qi_d, qi_u, u):
    """The 4x4 transition rows for one action, batched over the measures.

    qi_d/qi_u are (B,) infection probabilities; returns (B, 4, 4).
    """
    b = qi_d.shape[0]
    ul = u * lam
    stay = 1.0 - ul
    one = np.ones(b)
    rows = np.empty((b, 4, 4))
    rows[:, 0, 0] = stay * (1.0 - q_rec_d) * one
    rows[:, 0, 1] = stay * q_rec_d * one
    rows[:, 0, 2] = ul * (1.0 - q_rec_d) * one
    rows[:, 0, 3] = ul * q_rec_d * one
    rows[:, 1, 0] = stay * qi_d
    rows[:, 1, 1] = stay * (1.0 - qi_d)
    rows[:, 1, 2] = ul * qi_d
    rows[:, 1, 3] = ul * (1.0 - qi_d)
    rows[:, 2, 0] = ul * (1.0 - q_rec_u) * one
    rows[:, 2, 1] = ul * q_rec_u * one
    rows[:, 2, 2] = stay * (1.0 - q_rec_u) * one
    rows[:, 2, 3] = stay * q_rec_u * one
    rows[:, 3, 0] = ul * qi_u
    rows[:, 3, 1] = ul * (1.0 - qi_u)
    rows[:, 3, 2] = stay * qi_u
    rows[:, 3, 3] = stay * (1.0 - qi_u)
    return rows


def _cyber_kernel(p: CyberParams, g_di, g_ui):
    """(B, 4, 2, 4) kernel from the infected-neighbor masses."""
    qi_d = q_infection(p.v_h * p.z_inf_d, p.beta_dd * g_di, p.beta_ud * g_ui)
    qi_u = q_infection(p.v_h * p.z_inf_u, p.beta_du * g_di, p.beta_uu * g_ui)
    qi_d = np.atleast_1d(qi_d)
    qi_u = np.atleast_1d(qi_u)
    out = np.empty((qi_d.shape[0], 4, 2, 4))
    for u in (0, 1):
        out[:, :, u, :] = _cyber_block(p.lam, p.q_rec_d, p.q_rec_u, qi_d, qi_u, u)
    return out


class _BatchBackedEnv(Environment):
    """Scalar transition/reward implemented through the vectorized kernels."""

    def transition(self, x, u, g):
        return self.kernel_batch(np.asarray(g, dtype=float)[None])[0, x, u]

    def reward(self, x, u, g):
        return float(self.reward_batch(np.asarray(g, dtype=float)[None])[0, x, u])


class CyberEnv(_BatchBackedEnv):
    num_states = 4
    num_actions = 2

    def __init__(self, params: CyberParams):
        self.params = params
        self.horizon = params.horizon
        self.mu0 = np.asarray(params.mu0, dtype=float)
        self._reward_per_state = np.array([
            -params.k_d - params.k_i,  # DI
            -params.k_d,               # DS
            -params.k_i,               # UI
            0.0,                       # US
        ])

    def kernel_batch(self, g_batch):
        g_batch = np.asarray(g_batch, dtype=float)
        return _cyber_kernel(self.params, g_batch[:, 0], g_batch[:, 2])

    def reward_batch(self, g_batch):
        b = np.asarray(g_batch).shape[0]
        return np.broadcast_to(self._reward_per_state[None, :, None], (b, 4, 2)).copy()


def cyber_transition(x, u, g, params: CyberParams):
    """One transition row of the defense/infection model (length 4)."""
    g = np.asarray(g, dtype=float)
    return _cyber_kernel(params, g[None, 0], g[None, 2])[0, x, u]


def make_cyber_env(params: CyberParams | None = None) -> CyberEnv:
    return CyberEnv(params or CyberParams())


@dataclass(frozen=True)
class HeteroCyberParams:
    """Two ownership classes (private, corporate) encoded in an 8-state space."""

    horizon: int = 50
    mu0: tuple = (0.125,) * 8
    pri: CyberParams = field(default_factory=lambda: CyberParams(
        q_rec_d=0.4, q_rec_u=0.3, lam=0.3, v_h=0.1, z_inf_d=0.05, z_inf_u=0.1,
        beta_dd=0.2, beta_ud=0.3, beta_du=0.9, beta_uu=1.0, k_d=0.6, k_i=2.0,
    ))
    cor: CyberParams = field(default_factory=lambda: CyberParams(
        q_rec_d=0.4, q_rec_u=0.3, lam=0.3, v_h=0.1, z_inf_d=0.05, z_inf_u=0.1,
        beta_dd=0.1, beta_ud=0.2, beta_du=0.7, beta_uu=0.8, k_d=0.7, k_i=2.0,
    ))

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        mu0 = np.asarray(self.mu0, dtype=float)
        if mu0.shape != (8,) or np.any(mu0 < 0) or abs(mu0.sum() - 1.0) > 1e-9:
            raise ValueError("mu0 must be a probability vector over 8 states")


class HeteroCyberEnv(_BatchBackedEnv):
    """Block-diagonal kernel: transitions never cross the Pri/Cor boundary,
    and each block's infection terms read that block's own infected masses."""

    num_states = 8
    num_actions = 2

    def __init__(self, params: HeteroCyberParams):
        self.params = params
        self.horizon = params.horizon
        self.mu0 = np.asarray(params.mu0, dtype=float)
        rewards = np.empty(8)
        for base, block in ((0, params.pri), (4, params.cor)):
            rewards[base + 0] = -block.k_d - block.k_i
            rewards[base + 1] = -block.k_d
            rewards[base + 2] = -block.k_i
            rewards[base + 3] = 0.0
        self._reward_per_state = rewards

    def kernel_batch(self, g_batch):
        g_batch = np.asarray(g_batch, dtype=float)
        b = g_batch.shape[0]
        out = np.zeros((b, 8, 2, 8))
        out[:, 0:4, :, 0:4] = _cyber_kernel(self.params.pri, g_batch[:, 0], g_batch[:, 2])
        out[:, 4:8, :, 4:8] = _cyber_kernel(self.params.cor, g_batch[:, 4], g_batch[:, 6])
        return out

    def reward_batch(self, g_batch):
        b = np.asarray(g_batch).shape[0]
        return np.broadcast_to(self._reward_per_state[None, :, None], (b, 8, 2)).copy()


def make_hetero_cyber_env(params: HeteroCyberParams | None = None) -> HeteroCyberEnv:
    return HeteroCyberEnv(params or HeteroCyberParams())


@dataclass(frozen=True)
class BeachParams:
    """Towel-moving process on a line of positions with a bar in the middle."""

    num_positions: int = 10
    horizon: int = 50
    p_noise: float = 0.05
    crowd_weight: float = 3.0
    distance_weight: float | None = None  # defaults to 2/|X|
    move_weight: float | None = None      # defaults to 2/|X|
    boundary: str = "clamp"               # or "wrap"
    reward_sign_as_printed: bool = False
    mu0: tuple | None = None              # defaults to uniform

    def __post_init__(self):
        if self.num_positions < 2:
            raise ValueError("num_positions must be >= 2")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0.0 <= self.p_noise < 0.5:
            raise ValueError("p_noise must lie in [0, 0.5)")
        if self.boundary not in ("clamp", "wrap"):
            raise ValueError("boundary must be 'clamp' or 'wrap'")
        if self.mu0 is not None:
            mu0 = np.asarray(self.mu0, dtype=float)
            if mu0.shape != (self.num_positions,) or np.any(mu0 < 0) or abs(mu0.sum() - 1.0) > 1e-9:
                raise ValueError(f"mu0 must be a probability vector over {self.num_positions} states")

    @property
    def bar(self):
        return self.num_positions // 2


class BeachEnv(_BatchBackedEnv):
    """Positions 0..X-1, moves -1/0/+1 plus two-sided noise, crowd-averse
    reward read from the neighborhood mass at the current position."""

    num_actions = 3
    MOVES = (-1, 0, 1)

    def __init__(self, params: BeachParams):
        self.params = params
        self.num_states = params.num_positions
        self.horizon = params.horizon
        self.mu0 = (np.full(self.num_states, 1.0 / self.num_states)
                    if params.mu0 is None else np.asarray(params.mu0, dtype=float))
        self._base_kernel = self._build_kernel()
        self._base_reward = self._build_reward()

    def _apply_boundary(self, pos):
        if self.params.boundary == "clamp":
            return int(np.clip(pos, 0, self.num_states - 1))
        return pos % self.num_states

    def _build_kernel(self):
        p = self.params.p_noise
        noise = ((-1, p), (0, 1.0 - 2.0 * p), (1, p))
        kern = np.zeros((self.num_states, self.num_actions, self.num_states))
        for x in range(self.num_states):
            for ui, move in enumerate(self.MOVES):
                intended = self._apply_boundary(x + move)
                for eps, prob in noise:
                    kern[x, ui, self._apply_boundary(intended + eps)] += prob
        return kern

    def _build_reward(self):
        p = self.params
        dist_w = 2.0 / self.num_states if p.distance_weight is None else p.distance_weight
        move_w = 2.0 / self.num_states if p.move_weight is None else p.move_weight
        xs = np.arange(self.num_states)
        base = dist_w * np.abs(p.bar - xs)[:, None] + move_w * np.abs(self.MOVES)[None, :]
        return base if p.reward_sign_as_printed else -base

    def kernel_batch(self, g_batch):
        b = np.asarray(g_batch).shape[0]
        return np.broadcast_to(self._base_kernel[None], (b,) + self._base_kernel.shape).copy()

    def reward_batch(self, g_batch):
        g_batch = np.asarray(g_batch, dtype=float)
        crowd = self.params.crowd_weight * g_batch  # (B, X) at the current position
        return self._base_reward[None, :, :] - crowd[:, :, None]


def make_beach_env(params: BeachParams | None = None) -> BeachEnv:
    return BeachEnv(params or BeachParams())
