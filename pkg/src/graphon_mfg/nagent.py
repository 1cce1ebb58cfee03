"""Finite N-agent Monte Carlo simulation on graphs sampled from a graphon.

Mean-field policies transfer to agents by class membership of their graphon
position; each agent sees the neighborhood measure

    G_i[x] = (1/(N rho)) * #{infected-in-x neighbors j of i}

i.e. the neighbor state indicator sum rescaled by the sparsity normalizer.
The gap between the empirical state distribution and the class-averaged mean
field quantifies the quality of the mean-field approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor
import numpy as np

from .graphon import Graphon, discretize
from .graphs import GraphSample, sample_graph
from .mfg import Environment, forward, initial_marginals, _checked_kernels


@dataclass(eq=False)
class SimulationRun:
    """One simulated episode: class assignment, empirical flow, and its seed."""

    graph: GraphSample
    classes: np.ndarray            # per-agent class index
    counts: np.ndarray             # (T+1, X) int state counts
    mu_gap: float                  # filled in by mu_error
    seed: object

    @property
    def empirical(self):
        """Per-time empirical distributions, exact multiples of 1/N."""
        return self.counts / self.graph.n


def class_of_position(positions, m):
    """Class index of each position under the M-interval midpoint grid.

    Intervals are half-open [k/M, (k+1)/M) with the last one closed at 1.
    """
    idx = np.floor(np.asarray(positions, dtype=float) * m).astype(np.int64)
    return np.clip(idx, 0, m - 1)


def lift_policy(pi: np.ndarray, positions) -> np.ndarray:
    """Per-agent policy table (N, T, X, U): each agent adopts its class policy."""
    pi = np.asarray(pi, dtype=float)
    return pi[class_of_position(positions, pi.shape[0])]


def _sample_rows(rows, rng):
    """Draw one categorical index per row of a (N, K) probability matrix."""
    cdf = np.cumsum(rows, axis=1)
    u = rng.random(rows.shape[0]) * cdf[:, -1]
    return np.minimum((u[:, None] >= cdf).sum(axis=1), rows.shape[1] - 1)


def simulate_episode(env: Environment, graph: GraphSample, agent_policies: np.ndarray,
                     seed=0, classes=None) -> SimulationRun:
    """Roll out one episode of the finite-agent system on the given graph."""
    n = graph.n
    agent_policies = np.asarray(agent_policies, dtype=float)
    if agent_policies.shape[0] != n:
        raise ValueError(f"policy table covers {agent_policies.shape[0]} agents, graph has {n}")
    t_end = env.horizon
    x_n = env.num_states
    if agent_policies.shape[1:] != (t_end, x_n, env.num_actions):
        raise ValueError("policy table shape does not match the environment")

    rng = np.random.default_rng(seed)
    mu0 = np.asarray(env.mu0, dtype=float)
    if mu0.ndim != 1:
        raise ValueError("finite-agent simulation needs a class-independent mu0")
    states = rng.choice(x_n, size=n, p=mu0)
    adj = graph.adjacency_matrix()
    scale = 1.0 / (n * graph.rho)

    counts = np.zeros((t_end + 1, x_n), dtype=np.int64)
    counts[0] = np.bincount(states, minlength=x_n)
    agent_ids = np.arange(n)
    for t in range(t_end):
        onehot = np.zeros((n, x_n))
        onehot[agent_ids, states] = 1.0
        g = scale * (adj @ onehot)
        actions = _sample_rows(agent_policies[agent_ids, t, states], rng)
        kernels = _checked_kernels(env, g)
        states = _sample_rows(kernels[agent_ids, states, actions], rng)
        counts[t + 1] = np.bincount(states, minlength=x_n)

    return SimulationRun(graph=graph, classes=classes, counts=counts, mu_gap=np.nan, seed=seed)


def mu_error(run: SimulationRun, mf: np.ndarray) -> float:
    """L1 gap between the empirical flow and the class-averaged mean field.

    Summed over decision times t = 0..T-1 and states.
    """
    mf = np.asarray(mf, dtype=float)
    emp = run.empirical
    if mf.shape[2] != emp.shape[1]:
        raise ValueError("state count mismatch between run and mean field")
    if mf.shape[1] != emp.shape[0]:
        raise ValueError("horizon mismatch between run and mean field")
    t_end = emp.shape[0] - 1
    target = mf.mean(axis=0)
    gap = float(np.abs(emp[:t_end] - target[:t_end]).sum())
    run.mu_gap = gap
    return gap


def _episode_gap(env, w, pi, mf, n, beta, placement, cell_seed):
    """Sample one graph, lift the policy, simulate, and measure the gap."""
    graph_seed, episode_seed = cell_seed.spawn(2)
    graph = sample_graph(w, n, beta, placement=placement, seed=graph_seed)
    table = lift_policy(pi, graph.positions)
    run = simulate_episode(env, graph, table, seed=episode_seed,
                           classes=class_of_position(graph.positions, pi.shape[0]))
    return mu_error(run, mf)


def sweep_convergence(env: Environment, w: Graphon, pi: np.ndarray, betas, ns,
                      samples_per_cell: int, base_seed, placement="equispaced",
                      workers: int = 1):
    """Mean and standard error of the L1 gap over a (beta, N) grid.

    Every cell simulates ``samples_per_cell`` independently seeded graphs;
    the 68% confidence interval is mean +- one standard error. Cell seeds
    derive from (base_seed, beta index, N index, sample index), so cells are
    isolated and the table is reproducible regardless of scheduling.
    """
    if samples_per_cell < 2:
        raise ValueError("samples_per_cell must be >= 2")
    betas = list(betas)
    ns = [int(n) for n in ns]
    if not betas or not ns:
        raise ValueError("betas and ns must be non-empty")
    pi = np.asarray(pi, dtype=float)
    wd = discretize(w, pi.shape[0])
    mf = forward(env, pi, wd)

    jobs = []
    for bi, beta in enumerate(betas):
        for ni, n in enumerate(ns):
            for k in range(samples_per_cell):
                seed = np.random.SeedSequence(base_seed, spawn_key=(bi, ni, k))
                jobs.append((bi, ni, (env, w, pi, mf, n, beta, placement, seed)))

    gaps = np.empty((len(betas), len(ns), samples_per_cell))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_episode_gap_star, [args for _, _, args in jobs], chunksize=4)
    else:
        results = (_episode_gap(*args) for _, _, args in jobs)
    per_cell = np.zeros((len(betas), len(ns)), dtype=int)
    for (bi, ni, _), gap in zip(jobs, results):
        gaps[bi, ni, per_cell[bi, ni]] = gap
        per_cell[bi, ni] += 1

    rows = []
    for bi, beta in enumerate(betas):
        for ni, n in enumerate(ns):
            cell = gaps[bi, ni]
            mean = float(cell.mean())
            stderr = float(cell.std(ddof=1) / np.sqrt(samples_per_cell))
            rows.append((beta, n, samples_per_cell, mean, stderr))
    return rows


def _episode_gap_star(args):
    return _episode_gap(*args)
