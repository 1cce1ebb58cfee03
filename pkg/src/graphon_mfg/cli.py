"""Config-driven experiment runner.

Subcommands:
  solve        learn the equilibrium (OMD) and dump trace/policy/mean field
  simulate     one finite-agent episode on a sampled graph
  sweep        L1-gap table over the (beta, N) grid
  graph-stats  sample a graph, dump degree histogram and density
  cutnorm      lower-bound cut norm of a graphon (difference)

Each run writes CSVs plus a manifest into the output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import csvio
from .config import ExperimentConfig, config_hash, parse_config
from .graphon import cut_norm_estimate, discretize
from .graphs import degree_histogram, edge_density, sample_graph, write_edge_list
from .mfg import forward, uniform_policy
from .nagent import class_of_position, lift_policy, mu_error, simulate_episode, sweep_convergence
from .omd import run_omd


def _resolve_policy(cfg: ExperimentConfig, env, wd, which):
    if which == "uniform":
        return uniform_policy(wd.m, env)
    pi, _, _ = run_omd(env, wd, cfg.omd.gamma, cfg.omd.iterations, cfg.omd.eval_every)
    return pi


def _cmd_solve(cfg, out_dir, cfg_hash):
    env = cfg.build_env()
    wd = discretize(cfg.build_graphon(), cfg.num_classes)
    pi, mf, trace = run_omd(env, wd, cfg.omd.gamma, cfg.omd.iterations, cfg.omd.eval_every)
    files = {
        "trace.csv": (("iteration", "exploitability", "seconds"), csvio.trace_rows(trace)),
        "policy.csv": (("class", "t", "state", "action", "prob"), csvio.policy_rows(pi)),
        "meanfield.csv": (("class", "t", "state", "mass"), csvio.meanfield_rows(mf)),
    }
    for name, (cols, rows) in files.items():
        csvio.write_csv(os.path.join(out_dir, name), cols, rows, cfg_hash, cfg.seed)
    return list(files)


def _cmd_simulate(cfg, out_dir, cfg_hash):
    env = cfg.build_env()
    w = cfg.build_graphon()
    wd = discretize(w, cfg.num_classes)
    pi = _resolve_policy(cfg, env, wd, cfg.simulate.policy)
    seed = np.random.SeedSequence(cfg.seed, spawn_key=(0,))
    graph_seed, episode_seed = seed.spawn(2)
    graph = sample_graph(w, cfg.simulate.n, cfg.simulate.beta,
                         placement=cfg.simulate.placement, seed=graph_seed)
    run = simulate_episode(env, graph, lift_policy(pi, graph.positions), seed=episode_seed,
                           classes=class_of_position(graph.positions, wd.m))
    gap = mu_error(run, forward(env, pi, wd))
    print(f"dmu={gap!r}")
    files = {
        "trajectory.csv": (("t", "state", "mass"), csvio.trajectory_rows(run.empirical)),
    }
    for name, (cols, rows) in files.items():
        csvio.write_csv(os.path.join(out_dir, name), cols, rows, cfg_hash, cfg.seed)
    write_edge_list(graph, os.path.join(out_dir, "graph.edgelist"))
    return list(files) + ["graph.edgelist"]


def _cmd_sweep(cfg, out_dir, cfg_hash, workers):
    env = cfg.build_env()
    w = cfg.build_graphon()
    wd = discretize(w, cfg.num_classes)
    pi = _resolve_policy(cfg, env, wd, cfg.sweep.policy)
    rows = sweep_convergence(env, w, pi, cfg.sweep.betas, cfg.sweep.ns,
                             cfg.sweep.samples_per_cell, cfg.seed,
                             placement=cfg.sweep.placement, workers=workers)
    csvio.write_csv(os.path.join(out_dir, "sweep.csv"),
                    ("beta", "n", "k", "mean_dmu", "stderr_dmu"), rows, cfg_hash, cfg.seed)
    return ["sweep.csv"]


def _cmd_graph_stats(cfg, out_dir, cfg_hash):
    w = cfg.build_graphon()
    graph = sample_graph(w, cfg.graph_stats.n, cfg.graph_stats.beta,
                         placement=cfg.graph_stats.placement,
                         seed=np.random.SeedSequence(cfg.seed, spawn_key=(1,)))
    hist = degree_histogram(graph)
    print(f"n={graph.n} edges={graph.num_edges} density={edge_density(graph)!r} rho={graph.rho!r}")
    csvio.write_csv(os.path.join(out_dir, "degrees.csv"), ("degree", "count"),
                    csvio.degrees_rows(hist), cfg_hash, cfg.seed)
    write_edge_list(graph, os.path.join(out_dir, "graph.edgelist"))
    return ["degrees.csv", "graph.edgelist"]


def _cmd_cutnorm(cfg, out_dir, cfg_hash):
    w = cfg.build_graphon()
    other = cfg.cutnorm.other.build() if cfg.cutnorm.other is not None else None
    est = cut_norm_estimate(w, cfg.cutnorm.grid, cfg.cutnorm.restarts, cfg.seed,
                            other=other, subdiv=cfg.cutnorm.subdiv)
    print(f"cut norm lower bound: {est!r}")
    csvio.write_csv(os.path.join(out_dir, "cutnorm.csv"),
                    ("grid", "restarts", "lower_bound"),
                    [(cfg.cutnorm.grid, cfg.cutnorm.restarts, est)], cfg_hash, cfg.seed)
    return ["cutnorm.csv"]


def run_experiment(cfg: ExperimentConfig, command: str, out_dir=None, workers=None) -> int:
    """Execute one subcommand pipeline; returns a process exit status."""
    out_dir = out_dir or os.path.join(cfg.output_dir, command.replace("-", "_"))
    os.makedirs(out_dir, exist_ok=True)
    workers = workers if workers is not None else (cfg.threads or os.cpu_count() or 1)
    cfg_hash = config_hash(cfg)
    started = time.perf_counter()
    try:
        if command == "solve":
            produced = _cmd_solve(cfg, out_dir, cfg_hash)
        elif command == "simulate":
            produced = _cmd_simulate(cfg, out_dir, cfg_hash)
        elif command == "sweep":
            produced = _cmd_sweep(cfg, out_dir, cfg_hash, workers)
        elif command == "graph-stats":
            produced = _cmd_graph_stats(cfg, out_dir, cfg_hash)
        elif command == "cutnorm":
            produced = _cmd_cutnorm(cfg, out_dir, cfg_hash)
        else:
            raise ValueError(f"unknown command {command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    csvio.write_manifest(out_dir, produced, cfg_hash, cfg.seed)
    print(f"{command}: wrote {', '.join(produced)} + manifest.csv to {out_dir} "
          f"({time.perf_counter() - started:.1f}s)")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="graphon-mfg", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=["solve", "simulate", "sweep", "graph-stats", "cutnorm"])
    parser.add_argument("--config", required=True, help="path to the experiment config")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--seed", type=int, default=None, help="base seed override")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker pool size (default: machine parallelism)")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=args.seed)
    return run_experiment(cfg, args.command, out_dir=args.out, workers=args.threads)


if __name__ == "__main__":
    sys.exit(main())
