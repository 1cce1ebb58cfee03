#!/usr/bin/env python3
"""Run the full experiment pipeline: equilibria, sweeps, graph statistics.

Writes everything under out/. Pass --fast to shrink iteration and sample
counts for a quick smoke run.
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from graphon_mfg.cli import run_experiment
from graphon_mfg.config import parse_config

ROOT = Path(__file__).resolve().parent.parent
STAGES = [
    ("solve", "cyber.ini"),
    ("solve", "hetero_cyber.ini"),
    ("solve", "beach.ini"),
    ("sweep", "sweep_cyber.ini"),
    ("sweep", "sweep_beta.ini"),
    ("graph-stats", "graph_stats.ini"),
    ("cutnorm", "cutnorm.ini"),
]

def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fast", action="store_true", help="small smoke-run settings")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    for command, name in STAGES:
        cfg = parse_config(ROOT / "configs" / name)
        if args.fast:
            cfg = replace(cfg, omd=replace(cfg.omd, iterations=30),
                          sweep=replace(cfg.sweep, samples_per_cell=4))
        started = time.time()
        status = run_experiment(cfg, command, workers=args.threads)
        print(f"[{name}] {command}: status {status} in {time.time() - started:.1f}s")
        if status != 0:
            return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
