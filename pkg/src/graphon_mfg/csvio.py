"""CSV artifact writers/readers.

Every output starts with a comment header embedding the config hash and seed
so artifacts are traceable to the run that produced them. Floats are written
with shortest round-trip repr, which keeps reruns byte-stable.
"""

from __future__ import annotations

import csv
import os

import numpy as np


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, columns, rows, cfg_hash, seed):
    with open(path, "w", newline="") as fh:
        fh.write(f"# config={cfg_hash} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def read_csv(path, expect_columns=None):
    """Rows of a CSV produced by :func:`write_csv`, comment lines skipped."""
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    rows = list(csv.reader(lines))
    header, body = rows[0], rows[1:]
    if expect_columns is not None and header != list(expect_columns):
        raise ValueError(f"{path}: expected columns {list(expect_columns)}, found {header}")
    return header, body


def trace_rows(trace):
    return [(it, expl, secs) for it, expl, secs in
            zip(trace.iterations, trace.exploitability, trace.seconds)]


def policy_rows(pi):
    m, t_end, x_n, u_n = pi.shape
    rows = []
    for cls in range(m):
        for t in range(t_end):
            for x in range(x_n):
                for u in range(u_n):
                    rows.append((cls, t, x, u, pi[cls, t, x, u]))
    return rows


def meanfield_rows(mf):
    m, t_tot, x_n = mf.shape
    rows = []
    for cls in range(m):
        for t in range(t_tot):
            for x in range(x_n):
                rows.append((cls, t, x, mf[cls, t, x]))
    return rows


def trajectory_rows(empirical):
    t_tot, x_n = empirical.shape
    return [(t, x, empirical[t, x]) for t in range(t_tot) for x in range(x_n)]


def degrees_rows(histogram):
    return sorted(histogram.items())


def write_manifest(out_dir, entries, cfg_hash, seed):
    path = os.path.join(out_dir, "manifest.csv")
    write_csv(path, ("file", "config_hash"), [(name, cfg_hash) for name in entries],
              cfg_hash, seed)
    return path
