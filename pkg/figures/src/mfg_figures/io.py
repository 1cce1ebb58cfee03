"""Readers for the solver's CSV artifacts, with strict schema checks."""

from __future__ import annotations

import csv

import numpy as np

SCHEMAS = {
    "trace": ("iteration", "exploitability", "seconds"),
    "policy": ("class", "t", "state", "action", "prob"),
    "meanfield": ("class", "t", "state", "mass"),
    "sweep": ("beta", "n", "k", "mean_dmu", "stderr_dmu"),
    "degrees": ("degree", "count"),
}


class SchemaError(ValueError):
    pass


def read_table(path, schema):
    """Numeric record rows of a schema-checked CSV (comment lines skipped)."""
    expected = SCHEMAS[schema]
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise SchemaError(f"{path}: empty file, expected columns {list(expected)}")
    header = tuple(rows[0])
    if header != expected:
        missing = [c for c in expected if c not in header]
        extra = [c for c in header if c not in expected]
        offender = (missing + extra or ["<order>"])[0]
        raise SchemaError(
            f"{path}: column {offender!r} does not match the {schema} schema {list(expected)}"
        )
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    return data.reshape(-1, len(expected))


def policy_cube(path):
    """policy.csv -> array indexed [class, t, state, action]."""
    rows = read_table(path, "policy")
    m, t, x, u = (int(rows[:, i].max()) + 1 for i in range(4))
    cube = np.full((m, t, x, u), np.nan)
    cube[rows[:, 0].astype(int), rows[:, 1].astype(int),
         rows[:, 2].astype(int), rows[:, 3].astype(int)] = rows[:, 4]
    return cube


def meanfield_cube(path):
    """meanfield.csv -> array indexed [class, t, state]."""
    rows = read_table(path, "meanfield")
    m, t, x = (int(rows[:, i].max()) + 1 for i in range(3))
    cube = np.full((m, t, x), np.nan)
    cube[rows[:, 0].astype(int), rows[:, 1].astype(int), rows[:, 2].astype(int)] = rows[:, 3]
    return cube
