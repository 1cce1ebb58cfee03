"""Five figure kinds over the solver's CSVs.

All statistics live in the CSVs; these functions only reshape and draw.
Rendering is deterministic: fixed SVG hash salt, no embedded dates, so
rerunning on the same inputs reproduces the image files byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "mfg-figures"

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, meanfield_cube, policy_cube, read_table

KINDS = ("trace", "policy", "infection", "beach", "sweep")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple                      # CSV paths, one unless noted
    out: str                           # output path without extension
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("figure spec needs at least one input CSV")


def _save(fig, out):
    paths = (f"{out}.png", f"{out}.svg")
    fig.savefig(paths[0], dpi=150)
    fig.savefig(paths[1], metadata={"Date": None})
    plt.close(fig)
    return list(paths)


def render_trace(spec):
    """Exploitability over OMD iterations, log scale by default."""
    fig, ax = plt.subplots(figsize=(5, 3.4), constrained_layout=True)
    for path in spec.inputs:
        rows = read_table(path, "trace")
        ax.plot(rows[:, 0], rows[:, 1], marker="o" if len(rows) < 25 else None,
                markersize=3, label=spec.options.get("label", path))
    ax.set_xlabel("iteration $n$")
    ax.set_ylabel(r"exploitability $\Delta J$")
    ax.set_yscale(spec.options.get("yscale", "log"))
    if len(spec.inputs) > 1:
        ax.legend(fontsize=8)
    return _save(fig, spec.out)


def render_policy(spec):
    """One heatmap per state: P(chosen action) over classes (y) and time (x)."""
    cube = policy_cube(spec.inputs[0])
    m, t, x, u = cube.shape
    action = int(spec.options.get("action", u - 1))
    names = spec.options.get("state_names", [f"state {i}" for i in range(x)])
    cols = min(x, 4)
    rowsn = (x + cols - 1) // cols
    fig, axes = plt.subplots(rowsn, cols, figsize=(3.1 * cols, 2.6 * rowsn),
                             constrained_layout=True, squeeze=False)
    for s in range(x):
        ax = axes[s // cols][s % cols]
        im = ax.imshow(cube[:, :, s, action], aspect="auto", origin="lower",
                       extent=(0, t, 0, 1), vmin=0.0, vmax=1.0, cmap="viridis")
        ax.set_title(names[s], fontsize=9)
        ax.set_xlabel("t")
        ax.set_ylabel(r"graphon index $\alpha$")
    for s in range(x, rowsn * cols):
        axes[s // cols][s % cols].axis("off")
    fig.colorbar(im, ax=axes, shrink=0.85, label=f"P(u={action})")
    return _save(fig, spec.out)


def render_infection(spec):
    """Aggregate mass of the marked states per class, as curves over time."""
    cube = meanfield_cube(spec.inputs[0])
    m, t, x = cube.shape
    states = spec.options.get("states", (0, 2))
    states = [s for s in states if s < x]
    mass = cube[:, :, states].sum(axis=2)
    fig, ax = plt.subplots(figsize=(5, 3.4), constrained_layout=True)
    cmap = plt.get_cmap("viridis")
    for cls in range(m):
        ax.plot(np.arange(t), mass[cls], color=cmap(cls / max(m - 1, 1)), lw=1.0)
    sm = plt.cm.ScalarMappable(cmap=cmap, norm=plt.Normalize(0, 1))
    fig.colorbar(sm, ax=ax, label=r"graphon index $\alpha$")
    ax.set_xlabel("t")
    ax.set_ylabel("probability of infection")
    ax.set_ylim(0.0, 1.0)
    return _save(fig, spec.out)


def render_beach(spec):
    """Final distribution per class, and the class-averaged evolution."""
    cube = meanfield_cube(spec.inputs[0])
    m, t, x = cube.shape
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2), constrained_layout=True)
    im1 = ax1.imshow(cube[:, t - 2 if t > 1 else 0, :], aspect="auto", origin="lower",
                     extent=(-0.5, x - 0.5, 0, 1), cmap="viridis")
    ax1.set_xlabel("position")
    ax1.set_ylabel(r"graphon index $\alpha$")
    ax1.set_title("distribution at t = T-1", fontsize=9)
    fig.colorbar(im1, ax=ax1, label="mass")
    im2 = ax2.imshow(cube.mean(axis=0).T, aspect="auto", origin="lower",
                     extent=(0, t - 1, -0.5, x - 0.5), cmap="viridis")
    ax2.set_xlabel("t")
    ax2.set_ylabel("position")
    ax2.set_title("average distribution over time", fontsize=9)
    fig.colorbar(im2, ax=ax2, label="mass")
    return _save(fig, spec.out)


def render_sweep(spec):
    """L1-gap table: curve with a +-1 SE band, or a heatmap over (beta, N)."""
    rows = read_table(spec.inputs[0], "sweep")
    betas = np.unique(rows[:, 0])
    ns = np.unique(rows[:, 1])
    fig, ax = plt.subplots(figsize=(5, 3.4), constrained_layout=True)
    if len(betas) > 1 and len(ns) > 1:
        grid = np.full((len(betas), len(ns)), np.nan)
        for beta, n, _, mean, _ in rows:
            grid[np.searchsorted(betas, beta), np.searchsorted(ns, n)] = mean
        im = ax.imshow(grid, aspect="auto", origin="lower",
                       extent=(ns.min(), ns.max(), betas.min(), betas.max()))
        ax.set_xlabel("N")
        ax.set_ylabel(r"$\beta$")
        fig.colorbar(im, ax=ax, label=r"mean $\Delta\mu$")
    else:
        along_beta = len(betas) > 1
        xcol, sel = (0, ns[0]) if along_beta else (1, betas[0])
        mask = rows[:, 1 - xcol] == sel
        data = rows[mask][np.argsort(rows[mask][:, xcol])]
        xs, mean, se = data[:, xcol], data[:, 3], data[:, 4]
        ax.plot(xs, mean, marker="o", markersize=3)
        ax.fill_between(xs, mean - se, mean + se, alpha=0.3)
        ax.set_xlabel(r"$\beta$" if along_beta else "N")
        if not along_beta:
            ax.set_xscale(spec.options.get("xscale", "log"))
        ax.set_ylabel(r"mean $\Delta\mu$  ($\pm$ 1 SE)")
    return _save(fig, spec.out)


_RENDERERS = {
    "trace": render_trace,
    "policy": render_policy,
    "infection": render_infection,
    "beach": render_beach,
    "sweep": render_sweep,
}


def render(spec: FigureSpec):
    """Dispatch on the figure kind; returns the written image paths."""
    return _RENDERERS[spec.kind](spec)
