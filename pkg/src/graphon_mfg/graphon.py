"""Graphon kernels: construction, evaluation, discretization, smoothing, cut norm.

A graphon here is a symmetric nonnegative kernel on [0,1]^2, evaluable
pointwise (vectorized over numpy arrays). Unbounded kernels such as the
power-law family are capped at ``clamp_max`` so downstream linear algebra
never sees non-finite values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

DEFAULT_CLAMP = 1e6


def _check_unit_interval(name, v):
    v = np.asarray(v, dtype=float)
    if np.any(v < 0.0) or np.any(v > 1.0):
        raise ValueError(f"{name} must lie in [0,1]")
    return v


class Graphon:
    """Base class for symmetric nonnegative kernels on the unit square."""

    clamp_max: float = DEFAULT_CLAMP

    def eval(self, x, y):
        """Evaluate the kernel at (x, y), clamped to [0, clamp_max].

        Accepts scalars or broadcastable arrays; raises ValueError if any
        coordinate leaves [0,1].
        """
        x = _check_unit_interval("x", x)
        y = _check_unit_interval("y", y)
        out = np.minimum(self._kernel(x, y), self.clamp_max)
        return float(out) if out.ndim == 0 else out

    def _kernel(self, x, y):
        raise NotImplementedError

    def max_value(self):
        """Cheap upper bound on the (clamped) kernel, used by samplers."""
        return self.clamp_max


@dataclass(frozen=True)
class ConstantGraphon(Graphon):
    value: float
    clamp_max: float = DEFAULT_CLAMP

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("value must be >= 0")

    def _kernel(self, x, y):
        return np.broadcast_to(np.float64(self.value), np.broadcast_shapes(x.shape, y.shape)).copy()

    def max_value(self):
        return min(self.value, self.clamp_max)


@dataclass(frozen=True)
class PowerLawGraphon(Graphon):
    """W(x,y) = (1-a)^2 (xy)^(-a); diverges at the axes, so eval clamps there."""

    exponent: float
    clamp_max: float = DEFAULT_CLAMP

    def __post_init__(self):
        if not 0.0 < self.exponent < 1.0:
            raise ValueError("exponent must lie in (0,1)")

    def _kernel(self, x, y):
        a = self.exponent
        prod = x * y
        with np.errstate(divide="ignore"):
            vals = (1.0 - a) ** 2 * prod**(-a)
        return np.where(prod > 0.0, vals, np.inf)


@dataclass(frozen=True)
class CutoffPowerLawGraphon(Graphon):
    """Power-law kernel flattened below the cutoff; bounded and Lipschitz."""

    exponent: float
    cutoff: float
    clamp_max: float = DEFAULT_CLAMP

    def __post_init__(self):
        if not 0.0 < self.exponent < 1.0:
            raise ValueError("exponent must lie in (0,1)")
        if not 0.0 < self.cutoff < 1.0:
            raise ValueError("cutoff must lie in (0,1)")

    def _kernel(self, x, y):
        a, c = self.exponent, self.cutoff
        pref = ((1.0 - a) / (1.0 - a * c**(1.0 - a))) ** 2
        return pref * (np.maximum(x, c) * np.maximum(y, c)) ** (-a)

    def max_value(self):
        a, c = self.exponent, self.cutoff
        pref = ((1.0 - a) / (1.0 - a * c**(1.0 - a))) ** 2
        return min(pref * (c * c) ** (-a), self.clamp_max)


@dataclass(frozen=True, eq=False)
class StepGraphon(Graphon):
    """Piecewise-constant kernel on a grid of parts.

    ``values`` is the Q x Q symmetric part matrix; ``breakpoints`` the full
    boundary vector 0 = b_0 < ... < b_Q = 1. Cells are half-open [b_i, b_{i+1})
    except the last, which includes 1.
    """

    values: np.ndarray
    breakpoints: np.ndarray
    clamp_max: float = DEFAULT_CLAMP

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        bps = np.asarray(self.breakpoints, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError("values must be a square matrix")
        if not np.array_equal(vals, vals.T):
            raise ValueError("values must be symmetric")
        if np.any(vals < 0):
            raise ValueError("values must be >= 0")
        q = vals.shape[0]
        if bps.shape != (q + 1,) or bps[0] != 0.0 or bps[-1] != 1.0 or np.any(np.diff(bps) <= 0):
            raise ValueError("breakpoints must be strictly increasing from 0 to 1 with Q+1 entries")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "breakpoints", bps)

    @property
    def num_parts(self):
        return self.values.shape[0]

    def is_equipartition(self):
        q = self.num_parts
        return np.allclose(self.breakpoints, np.arange(q + 1) / q, atol=1e-12)

    def part_index(self, v):
        idx = np.searchsorted(self.breakpoints, v, side="right") - 1
        return np.clip(idx, 0, self.num_parts - 1)

    def _kernel(self, x, y):
        return self.values[self.part_index(x), self.part_index(y)]

    def max_value(self):
        return min(float(self.values.max()), self.clamp_max)


@dataclass(frozen=True, eq=False)
class SmoothedStepGraphon(Graphon):
    """Blend of an equipartition step graphon across width-xi border strips.

    Outside the strips (and inside the outer band of width xi around the
    unit square's boundary) it equals the base step graphon; across a strip
    it interpolates linearly between the two adjacent part values, and on
    strip intersections bilinearly between the four corner values.
    """

    base: StepGraphon
    border_width: float
    clamp_max: float = field(default=DEFAULT_CLAMP)

    def __post_init__(self):
        q = self.base.num_parts
        if not self.base.is_equipartition():
            raise ValueError("smoothing requires an equipartition step graphon")
        if not 0.0 < self.border_width < 1.0 / (2 * q):
            raise ValueError(f"border width must lie in (0, 1/(2Q)) = (0, {1.0 / (2 * q)})")

    def _coord_status(self, v):
        """Classify each coordinate: nearest interior break and offset, or cell."""
        q = self.base.num_parts
        xi = self.border_width
        b = np.rint(v * q).astype(int)  # nearest break index, 0..Q
        d = v - b / q
        in_strip = (d >= -xi) & (d < xi) & (b >= 1) & (b <= q - 1)
        cell = np.clip(np.floor(v * q).astype(int), 0, q - 1)
        return in_strip, b, d, cell

    def _kernel(self, x, y):
        x, y = np.broadcast_arrays(x, y)
        q = self.base.num_parts
        xi = self.border_width
        w = self.base.values
        step_vals = self.base._kernel(x, y)

        outer = (x <= xi) | (x >= 1.0 - xi) | (y <= xi) | (y >= 1.0 - xi)
        xs, xb, xd, xc = self._coord_status(x)
        ys, yb, yd, yc = self._coord_status(y)

        # Linear weights toward the lower/higher part across each strip.
        clx = 0.5 - xd / (2.0 * xi)
        chx = (xd + xi) / (2.0 * xi)
        cly = 0.5 - yd / (2.0 * xi)
        chy = (yd + xi) / (2.0 * xi)

        xb_lo = np.clip(xb - 1, 0, q - 1)
        xb_hi = np.clip(xb, 0, q - 1)
        yb_lo = np.clip(yb - 1, 0, q - 1)
        yb_hi = np.clip(yb, 0, q - 1)

        # y in a strip, x in a cell interior
        v_ystrip = cly * w[xc, yb_lo] + chy * w[xc, yb_hi]
        # x in a strip, y in a cell interior
        v_xstrip = clx * w[xb_lo, yc] + chx * w[xb_hi, yc]
        # both in strips: bilinear blend, grouped so evaluation is exactly
        # symmetric under (x, y) swap
        v_both = (clx * cly * w[xb_lo, yb_lo] + chx * chy * w[xb_hi, yb_hi]) + (
            clx * chy * w[xb_lo, yb_hi] + chx * cly * w[xb_hi, yb_lo]
        )

        out = np.where(xs & ys, v_both, np.where(xs, v_xstrip, np.where(ys, v_ystrip, step_vals)))
        return np.where(outer, step_vals, out)

    def max_value(self):
        return self.base.max_value()


@dataclass(frozen=True)
class DifferenceKernel:
    """Signed kernel a - b; only used by the cut norm estimator."""

    a: Graphon
    b: Graphon

    def eval(self, x, y):
        return np.asarray(self.a.eval(x, y)) - np.asarray(self.b.eval(x, y))


_KINDS = {
    "constant": (ConstantGraphon, ("value",)),
    "power_law": (PowerLawGraphon, ("exponent",)),
    "cutoff_power_law": (CutoffPowerLawGraphon, ("exponent", "cutoff")),
}


def make_graphon(kind, clamp_max=DEFAULT_CLAMP, **params):
    """Build a graphon from a tagged descriptor (kind name + named parameters).

    Step and smoothed-step graphons are built via ``StepGraphon`` /
    ``smooth_step`` directly since they carry array-valued parameters.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown graphon kind {kind!r}; expected one of {sorted(_KINDS)}")
    cls, names = _KINDS[kind]
    missing = [n for n in names if n not in params]
    extra = [n for n in params if n not in names]
    if missing:
        raise ValueError(f"graphon kind {kind!r} requires parameters {missing}")
    if extra:
        raise ValueError(f"graphon kind {kind!r} got unknown parameters {extra}")
    return cls(clamp_max=clamp_max, **params)


@dataclass(frozen=True, eq=False)
class DiscretizedGraphon:
    """Graphon values at the M class representatives (interval midpoints)."""

    weights: np.ndarray
    representatives: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        r = np.asarray(self.representatives, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] != r.shape[0]:
            raise ValueError("weights must be MxM matching the representatives")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and >= 0")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diff(r) <= 0) or np.any(r < 0) or np.any(r > 1):
            raise ValueError("representatives must be strictly increasing within [0,1]")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "representatives", r)

    @property
    def m(self):
        return self.weights.shape[0]


def discretize(w: Graphon, m: int) -> DiscretizedGraphon:
    """Evaluate ``w`` on the M x M grid of interval midpoints (i + 1/2) / M."""
    if m < 1:
        raise ValueError("m must be >= 1")
    reps = (np.arange(m) + 0.5) / m
    grid = w.eval(reps[:, None], reps[None, :])
    weights = np.atleast_2d(np.asarray(grid, dtype=float))
    return DiscretizedGraphon(weights=weights, representatives=reps)


def step_from_graph(g, normalize=False, clamp_max=DEFAULT_CLAMP) -> StepGraphon:
    """Adjacency step graphon of a finite graph on the N-equipartition.

    With ``normalize`` the 0/1 values are divided by the edge density
    2|E|/N^2, the sparse-regime normalization.
    """
    n = g.n
    values = np.zeros((n, n))
    if len(g.edges) > 0:
        e = np.asarray(g.edges)
        values[e[:, 0], e[:, 1]] = 1.0
        values[e[:, 1], e[:, 0]] = 1.0
    if normalize:
        density = 2.0 * len(g.edges) / n**2
        if density == 0.0:
            raise ValueError("cannot normalize the step graphon of a graph with no edges")
        values /= density
    return StepGraphon(values=values, breakpoints=np.arange(n + 1) / n, clamp_max=clamp_max)


def smooth_step(base: StepGraphon, xi: float, clamp_max=None) -> SmoothedStepGraphon:
    """Smoothed version of ``base`` with border strips of half-width ``xi``."""
    return SmoothedStepGraphon(
        base=base, border_width=xi, clamp_max=base.clamp_max if clamp_max is None else clamp_max
    )


def _cell_averages(kernel_eval, grid, subdiv=4):
    """Per-cell integrals of the kernel on a grid x grid equipartition.

    Each cell integral is approximated by the mean over a subdiv x subdiv
    midpoint lattice times the cell area; exact for kernels constant on cells.
    """
    fine = grid * subdiv
    pts = (np.arange(fine) + 0.5) / fine
    vals = np.asarray(kernel_eval(pts[:, None], pts[None, :]), dtype=float)
    blocks = vals.reshape(grid, subdiv, grid, subdiv).mean(axis=(1, 3))
    return blocks / grid**2


def _alternate_maximize(a, t0, max_rounds=200):
    """Alternating maximization of |s^T A t| over indicator vectors."""

    def best_side(scores):
        pos = scores[scores > 0].sum()
        neg = scores[scores < 0].sum()
        if pos >= -neg:
            return (scores > 0).astype(float), pos
        return (scores < 0).astype(float), neg

    t = t0
    best = -np.inf
    for _ in range(max_rounds):
        s, val_s = best_side(a @ t)
        t, val = best_side(s @ a)
        if abs(val) <= best + 1e-15:
            break
        best = abs(val)
    return best


def cut_norm_estimate(w, grid, restarts, seed, other=None, subdiv=4):
    """Seeded lower-bound estimate of the cut norm of ``w`` (or ``w - other``).

    Restricts the row/column sets to unions of grid cells and runs
    alternating local search from random indicator starts; the full-set
    candidate is always evaluated, so the estimate is at least the absolute
    total integral over the grid. Deterministic given the seed, and monotone
    nondecreasing in ``restarts`` for a fixed seed.
    """
    if grid < 1:
        raise ValueError("grid must be >= 1")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    kernel = DifferenceKernel(w, other) if other is not None else w
    a = _cell_averages(kernel.eval, grid, subdiv)

    best = abs(float(a.sum()))  # S = T = [0,1]
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        t0 = (rng.random(grid) < 0.5).astype(float)
        best = max(best, _alternate_maximize(a, t0))
    return float(best)
