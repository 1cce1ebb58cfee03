"""Sparse random graphs sampled from a graphon, plus summary statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from collections import Counter
import numpy as np

from .graphon import Graphon

PLACEMENTS = ("iid_uniform", "equispaced")


@dataclass(frozen=True, eq=False)
class GraphSample:
    """A finite graph with graphon coordinates and its sparsity normalizer."""

    n: int
    positions: np.ndarray
    edges: np.ndarray  # (E, 2) int array, each row i < j, lexicographically sorted
    rho: float
    _adjacency: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n < 1:
            raise ValueError("graph must have at least one vertex")
        if pos.shape != (self.n,) or np.any(pos < 0) or np.any(pos > 1):
            raise ValueError("positions must be N values in [0,1]")
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if e.size:
            if np.any(e[:, 0] >= e[:, 1]) or np.any(e < 0) or np.any(e >= self.n):
                raise ValueError("edges must be pairs i < j of valid vertices")
            if len(np.unique(e[:, 0] * self.n + e[:, 1])) != len(e):
                raise ValueError("duplicate edge")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "_adjacency", {})

    @property
    def num_edges(self):
        return len(self.edges)

    def neighbor_lists(self):
        """Per-vertex neighbor index arrays, built once on demand."""
        if "lists" not in self._adjacency:
            lists = [[] for _ in range(self.n)]
            for i, j in self.edges:
                lists[i].append(j)
                lists[j].append(i)
            self._adjacency["lists"] = [np.asarray(l, dtype=np.int64) for l in lists]
        return self._adjacency["lists"]

    def adjacency_matrix(self):
        if "matrix" not in self._adjacency:
            a = np.zeros((self.n, self.n))
            if len(self.edges):
                a[self.edges[:, 0], self.edges[:, 1]] = 1.0
                a[self.edges[:, 1], self.edges[:, 0]] = 1.0
            self._adjacency["matrix"] = a
        return self._adjacency["matrix"]

    def degrees(self):
        d = np.zeros(self.n, dtype=np.int64)
        if len(self.edges):
            d += np.bincount(self.edges[:, 0], minlength=self.n)
            d += np.bincount(self.edges[:, 1], minlength=self.n)
        return d


def sample_graph(w: Graphon, n: int, beta: float, placement="iid_uniform", seed=0,
                 rho_override=None) -> GraphSample:
    """Sample G(N, W, rho) with rho = n^(-beta).

    Each pair {i, j} with i < j is included independently with probability
    min(rho * W(x_i, x_j), 1). ``placement`` chooses i.i.d. uniform positions
    or the fixed grid i/n, i = 1..n. ``rho_override`` bypasses the n^(-beta)
    rule for dense sanity checks. Deterministic given the seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if placement not in PLACEMENTS:
        raise ValueError(f"placement must be one of {PLACEMENTS}")
    if rho_override is None and not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0,1)")
    rho = float(n) ** (-beta) if rho_override is None else float(rho_override)
    if rho <= 0:
        raise ValueError("rho must be > 0")

    rng = np.random.default_rng(seed)
    if placement == "iid_uniform":
        positions = rng.random(n)
    else:
        positions = np.arange(1, n + 1) / n

    iu, ju = np.triu_indices(n, k=1)
    probs = np.minimum(rho * np.asarray(w.eval(positions[iu], positions[ju])), 1.0)
    keep = rng.random(len(iu)) < probs
    edges = np.column_stack([iu[keep], ju[keep]])
    return GraphSample(n=n, positions=positions, edges=edges, rho=rho)


def degree_histogram(g: GraphSample):
    """Map from degree to vertex count; counts sum to n."""
    return dict(sorted(Counter(g.degrees().tolist()).items()))


def edge_density(g: GraphSample) -> float:
    """The graph's edge density 2|E|/n^2 (the quantity rho normalizes)."""
    return 2.0 * g.num_edges / g.n**2


def write_edge_list(g: GraphSample, path):
    """Plain-text export: header comments with n/rho and positions, then one
    ``u v`` line per edge (0-indexed)."""
    with open(path, "w") as fh:
        fh.write(f"# n={g.n} rho={float(g.rho)!r}\n")
        for i, x in enumerate(g.positions):
            fh.write(f"# pos {i} {float(x)!r}\n")
        for i, j in g.edges:
            fh.write(f"{i} {j}\n")


def read_edge_list(path) -> GraphSample:
    """Inverse of :func:`write_edge_list`."""
    n = None
    rho = None
    positions = {}
    edges = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("n="):
                    head = dict(part.split("=", 1) for part in body.split())
                    n = int(head["n"])
                    rho = float(head["rho"])
                elif body.startswith("pos"):
                    _, i, x = body.split()
                    positions[int(i)] = float(x)
            else:
                i, j = line.split()
                edges.append((int(i), int(j)))
    if n is None:
        raise ValueError("missing '# n=... rho=...' header")
    pos = np.array([positions[i] for i in range(n)])
    return GraphSample(n=n, positions=pos, edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2), rho=rho)
