"""Newman-Watts graphs with i.i.d. Exp(1) edge weights.

A cycle on ``n`` vertices (0-indexed) plus shortcut edges: every unordered pair
``(i, j)`` that is not a cycle edge is present independently with probability
``rho / n``.  Shortcuts are sampled by geometric skipping over a linear index
of the candidate pairs, so generation costs O(rho * n) rather than O(n^2).
"""
import csv
import json
from dataclasses import dataclass

import numpy as np

from .rng import exp1, stream

CYCLE = 0
SHORTCUT = 1
KIND_NAMES = ("cycle", "shortcut")


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class GraphConfig:
    n: int
    rho: float
    seed: int = 0

    def validate(self):
        if int(self.n) != self.n or self.n < 3:
            raise InvalidConfig(f"n must be an integer >= 3, got {self.n!r}")
        if not self.rho >= 0:
            raise InvalidConfig(f"rho must be >= 0, got {self.rho!r}")


def n_candidates(n):
    """Number of unordered non-adjacent pairs, n(n-3)/2."""
    return n * (n - 3) // 2


def _row_offsets(n):
    # row 0 holds j = 2..n-2, row i >= 1 holds j = i+2..n-1
    rows = np.arange(n - 2, dtype=np.int64)
    lengths = np.where(rows == 0, n - 3, n - 2 - rows)
    offsets = np.zeros(n - 2, dtype=np.int64)
    np.cumsum(lengths[:-1], out=offsets[1:])
    return offsets


def pair_from_index(n, k):
    """Map linear indices ``k`` to candidate pairs ``(i, j)`` with i < j.

    Pairs are ordered lexicographically.  Works on scalars and arrays.
    """
    k_arr = np.asarray(k, dtype=np.int64)
    total = n_candidates(n)
    if k_arr.size and (k_arr.min() < 0 or k_arr.max() >= total):
        raise IndexError(f"pair index out of range [0, {total}) for n={n}")
    offsets = _row_offsets(n)
    i = np.searchsorted(offsets, k_arr, side="right") - 1
    j = k_arr - offsets[i] + i + 2
    if np.ndim(k) == 0:
        return int(i), int(j)
    return i, j


def index_from_pair(n, i, j):
    """Inverse of :func:`pair_from_index`; accepts the pair in either order."""
    i_arr = np.asarray(i, dtype=np.int64)
    j_arr = np.asarray(j, dtype=np.int64)
    lo, hi = np.minimum(i_arr, j_arr), np.maximum(i_arr, j_arr)
    gap = hi - lo
    bad = (lo < 0) | (hi >= n) | (gap <= 1) | (gap == n - 1)
    if np.any(bad):
        raise IndexError(f"not a shortcut candidate pair for n={n}")
    offsets = _row_offsets(n)
    k = offsets[lo] + hi - lo - 2
    if np.ndim(i) == 0 and np.ndim(j) == 0:
        return int(k)
    return k


def _geometric_skip(total, p, rng):
    """Sorted positions in [0, total) kept independently with probability p."""
    if total == 0 or p <= 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    chunks = []
    pos = -1
    batch = max(16, int(total * p * 1.1 + 10 * np.sqrt(total * p) + 16))
    while True:
        # tiny p gives astronomically large gaps; clip so the cumsum cannot overflow
        gaps = np.clip(rng.geometric(p, size=batch), 1, total + 1).astype(np.int64)
        picks = pos + np.cumsum(gaps)
        inside = picks[picks < total]
        chunks.append(inside)
        if inside.size < picks.size:
            break
        pos = int(picks[-1])
    return np.concatenate(chunks)


class WeightedGraph:
    """Immutable weighted multigraph-free edge list with CSR adjacency.

    Edge ``e`` joins ``u[e]`` and ``v[e]``, has ``kind[e]`` in
    {CYCLE, SHORTCUT} and weight ``weight[e]``.  Cycle edges come first:
    edge ``i < n`` is ``(i, i+1 mod n)``.
    """

    def __init__(self, n, u, v, kind, weight, config=None):
        self.n = int(n)
        self.u = np.asarray(u, dtype=np.int64)
        self.v = np.asarray(v, dtype=np.int64)
        self.kind = np.asarray(kind, dtype=np.int8)
        self.weight = np.asarray(weight, dtype=np.float64)
        self.config = config
        if not (self.u.shape == self.v.shape == self.kind.shape == self.weight.shape):
            raise ValueError("edge arrays must have equal length")
        if self.weight.size and self.weight.min() <= 0:
            raise ValueError("edge weights must be strictly positive")
        self._build_adjacency()
        for arr in (self.u, self.v, self.kind, self.weight, self.indptr, self.adj_vertex, self.adj_edge):
            arr.flags.writeable = False
        self._lists = None

    def _build_adjacency(self):
        m = self.u.size
        ends = np.concatenate([self.u, self.v])
        other = np.concatenate([self.v, self.u])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((other, ends))
        self.adj_vertex = other[order]
        self.adj_edge = eid[order]
        counts = np.bincount(ends, minlength=self.n)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])

    @property
    def n_edges(self):
        return int(self.u.size)

    @property
    def n_shortcuts(self):
        return int(np.count_nonzero(self.kind == SHORTCUT))

    def degree(self):
        return np.diff(self.indptr)

    def neighbors(self, x):
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return self.adj_vertex[lo:hi]

    def edge_list(self):
        return [
            (int(a), int(b), KIND_NAMES[k], float(w))
            for a, b, k, w in zip(self.u, self.v, self.kind, self.weight)
        ]

    def adjacency_lists(self):
        """Flat Python lists ``(indptr, nbr, weight, kind)`` for tight loops."""
        if self._lists is None:
            self._lists = (
                self.indptr.tolist(),
                self.adj_vertex.tolist(),
                self.weight[self.adj_edge].tolist(),
                self.kind[self.adj_edge].tolist(),
            )
        return self._lists

    def with_weights(self, weights):
        """Same edges with explicit weights (deterministic tests)."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != self.weight.shape:
            raise ValueError(f"expected {self.n_edges} weights, got {weights.size}")
        return WeightedGraph(self.n, self.u, self.v, self.kind, weights, self.config)

    def to_scipy(self):
        """Symmetric sparse weight matrix (used by tests as an oracle)."""
        from scipy.sparse import csr_matrix

        w = self.weight[self.adj_edge]
        return csr_matrix((w, self.adj_vertex, self.indptr), shape=(self.n, self.n))

    def dump(self, csv_path, json_path=None):
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["u", "v", "kind", "weight"])
            for a, b, k, w in zip(self.u, self.v, self.kind, self.weight):
                writer.writerow([int(a), int(b), KIND_NAMES[k], f"{w:.17g}"])
        if json_path is not None:
            meta = {"n": self.n}
            if self.config is not None:
                meta.update(rho=self.config.rho, seed=self.config.seed)
            with open(json_path, "w") as fh:
                json.dump(meta, fh)
                fh.write("\n")


def load(csv_path, n=None):
    """Read a graph written by :meth:`WeightedGraph.dump`."""
    us, vs, kinds, ws = [], [], [], []
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            us.append(int(row["u"]))
            vs.append(int(row["v"]))
            kinds.append(KIND_NAMES.index(row["kind"]))
            ws.append(float(row["weight"]))
    if n is None:
        n = sum(1 for k in kinds if k == CYCLE)
    return WeightedGraph(n, us, vs, kinds, ws)


def cycle_graph(n, weights=None):
    """The bare cycle (rho = 0), optionally with given weights."""
    i = np.arange(n)
    if weights is None:
        weights = np.ones(n)
    return WeightedGraph(n, i, (i + 1) % n, np.zeros(n, dtype=np.int8), weights)


def generate(config):
    """Sample NW_n(rho) with Exp(1) weights; identical config gives an identical graph."""
    config.validate()
    n = int(config.n)
    total = n_candidates(n)
    picks = _geometric_skip(total, min(1.0, config.rho / n), stream(config.seed, "nwgraph.shortcuts"))
    si, sj = pair_from_index(n, picks) if picks.size else (np.empty(0, np.int64), np.empty(0, np.int64))
    ci = np.arange(n, dtype=np.int64)
    u = np.concatenate([ci, si])
    v = np.concatenate([(ci + 1) % n, sj])
    kind = np.concatenate([np.full(n, CYCLE, np.int8), np.full(si.size, SHORTCUT, np.int8)])
    weight = exp1(stream(config.seed, "nwgraph.weights"), u.size)
    # -log(1-U) is 0 only for U == 0 exactly; nudge to keep weights positive
    weight = np.where(weight > 0, weight, np.finfo(float).tiny)
    return WeightedGraph(n, u, v, kind, weight, config)
