"""Undirected graphs: edge-list IO, weights, geodesics, random generators.

Nodes are integer indices 0..n-1 internally. File IO maps string labels
to indices in first-appearance order and hands the label list back to the
caller, so round-trips preserve identity by label rather than by index.
"""

from __future__ import annotations

import csv
import io
import os
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStatisticError, InputError

__all__ = [
    "Network",
    "load_edge_list",
    "adjacency_weights",
    "inverse_geodesic_weights",
    "geodesic_distances",
    "degrees",
    "is_connected",
    "generate_random_network",
]


@dataclass(frozen=True)
class Network:
    """Simple undirected graph: node count plus a sorted tuple of (i, j) pairs, i < j."""

    n: int
    edges: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"need at least one node, got n={self.n!r}")
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise InputError(f"edge {e!r} is not a pair")
            i, j = e
            if not (isinstance(i, int) and isinstance(j, int)):
                raise InputError(f"edge {e!r} has non-integer endpoints")
            if i == j:
                raise InputError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InputError(f"edge {e!r} out of range for n={self.n}")
            if i > j:
                raise InputError(f"edge {e!r} not in (min, max) order")
            if e in seen:
                raise InputError(f"duplicate edge {e!r}")
            seen.add(e)

    @classmethod
    def from_edges(cls, n, edges):
        """Build a Network from any iterable of unordered pairs, deduplicating."""
        canon = {(min(i, j), max(i, j)) for i, j in edges}
        return cls(n=n, edges=tuple(sorted(canon)))

    def adjacency_lists(self):
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


def load_edge_list(source):
    """Read an undirected edge list from CSV with header ``src,dst``.

    Parameters
    ----------
    source : str, os.PathLike, or file-like
        Path to a CSV file, or an open text stream.

    Returns
    -------
    net : Network
        Nodes indexed by first appearance across the src/dst columns.
    labels : list of str
        labels[i] is the original string label of node i.

    Raises
    ------
    InputError
        On a missing/wrong header, malformed row, self-loop, or a file
        with no data rows. Messages carry the 1-based data row number.

    Duplicate edges (in either orientation) are collapsed silently.
    """
    if isinstance(source, (str, os.PathLike)):
        try:
            fh = open(source, "r", newline="")
        except OSError as exc:
            raise InputError(f"cannot open edge list {source!r}: {exc}") from exc
        with fh:
            return _parse_edge_rows(csv.reader(fh))
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return _parse_edge_rows(csv.reader(source))
    raise InputError(f"unsupported edge-list source {type(source).__name__}")


def _parse_edge_rows(rows):
    header = next(rows, None)
    if header is None:
        raise InputError("empty edge-list file")
    if [h.strip().lower() for h in header] != ["src", "dst"]:
        raise InputError(f"expected header 'src,dst', got {','.join(header)!r}")
    labels = []
    index = {}
    edges = set()
    nrows = 0
    for rownum, row in enumerate(rows, start=1):
        if not row:
            continue
        if len(row) != 2 or not row[0].strip() or not row[1].strip():
            raise InputError(f"malformed edge row {rownum}: {row!r}")
        nrows += 1
        ab = []
        for lab in (row[0].strip(), row[1].strip()):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
            ab.append(index[lab])
        a, b = ab
        if a == b:
            raise InputError(f"self-loop at row {rownum}: node {row[0].strip()!r}")
        edges.add((min(a, b), max(a, b)))
    if nrows == 0:
        raise InputError("edge-list file has a header but no data rows")
    net = Network(n=len(labels), edges=tuple(sorted(edges)))
    return net, labels


def adjacency_weights(net):
    """Symmetric 0/1 adjacency matrix of ``net`` as float ndarray.

    Raises DegenerateStatisticError if the graph has no edges at all
    (every downstream statistic would divide by a zero weight total).
    """
    if len(net.edges) == 0:
        raise DegenerateStatisticError("graph has no edges; all weights are zero")
    w = np.zeros((net.n, net.n))
    for i, j in net.edges:
        w[i, j] = 1.0
        w[j, i] = 1.0
    return w


def geodesic_distances(net):
    """All-pairs shortest-path lengths by BFS; unreachable pairs are np.inf."""
    n = net.n
    adj = net.adjacency_lists()
    dist = np.full((n, n), np.inf)
    for s in range(n):
        dist[s, s] = 0.0
        q = deque([s])
        while q:
            u = q.popleft()
            du = dist[s, u]
            for v in adj[u]:
                if not np.isfinite(dist[s, v]):
                    dist[s, v] = du + 1.0
                    q.append(v)
    return dist


def inverse_geodesic_weights(net, gamma=1.0):
    """Weights w_ij = 1 / d(i,j)**gamma for reachable i != j, else 0.

    gamma must be positive. The diagonal is zero by construction.
    """
    if not (np.isfinite(gamma) and gamma > 0):
        raise InputError(f"gamma must be a positive number, got {gamma!r}")
    d = geodesic_distances(net)
    with np.errstate(divide="ignore"):
        w = 1.0 / d**gamma
    w[~np.isfinite(w)] = 0.0
    np.fill_diagonal(w, 0.0)
    if not (w > 0).any():
        raise DegenerateStatisticError("graph has no edges; all weights are zero")
    return w


def degrees(net):
    """Node degrees as an int ndarray."""
    deg = np.zeros(net.n, dtype=int)
    for i, j in net.edges:
        deg[i] += 1
        deg[j] += 1
    return deg


def is_connected(net):
    """True if every node is reachable from node 0 (single component)."""
    if net.n == 1:
        return True
    adj = net.adjacency_lists()
    seen = np.zeros(net.n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return bool(seen.all())


_RETRY_CAP = 1000


def generate_random_network(n, model="erdos-renyi", *, p=None, k=4,
                            rewire_prob=0.05, seed=0, require_connected=True):
    """Generate a random undirected network.

    Parameters
    ----------
    n : int
        Number of nodes (>= 2).
    model : {"erdos-renyi", "small-world"}
        "erdos-renyi": each of the n(n-1)/2 pairs is an edge independently
        with probability p. p=None defaults to 5/(n-1), i.e. mean degree 5.
        "small-world": ring lattice where each node connects to its k nearest
        neighbours (k even), then each lattice edge is rewired with
        probability rewire_prob to a uniformly chosen new endpoint
        (up to 50 draws to avoid self-loops/duplicates, else kept).
    seed : int
        Master seed, non-negative.
    require_connected : bool
        If True, regenerate with sub-seed (seed, attempt) until connected,
        up to 1000 attempts, then raise InputError reporting the attempt count.

    Each attempt draws from ``default_rng(SeedSequence((seed, attempt)))``,
    so results are reproducible and independent of earlier failed attempts.
    """
    if not isinstance(n, int) or n < 2:
        raise InputError(f"need n >= 2 nodes, got {n!r}")
    _check_seed(seed)
    if model == "erdos-renyi":
        if p is None:
            p = 5.0 / (n - 1)
        if not (0.0 <= p <= 1.0):
            raise InputError(f"edge probability p must be in [0, 1], got {p!r}")
        make = lambda rng: _er_edges(n, p, rng)
    elif model == "small-world":
        if not isinstance(k, int) or k < 2 or k % 2 != 0 or k >= n:
            raise InputError(f"small-world k must be even with 2 <= k < n, got {k!r}")
        if not (0.0 <= rewire_prob <= 1.0):
            raise InputError(f"rewire_prob must be in [0, 1], got {rewire_prob!r}")
        make = lambda rng: _smallworld_edges(n, k, rewire_prob, rng)
    else:
        raise InputError(f"unknown model {model!r}; choose erdos-renyi or small-world")

    for attempt in range(_RETRY_CAP):
        rng = np.random.default_rng(np.random.SeedSequence((seed, attempt)))
        net = Network(n=n, edges=tuple(sorted(make(rng))))
        if not require_connected or is_connected(net):
            return net
    raise InputError(
        f"no connected {model} graph after {_RETRY_CAP} attempts "
        f"(n={n}, seed={seed}); parameters too sparse?"
    )


def _er_edges(n, p, rng):
    iu, ju = np.triu_indices(n, 1)
    mask = rng.random(iu.size) < p
    return zip(iu[mask].tolist(), ju[mask].tolist())


def _smallworld_edges(n, k, beta, rng):
    base = set()
    half = k // 2
    for i in range(n):
        for j in range(1, half + 1):
            base.add((min(i, (i + j) % n), max(i, (i + j) % n)))
    base = sorted(base)
    out = set(base)
    for (u, v) in base:
        if rng.random() < beta:
            w = int(rng.integers(n))
            tries = 0
            while (w == u or (min(u, w), max(u, w)) in out) and tries < 50:
                w = int(rng.integers(n))
                tries += 1
            if tries < 50:
                out.discard((u, v))
                out.add((min(u, w), max(u, w)))
    return out


def _check_seed(seed):
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise InputError(f"seed must be a non-negative integer, got {seed!r}")
