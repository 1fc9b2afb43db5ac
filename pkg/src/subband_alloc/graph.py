"""Subnetwork interference graph: each node selects its K-1 strongest
interferers, and the directed selections are symmetrized by union."""

import csv
import os
from dataclasses import dataclass

import numpy as np

from .channel import LinkGains


@dataclass
class InterferenceGraph:
    n_nodes: int
    n_subbands: int
    adjacency: np.ndarray  # (N, N) bool, symmetric, no self-loops
    directed_origin: np.ndarray  # (N, N) bool, pre-symmetrization selections

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self):
        """Undirected edge list, each edge once as (n, m) with n < m."""
        rows, cols = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(rows.tolist(), cols.tolist()))

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum()) // 2


def build_graph(gains, n_subbands: int, metric: str = "large_scale") -> InterferenceGraph:
    """Connect each subnetwork to its K-1 strongest interferers.

    gains may be a LinkGains or a raw (N, N) interference-strength matrix
    whose entry (n, m) is the strength of subnetwork m's interference into
    AP n.  The default metric uses large-scale power only (no fast fading);
    "instantaneous" uses the full power gain.  Ties break to the lower
    node index.  K-1 > N-1 degenerates to the complete graph.
    """
    if isinstance(gains, LinkGains):
        if metric == "large_scale":
            strength = gains.large_scale_power
        elif metric == "instantaneous":
            strength = gains.power_gain
        else:
            raise ValueError(f"unknown metric {metric!r}")
    else:
        strength = np.asarray(gains, dtype=np.float64)
    n = strength.shape[0]
    if n < 1 or n_subbands < 2:
        raise ValueError("need N >= 1 and K >= 2")

    n_pick = min(n_subbands - 1, n - 1)
    directed = np.zeros((n, n), dtype=bool)
    for i in range(n):
        candidates = np.delete(np.arange(n), i)
        # stable sort on negated strength keeps lower index first among ties
        order = candidates[np.argsort(-strength[i, candidates], kind="stable")]
        directed[i, order[:n_pick]] = True
    adjacency = directed | directed.T
    return InterferenceGraph(n_nodes=n, n_subbands=n_subbands,
                             adjacency=adjacency, directed_origin=directed)


def signalling_count(n_subnetworks: int, n_subbands: int, scheme: str) -> int:
    """Messages to the central allocator: N(K-1) for the graph-based scheme,
    N^2 for full-channel-knowledge iterative allocation."""
    if n_subnetworks < 1:
        raise ValueError("need N >= 1")
    if scheme == "ggnn":
        return n_subnetworks * (n_subbands - 1)
    if scheme == "sisa":
        return n_subnetworks ** 2
    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# dataset persistence: one file per graph plus a manifest

_GRAPH_MAGIC = "# interference graph v1"


def graph_to_text(graph: InterferenceGraph, seed=None, profile=None) -> str:
    lines = [
        _GRAPH_MAGIC,
        f"N={graph.n_nodes}",
        f"K={graph.n_subbands}",
        f"seed={'' if seed is None else seed}",
        f"profile={'' if profile is None else profile}",
    ]
    lines.extend(f"{n} {m}" for n, m in graph.edges())
    return "\n".join(lines) + "\n"


def save_graph(graph: InterferenceGraph, path, seed=None, profile=None) -> None:
    with open(path, "w") as f:
        f.write(graph_to_text(graph, seed=seed, profile=profile))


def load_graph(path) -> InterferenceGraph:
    with open(path) as f:
        magic = f.readline().strip()
        if magic != _GRAPH_MAGIC:
            raise ValueError(f"{path}: not an interference graph file")
        n = int(f.readline().split("=", 1)[1])
        k = int(f.readline().split("=", 1)[1])
        f.readline()  # seed
        f.readline()  # profile
        adjacency = np.zeros((n, n), dtype=bool)
        for line in f:
            a, b = map(int, line.split())
            adjacency[a, b] = adjacency[b, a] = True
    # directed selections are not stored; reloaded graphs carry the
    # symmetric adjacency as their origin
    return InterferenceGraph(n_nodes=n, n_subbands=k,
                             adjacency=adjacency, directed_origin=adjacency.copy())


def write_manifest(directory, entries) -> str:
    """entries: iterable of dicts with keys file, n_nodes, n_subbands, seed, profile."""
    path = os.path.join(directory, "manifest.csv")
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["file", "n_nodes", "n_subbands", "seed", "profile"])
        writer.writeheader()
        for entry in entries:
            writer.writerow(entry)
    return path


def read_manifest(directory):
    path = os.path.join(directory, "manifest.csv")
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def load_dataset(directory):
    """Load every graph listed in the directory's manifest."""
    return [load_graph(os.path.join(directory, entry["file"])) for entry in read_manifest(directory)]
