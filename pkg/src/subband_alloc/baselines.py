"""Reference sub-band allocators: random, greedy graph coloring, and
sequential iterative allocation by coordinate descent on the sum
interference-to-signal ratio."""

import csv
from dataclasses import dataclass

import numpy as np


@dataclass
class Allocation:
    """One sub-band index per subnetwork."""

    subband: np.ndarray  # (N,) int in [0, K)
    n_subbands: int

    def __post_init__(self):
        self.subband = np.asarray(self.subband, dtype=int)
        if self.subband.ndim != 1:
            raise ValueError("subband must be a flat index vector")
        if self.n_subbands < 1:
            raise ValueError("need K >= 1")
        if np.any(self.subband < 0) or np.any(self.subband >= self.n_subbands):
            raise ValueError("sub-band index out of range")

    @property
    def n_subnetworks(self) -> int:
        return self.subband.shape[0]

    def one_hot(self) -> np.ndarray:
        """(N, K) hard assignment matrix, rows one-hot."""
        theta = np.zeros((self.n_subnetworks, self.n_subbands))
        theta[np.arange(self.n_subnetworks), self.subband] = 1.0
        return theta

    def selection_matrix(self) -> np.ndarray:
        """(K, N) one-hot selection matrix (columns are subnetworks)."""
        return self.one_hot().T


def conflict_count(graph, alloc: Allocation) -> int:
    """Number of undirected edges whose endpoints share a sub-band."""
    same = alloc.subband[:, None] == alloc.subband[None, :]
    return int(np.sum(graph.adjacency & same)) // 2


def random_alloc(n_subnetworks: int, n_subbands: int, seed) -> Allocation:
    """I.i.d. uniform sub-band choice per subnetwork."""
    if n_subbands < 1:
        raise ValueError("need K >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Allocation(subband=rng.integers(0, n_subbands, n_subnetworks),
                      n_subbands=n_subbands)


def cgc_greedy(graph) -> Allocation:
    """Greedy coloring with DSATUR vertex selection.

    The next node is the uncolored one with the most distinct sub-bands
    among its colored neighbors (saturation), ties by higher degree then
    lower index; it takes the lowest sub-band unused by colored neighbors.
    DSATUR 2-colors bipartite graphs exactly, which plain largest-first
    ordering does not guarantee.  When all K sub-bands are taken the node
    falls back to the sub-band conflicting with the fewest colored
    neighbors, so the allocation is always total.
    """
    n = graph.n_nodes
    k = graph.n_subbands
    degrees = graph.degrees
    subband = np.full(n, -1, dtype=int)
    # used[v, c]: colored neighbors of v on sub-band c; saturation is the
    # count of nonzero entries in row v
    used = np.zeros((n, k), dtype=int)
    uncolored = set(range(n))
    for _ in range(n):
        v = min(uncolored,
                key=lambda u: (-int(np.count_nonzero(used[u])), -degrees[u], u))
        uncolored.remove(v)
        free = np.nonzero(used[v] == 0)[0]
        c = int(free[0]) if free.size else int(np.argmin(used[v]))
        subband[v] = c
        used[graph.adjacency[v], c] += 1
    return Allocation(subband=subband, n_subbands=k)


def sisa_objective(power_gain: np.ndarray, subband: np.ndarray) -> float:
    """Sum over subnetworks of (co-channel interference power) / (desired power)."""
    same = subband[:, None] == subband[None, :]
    np.fill_diagonal(same, False)
    interference = (power_gain * same).sum(axis=1)
    return float(np.sum(interference / np.diag(power_gain)))


def sisa(gains, n_subbands: int, max_iters: int = 100, seed: int = 0,
         return_history: bool = False):
    """Sequential iterative sub-band allocation.

    Coordinate descent on the sum interference-to-signal objective using the
    full instantaneous power-gain matrix: starting from a random allocation,
    sweep subnetworks in fixed order, each taking the sub-band that minimizes
    the objective given the others; stop when a full sweep changes nothing or
    after max_iters sweeps.  The objective is non-increasing per update.
    """
    power = gains if isinstance(gains, np.ndarray) else gains.power_gain
    n = power.shape[0]
    alloc = random_alloc(n, n_subbands, seed)
    subband = alloc.subband.copy()
    desired = np.diag(power)
    # weight[n, m]: change in the objective if n and m share a sub-band
    weight = power / desired[:, None] + power.T / desired[None, :]
    np.fill_diagonal(weight, 0.0)

    history = [sisa_objective(power, subband)]
    for _ in range(max_iters):
        changed = False
        for v in range(n):
            cost = np.zeros(n_subbands)
            np.add.at(cost, np.delete(subband, v), np.delete(weight[v], v))
            best = int(np.argmin(cost))
            if cost[best] < cost[subband[v]]:
                subband[v] = best
                changed = True
            if return_history:
                history.append(sisa_objective(power, subband))
        if not changed:
            break
    alloc = Allocation(subband=subband, n_subbands=n_subbands)
    return (alloc, history) if return_history else alloc


def export_allocation_csv(alloc: Allocation, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["subnetwork", "subband"])
        for n, k in enumerate(alloc.subband):
            writer.writerow([n, int(k)])
