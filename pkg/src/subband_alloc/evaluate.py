"""SINR/SE metrics, paired Monte-Carlo evaluation, runtime benchmarks, and
the cross-scenario generalization matrix."""

import csv
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import Allocation, cgc_greedy, conflict_count, random_alloc, sisa
from .channel import PROFILES, NoiseModel, realize_gains
from .deploy import ScenarioConfig, generate_snapshot
from .graph import build_graph

TX_POWER_DBM = 0.0

ALLOCATOR_NAMES = ("ra", "cgc", "sisa", "ggnn")


@dataclass
class EvalConfig:
    n_snapshots: int = 10_000
    allocators: tuple = ALLOCATOR_NAMES
    graph_metric: str = "large_scale"

    def __post_init__(self):
        if self.n_snapshots < 1:
            raise ValueError("n_snapshots must be >= 1")


@dataclass
class SnapshotResult:
    allocator: str
    sinr: np.ndarray  # (N,) linear, per device (J=1)
    se: np.ndarray  # (N,) bits/s/Hz
    sum_se: float
    conflicts: int
    runtime_ms: float


@dataclass
class SnapshotContext:
    """Everything an allocator may consume for one snapshot."""
    snapshot: object
    gains: object
    graph: object
    n_subbands: int
    alloc_seed: int


def sinr(gains, alloc: Allocation, noise: NoiseModel, tx_power_dbm: float = TX_POWER_DBM):
    """Per-device uplink SINR (linear); interference only from subnetworks
    sharing the sub-band."""
    p_mw = 10.0 ** (tx_power_dbm / 10.0)
    power = gains.power_gain
    same = alloc.subband[:, None] == alloc.subband[None, :]
    np.fill_diagonal(same, False)
    interference = (power * same).sum(axis=1) * p_mw
    desired = np.diag(power) * p_mw
    return desired / (interference + noise.subband_noise_mw)


def spectral_efficiency(sinr_linear):
    return np.log2(1.0 + np.asarray(sinr_linear))


def make_allocators(names, model=None):
    """Map allocator names to callables of a SnapshotContext."""
    from .ggnn import predict  # deferred: ggnn imports baselines

    available = {
        "ra": lambda ctx: random_alloc(ctx.graph.n_nodes, ctx.n_subbands, ctx.alloc_seed),
        "cgc": lambda ctx: cgc_greedy(ctx.graph),
        "sisa": lambda ctx: sisa(ctx.gains, ctx.n_subbands, seed=ctx.alloc_seed),
        "ggnn": lambda ctx: predict(ctx.graph, model, seed=ctx.alloc_seed),
    }
    chosen = {}
    for name in names:
        if name not in available:
            raise ValueError(f"unknown allocator {name!r}; valid names: {sorted(available)}")
        if name == "ggnn" and model is None:
            raise ValueError("allocator 'ggnn' requires a trained model")
        chosen[name] = available[name]
    return chosen


def _snapshot_seeds(master_seed, index):
    state = np.random.SeedSequence([int(master_seed), int(index)]).generate_state(3)
    return int(state[0]), int(state[1]), int(state[2])


def snapshot_context(scenario: ScenarioConfig, profile, noise: NoiseModel,
                     n_subbands: int, master_seed: int, index: int,
                     graph_metric: str = "large_scale") -> SnapshotContext:
    """Build the paired inputs (deployment, gains, graph) for one snapshot.
    Every allocator evaluated on the same (master_seed, index) sees
    identical channel conditions."""
    deploy_seed, chan_seed, alloc_seed = _snapshot_seeds(master_seed, index)
    snapshot = generate_snapshot(scenario, deploy_seed)
    gains = realize_gains(snapshot, profile, noise, chan_seed,
                          area=(scenario.area_width_m, scenario.area_height_m))
    graph = build_graph(gains, n_subbands, metric=graph_metric)
    return SnapshotContext(snapshot=snapshot, gains=gains, graph=graph,
                           n_subbands=n_subbands, alloc_seed=alloc_seed)


def evaluate_scenario(scenario: ScenarioConfig, allocators: dict,
                      noise: NoiseModel = None, n_snapshots: int = 1000,
                      master_seed: int = 0, graph_metric: str = "large_scale",
                      indices=None):
    """Run every allocator on the same snapshots; returns per-allocator lists
    of SnapshotResult.  indices, if given, selects which snapshot indices of
    the (master_seed, index) pairing to evaluate (used for worker chunking)."""
    if noise is None:
        noise = NoiseModel()
    profile = PROFILES[scenario.channel_profile]
    results = {name: [] for name in allocators}
    for i in (range(n_snapshots) if indices is None else indices):
        ctx = snapshot_context(scenario, profile, noise, noise.n_subbands,
                               master_seed, i, graph_metric)
        for name, fn in allocators.items():
            t0 = time.perf_counter()
            alloc = fn(ctx)
            elapsed_ms = (time.perf_counter() - t0) * 1e3
            gamma = sinr(ctx.gains, alloc, noise)
            se = spectral_efficiency(gamma)
            results[name].append(SnapshotResult(
                allocator=name, sinr=gamma, se=se, sum_se=float(se.sum()),
                conflicts=conflict_count(ctx.graph, alloc), runtime_ms=elapsed_ms))
    return results


def empirical_cdf(values):
    """Sorted values and cumulative probabilities (reaches exactly 1)."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    p = np.arange(1, v.size + 1) / v.size
    return v, p


def summarize(results):
    """Median/mean of sum SE and per-device SE per allocator."""
    rows = []
    for name, snaps in results.items():
        sum_se = np.array([s.sum_se for s in snaps])
        per_dev = np.concatenate([s.se for s in snaps])
        rows.append({
            "allocator": name,
            "median_sum_se": float(np.median(sum_se)),
            "mean_sum_se": float(np.mean(sum_se)),
            "median_device_se": float(np.median(per_dev)),
            "mean_device_se": float(np.mean(per_dev)),
            "mean_conflicts": float(np.mean([s.conflicts for s in snaps])),
        })
    return rows


def write_result_csvs(results, out_dir):
    """Plot-ready CSV artifacts: per-metric CDFs and a summary table."""
    os.makedirs(out_dir, exist_ok=True)
    for name, snaps in results.items():
        for metric, values in (
            ("sum_se", [s.sum_se for s in snaps]),
            ("device_se", np.concatenate([s.se for s in snaps])),
        ):
            v, p = empirical_cdf(values)
            with open(os.path.join(out_dir, f"cdf_{metric}_{name}.csv"), "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(["value", "cumulative_probability"])
                for vi, pi in zip(v, p):
                    writer.writerow([repr(float(vi)), repr(float(pi))])
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as f:
        rows = summarize(results)
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def scaled_scenario(base: ScenarioConfig, n_subnetworks: int) -> ScenarioConfig:
    """Scale the area with N to keep the deployment density constant (the
    base aspect ratio is preserved); used by the runtime sweep."""
    factor = np.sqrt(n_subnetworks / base.n_subnetworks)
    return replace(base,
                   n_subnetworks=n_subnetworks,
                   area_width_m=base.area_width_m * factor,
                   area_height_m=base.area_height_m * factor)


def runtime_sweep(allocators: dict, base_scenario: ScenarioConfig = None,
                  n_list=tuple(range(50, 201, 10)), reps: int = 20,
                  warmup: int = 3, noise: NoiseModel = None, master_seed: int = 0):
    """Mean single-snapshot allocation runtime per N.

    Only the allocation call is timed: graph construction is excluded for
    graph-based methods and gain collection for SISA (the measured boundary
    is the algorithm itself).  Returns rows of
    (n, allocator, mean_ms, std_ms) plus per-allocator growth ratios.
    """
    if noise is None:
        noise = NoiseModel()
    if base_scenario is None:
        base_scenario = ScenarioConfig()
    profile = PROFILES[base_scenario.channel_profile]
    rows = []
    for n in n_list:
        scenario = scaled_scenario(base_scenario, n)
        contexts = [snapshot_context(scenario, profile, noise, noise.n_subbands,
                                     master_seed, i) for i in range(reps)]
        for name, fn in allocators.items():
            for ctx in contexts[:min(warmup, reps)]:
                fn(ctx)
            times = []
            for ctx in contexts:
                t0 = time.perf_counter()
                fn(ctx)
                times.append((time.perf_counter() - t0) * 1e3)
            rows.append({"n": n, "allocator": name,
                         "mean_ms": float(np.mean(times)),
                         "std_ms": float(np.std(times))})
    return rows


def runtime_growth_ratios(rows):
    """runtime(max N) / runtime(min N) per allocator."""
    ratios = {}
    ns = sorted({r["n"] for r in rows})
    for name in {r["allocator"] for r in rows}:
        lo = next(r["mean_ms"] for r in rows if r["allocator"] == name and r["n"] == ns[0])
        hi = next(r["mean_ms"] for r in rows if r["allocator"] == name and r["n"] == ns[-1])
        ratios[name] = hi / lo
    return ratios


def write_runtime_csv(rows, path):
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["n", "allocator", "mean_ms", "std_ms"])
        writer.writeheader()
        writer.writerows(rows)


def generalization_matrix(models: dict, scenarios: dict, noise: NoiseModel = None,
                          n_snapshots: int = 1000, master_seed: int = 0):
    """Mean per-device SE for every (train scenario, test scenario) pair.

    models: {train scenario name: GgnnModel}; scenarios: {name: ScenarioConfig}.
    Snapshots are shared across models within a test scenario.
    """
    from .ggnn import predict

    if noise is None:
        noise = NoiseModel()
    table = {}
    for test_name, scenario in scenarios.items():
        profile = PROFILES[scenario.channel_profile]
        se_sums = {train_name: 0.0 for train_name in models}
        count = 0
        for i in range(n_snapshots):
            ctx = snapshot_context(scenario, profile, noise, noise.n_subbands,
                                   master_seed, i)
            count += ctx.graph.n_nodes
            for train_name, model in models.items():
                alloc = predict(ctx.graph, model, seed=ctx.alloc_seed)
                se_sums[train_name] += float(spectral_efficiency(
                    sinr(ctx.gains, alloc, noise)).sum())
        for train_name in models:
            table[(train_name, test_name)] = se_sums[train_name] / count
    return table


def write_generalization_csv(table, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["train", "test", "mean_se"])
        for (train_name, test_name), value in sorted(table.items()):
            writer.writerow([train_name, test_name, repr(float(value))])
