import itertools

import numpy as np
import pytest

from subband_alloc.baselines import (Allocation, cgc_greedy, conflict_count,
                                     export_allocation_csv, random_alloc,
                                     sisa, sisa_objective)
from subband_alloc.graph import InterferenceGraph, build_graph


def graph_from_edges(n, edges, k):
    adj = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        adj[a, b] = adj[b, a] = True
    return InterferenceGraph(n_nodes=n, n_subbands=k, adjacency=adj,
                             directed_origin=adj.copy())


def complete_graph(n, k):
    return graph_from_edges(n, itertools.combinations(range(n), 2), k)


def test_allocation_validation_and_one_hot():
    alloc = Allocation(subband=[0, 2, 1], n_subbands=3)
    theta = alloc.one_hot()
    assert theta.shape == (3, 3)
    assert np.all(theta.sum(axis=1) == 1)
    assert np.array_equal(alloc.selection_matrix(), theta.T)
    with pytest.raises(ValueError):
        Allocation(subband=[0, 3], n_subbands=3)
    with pytest.raises(ValueError):
        Allocation(subband=[[0, 1]], n_subbands=2)


def test_conflict_count_triangle():
    tri = complete_graph(3, 3)
    assert conflict_count(tri, Allocation([0, 0, 0], 3)) == 3
    assert conflict_count(tri, Allocation([0, 1, 2], 3)) == 0
    assert conflict_count(tri, Allocation([0, 0, 1], 3)) == 1


def test_random_alloc_k1_all_zeros():
    alloc = random_alloc(20, 1, seed=0)
    assert np.array_equal(alloc.subband, np.zeros(20, dtype=int))


def test_random_alloc_deterministic_and_uniform():
    a = random_alloc(1000, 5, seed=3)
    b = random_alloc(1000, 5, seed=3)
    assert np.array_equal(a.subband, b.subband)
    draws = np.concatenate([random_alloc(10_000, 5, seed).subband
                            for seed in range(100)])
    freq = np.bincount(draws, minlength=5) / draws.size
    assert np.allclose(freq, 0.2, atol=0.01)


def test_random_alloc_edge_conflict_probability():
    # for an edge between independent uniform choices, P(same) = 1/K
    rng = np.random.default_rng(7)
    a = rng.integers(0, 5, 100_000)
    b = rng.integers(0, 5, 100_000)
    assert np.mean(a == b) == pytest.approx(0.2, abs=0.01)


def test_cgc_triangle_and_star():
    tri = complete_graph(3, 3)
    alloc = cgc_greedy(tri)
    assert len(set(alloc.subband.tolist())) == 3
    assert conflict_count(tri, alloc) == 0

    star = graph_from_edges(5, [(0, i) for i in range(1, 5)], 2)
    alloc = cgc_greedy(star)
    assert conflict_count(star, alloc) == 0
    assert np.all(alloc.subband[1:] != alloc.subband[0])


def test_cgc_k6_with_5_subbands_one_conflict():
    k6 = complete_graph(6, 5)
    alloc = cgc_greedy(k6)
    # pigeonhole: 6 nodes, 5 sub-bands, one pair must collide
    assert conflict_count(k6, alloc) == 1


def test_cgc_always_total_even_when_colors_exhausted():
    k9 = complete_graph(9, 3)
    alloc = cgc_greedy(k9)
    assert alloc.subband.shape == (9,)
    assert np.all((alloc.subband >= 0) & (alloc.subband < 3))
    # best possible on K9 with 3 classes: three triangles -> 9 conflicts
    assert conflict_count(k9, alloc) == 9


def test_cgc_beats_random_on_average():
    rng = np.random.default_rng(11)
    cgc_total = rand_total = 0
    for i in range(1000):
        n = int(rng.integers(5, 20))
        strength = rng.random((n, n))
        g = build_graph(strength, n_subbands=4)
        cgc_total += conflict_count(g, cgc_greedy(g))
        rand_total += conflict_count(g, random_alloc(n, 4, seed=int(rng.integers(2**31))))
    assert cgc_total < rand_total


def brute_force_min_objective(power, k):
    n = power.shape[0]
    best = np.inf
    for combo in itertools.product(range(k), repeat=n):
        best = min(best, sisa_objective(power, np.array(combo)))
    return best


def test_sisa_two_subnetworks_orthogonal():
    rng = np.random.default_rng(5)
    power = rng.random((2, 2)) + 0.1
    alloc = sisa(power, n_subbands=3, seed=1)
    assert alloc.subband[0] != alloc.subband[1]
    assert sisa_objective(power, alloc.subband) == 0.0


def test_sisa_monotone_and_fixed_point():
    rng = np.random.default_rng(17)
    for trial in range(20):
        n = int(rng.integers(4, 12))
        power = rng.random((n, n)) * 1e-6
        np.fill_diagonal(power, rng.random(n) + 0.5)
        alloc, history = sisa(power, n_subbands=3, seed=trial, return_history=True)
        assert np.all(np.diff(history) <= 1e-12)
        # fixed point: no single-node move improves the objective
        base = sisa_objective(power, alloc.subband)
        for v in range(n):
            for c in range(3):
                cand = alloc.subband.copy()
                cand[v] = c
                assert sisa_objective(power, cand) >= base - 1e-12


def test_sisa_near_exhaustive_optimum_small_instances():
    # single-start coordinate descent hits local optima; on small realistic
    # instances (N <= 6) the terminal objective is within 5% of the
    # exhaustive minimum in >= 80% of cases
    from subband_alloc.channel import INF_DL, NoiseModel, realize_gains
    from subband_alloc.deploy import ScenarioConfig, generate_snapshot

    rng = np.random.default_rng(23)
    hits = 0
    trials = 60
    for trial in range(trials):
        n = int(rng.integers(2, 7))
        cfg = ScenarioConfig(n_subnetworks=n, area_width_m=15.0, area_height_m=10.0)
        snap = generate_snapshot(cfg, seed=trial)
        gains = realize_gains(snap, INF_DL, NoiseModel(), seed=5000 + trial,
                              area=(15, 10))
        alloc = sisa(gains.power_gain, n_subbands=2, seed=trial)
        j = sisa_objective(gains.power_gain, alloc.subband)
        j_star = brute_force_min_objective(gains.power_gain, 2)
        assert j >= j_star - 1e-12
        if j <= 1.05 * j_star + 1e-15:
            hits += 1
    assert hits >= int(0.8 * trials)


def test_sisa_improves_on_random_start():
    rng = np.random.default_rng(31)
    power = rng.random((10, 10)) * 0.01
    np.fill_diagonal(power, 1.0)
    alloc, history = sisa(power, n_subbands=2, seed=4, return_history=True)
    assert history[-1] <= history[0]


def test_sisa_deterministic_per_seed():
    rng = np.random.default_rng(37)
    power = rng.random((12, 12)) * 0.01
    np.fill_diagonal(power, 1.0)
    a = sisa(power, n_subbands=4, seed=9)
    b = sisa(power, n_subbands=4, seed=9)
    assert np.array_equal(a.subband, b.subband)


def test_export_allocation_csv(tmp_path):
    alloc = Allocation(subband=[1, 0, 2], n_subbands=3)
    path = tmp_path / "alloc.csv"
    export_allocation_csv(alloc, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "subnetwork,subband"
    assert rows[1:] == ["0,1", "1,0", "2,2"]
