"""Walkthrough: does a model trained in one radio environment transfer?

Trains one small model per scenario preset (dense factory, sparse-clutter
factory, indoor office), then evaluates every model on every scenario.
Because the model only ever sees graph structure, not gains, rows of the
matrix come out close: the allocator generalizes across environments.

Desk-scale settings keep this to several minutes; raise --graphs for
tighter numbers.
"""

import argparse
import time

import numpy as np

from subband_alloc.channel import PROFILES, NoiseModel, realize_gains
from subband_alloc.config import SCENARIOS
from subband_alloc.deploy import generate_snapshot
from subband_alloc.evaluate import generalization_matrix
from subband_alloc.ggnn import GgnnConfig, TrainerConfig, train
from subband_alloc.graph import build_graph

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--graphs", type=int, default=400)
parser.add_argument("--snapshots", type=int, default=200)
args = parser.parse_args()

noise = NoiseModel()
models = {}
for idx, (name, scenario) in enumerate(SCENARIOS.items()):
    profile = PROFILES[scenario.channel_profile]
    area = (scenario.area_width_m, scenario.area_height_m)
    dataset = []
    for i in range(args.graphs):
        ss = np.random.SeedSequence([55, idx, i]).generate_state(2)
        snap = generate_snapshot(scenario, int(ss[0]))
        gains = realize_gains(snap, profile, noise, int(ss[1]), area=area)
        dataset.append(build_graph(gains, noise.n_subbands))
    t0 = time.time()
    result = train(dataset, GgnnConfig(),
                   TrainerConfig(max_epochs=100, dataset_size=args.graphs), seed=3)
    print(f"{name}: trained {result.epochs_run} epochs in {time.time() - t0:.0f} s "
          f"(N={scenario.n_subnetworks}, {scenario.channel_profile})")
    models[name] = result.model

print(f"\nevaluating the 3x3 matrix on {args.snapshots} snapshots per scenario...")
table = generalization_matrix(models, dict(SCENARIOS), noise=noise,
                              n_snapshots=args.snapshots, master_seed=8)

names = list(SCENARIOS)
width = max(len(n) for n in names) + 2
print("\nmean per-device SE (bits/s/Hz), rows = training scenario:")
print(" " * width + "".join(f"{n:>{width}}" for n in names))
for train_name in names:
    cells = "".join(f"{table[(train_name, t)]:>{width}.2f}" for t in names)
    print(f"{train_name:>{width}}" + cells)

for test_name in names:
    col = [table[(tr, test_name)] for tr in names]
    spread = (max(col) - min(col)) / np.mean(col)
    print(f"column {test_name}: spread {100 * spread:.1f}% across training scenarios")
