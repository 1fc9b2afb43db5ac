"""Walkthrough: unsupervised training of the graph-neural allocator.

Trains a small model on a few hundred desk-scale graphs. The loss is the
Potts energy: each edge pays the dot product of its endpoints' soft
sub-band assignments, so zero loss means a conflict-free coloring. No
labels anywhere; the graph structure is the entire training signal.
"""

import argparse
import time

import numpy as np

from subband_alloc.baselines import conflict_count
from subband_alloc.channel import PROFILES, NoiseModel, realize_gains
from subband_alloc.deploy import ScenarioConfig, generate_snapshot
from subband_alloc.ggnn import GgnnConfig, TrainerConfig, predict, train
from subband_alloc.graph import build_graph

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--graphs", type=int, default=300)
parser.add_argument("--epochs", type=int, default=60)
parser.add_argument("--model-out", help="save the trained model here")
args = parser.parse_args()

scenario = ScenarioConfig()
profile = PROFILES[scenario.channel_profile]
noise = NoiseModel()
area = (scenario.area_width_m, scenario.area_height_m)

print(f"building {args.graphs} training graphs...")
dataset = []
for i in range(args.graphs):
    ss = np.random.SeedSequence([7, i]).generate_state(2)
    snap = generate_snapshot(scenario, int(ss[0]))
    gains = realize_gains(snap, profile, noise, int(ss[1]), area=area)
    dataset.append(build_graph(gains, noise.n_subbands))

t0 = time.time()
result = train(dataset, GgnnConfig(),
               TrainerConfig(max_epochs=args.epochs, dataset_size=args.graphs),
               seed=1)
print(f"trained {result.epochs_run} epochs in {time.time() - t0:.0f} s "
      f"(early stop: {result.stopped_early})")
for e in range(0, result.epochs_run, max(1, result.epochs_run // 8)):
    print(f"  epoch {e + 1:3d}  mean loss {result.loss_history[e]:8.3f}")
print(f"  final     mean loss {result.loss_history[-1]:8.3f}")

# try it on graphs the model has never seen
conflicts = []
for i in range(20):
    ss = np.random.SeedSequence([900, i]).generate_state(2)
    snap = generate_snapshot(scenario, int(ss[0]))
    gains = realize_gains(snap, profile, noise, int(ss[1]), area=area)
    graph = build_graph(gains, noise.n_subbands)
    alloc = predict(graph, result.model, seed=i)
    conflicts.append(conflict_count(graph, alloc))
print(f"\nfresh snapshots: mean {np.mean(conflicts):.1f} conflicting edges "
      f"(graphs average ~{np.mean([g.n_edges for g in dataset]):.0f} edges)")

if args.model_out:
    result.model.save(args.model_out)
    print(f"model saved to {args.model_out}")
