"""Sub-band allocation workbench for dense in-factory wireless subnetworks.

Pipeline: random deployments (deploy) -> per-link channel gains (channel)
-> interference graphs (graph) -> unsupervised GGNN allocator built on a
small reverse-mode autodiff core (autodiff, ggnn) -> heuristic baselines
(baselines) -> SINR/SE evaluation and benchmarks (evaluate), driven by the
subband-alloc CLI (cli).
"""

from .baselines import Allocation, cgc_greedy, conflict_count, random_alloc, sisa
from .channel import (INF_DL, INF_SL, INH_OFFICE, PROFILES, ChannelProfile,
                      LinkGains, NoiseModel, los_probability, pathloss_db,
                      realize_gains, sample_shadow_field)
from .deploy import (DeploymentSnapshot, PlacementFailure, ScenarioConfig,
                     generate_snapshot)
from .evaluate import (EvalConfig, empirical_cdf, evaluate_scenario,
                       generalization_matrix, make_allocators, runtime_sweep,
                       sinr, spectral_efficiency)
from .ggnn import (GgnnConfig, GgnnModel, TrainerConfig, TrainResult,
                   init_embeddings, potts_loss, predict, train)
from .graph import InterferenceGraph, build_graph, signalling_count

__version__ = "0.1.0"
