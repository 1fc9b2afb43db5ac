"""Command-line pipeline: dataset generation, training, evaluation,
runtime benchmarking, and the generalization matrix.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import json
import os
import sys
import threading
from concurrent.futures import ProcessPoolExecutor

from . import config as cfg_mod
from .config import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _chunks(n_items, n_chunks):
    n_chunks = max(1, min(n_chunks, n_items))
    bounds = [round(i * n_items / n_chunks) for i in range(n_chunks + 1)]
    return [range(bounds[i], bounds[i + 1]) for i in range(n_chunks) if bounds[i] < bounds[i + 1]]


def _n_workers(cfg):
    workers = cfg.get("workers")
    return os.cpu_count() or 1 if workers is None else max(1, int(workers))


# ---------------------------------------------------------------------------
# gen-data

def _gen_graph_entry(args):
    """Worker: build one interference graph, return (index, file text)."""
    cfg, index = args
    from .channel import realize_gains
    from .deploy import generate_snapshot
    from .evaluate import _snapshot_seeds
    from .graph import build_graph, graph_to_text

    cfg_mod.apply_channel_profiles(cfg)
    scenario = cfg_mod.scenario_from_config(cfg)
    noise = cfg_mod.noise_from_config(cfg)
    from .channel import PROFILES
    profile = PROFILES[scenario.channel_profile]
    master = cfg_mod.stream_seed(cfg["master_seed"], "deploy")
    deploy_seed, chan_seed, _ = _snapshot_seeds(master, index)
    snapshot = generate_snapshot(scenario, deploy_seed)
    gains = realize_gains(snapshot, profile, noise, chan_seed,
                          area=(scenario.area_width_m, scenario.area_height_m))
    graph = build_graph(gains, noise.n_subbands)
    return index, graph_to_text(graph, seed=deploy_seed, profile=scenario.channel_profile)


def cmd_gen_data(cfg, args):
    from .graph import write_manifest

    count = cfg["trainer"]["dataset_size"] if args.count is None else args.count
    if count < 1:
        raise ConfigError(f"dataset count must be >= 1, got {count}")
    out_dir = args.out or os.path.join(cfg["output_dir"], "dataset")
    os.makedirs(out_dir, exist_ok=True)
    scenario = cfg_mod.scenario_from_config(cfg)

    tasks = [(cfg, i) for i in range(count)]
    workers = _n_workers(cfg)
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = sorted(pool.map(_gen_graph_entry, tasks, chunksize=16))
    else:
        entries = [_gen_graph_entry(t) for t in tasks]

    manifest = []
    for index, text in entries:
        filename = f"graph_{index:05d}.txt"
        with open(os.path.join(out_dir, filename), "w") as f:
            f.write(text)
        header = dict(line.split("=", 1) for line in text.splitlines()[1:5])
        manifest.append({"file": filename, "n_nodes": header["N"], "n_subbands": header["K"],
                         "seed": header["seed"], "profile": header["profile"]})
    write_manifest(out_dir, manifest)
    cfg_mod.write_provenance(out_dir, cfg)
    print(f"wrote {count} graphs ({scenario.channel_profile}, N={scenario.n_subnetworks}) to {out_dir}")


# ---------------------------------------------------------------------------
# train

def cmd_train(cfg, args):
    from .ggnn import DatasetEmpty, save_loss_history, train
    from .graph import load_dataset

    dataset_dir = args.dataset or os.path.join(cfg["output_dir"], "dataset")
    if not os.path.isdir(dataset_dir):
        raise ConfigError(f"dataset directory not found: {dataset_dir}")
    try:
        dataset = load_dataset(dataset_dir)
    except FileNotFoundError as exc:
        raise ConfigError(f"dataset manifest missing: {exc}")
    ggnn_cfg = cfg_mod.ggnn_config_from_config(cfg)
    trainer_cfg = cfg_mod.trainer_config_from_config(cfg)

    out_dir = args.out or cfg["output_dir"]
    os.makedirs(out_dir, exist_ok=True)
    seed = cfg_mod.stream_seed(cfg["master_seed"], "train")
    try:
        result = train(dataset, ggnn_cfg, trainer_cfg, seed=seed)
    except DatasetEmpty as exc:
        raise ConfigError(str(exc))
    model_path = os.path.join(out_dir, "model.bin")
    result.model.save(model_path)
    save_loss_history(os.path.join(out_dir, "loss_history.csv"), result.loss_history)
    cfg_mod.write_provenance(out_dir, cfg,
                             inputs={"dataset_manifest": os.path.join(dataset_dir, "manifest.csv")})
    print(f"trained {result.epochs_run} epochs "
          f"(early stop: {result.stopped_early}); "
          f"loss {result.loss_history[0]:.4f} -> {result.loss_history[-1]:.4f}; "
          f"model at {model_path}")


# ---------------------------------------------------------------------------
# eval

def _eval_chunk(args):
    cfg, scenario_name, allocator_names, model_path, indices = args
    from .evaluate import evaluate_scenario, make_allocators
    from .ggnn import GgnnModel

    cfg_mod.apply_channel_profiles(cfg)
    scenario = cfg_mod.scenario_from_config(cfg, scenario_name)
    noise = cfg_mod.noise_from_config(cfg)
    model = GgnnModel.load(model_path) if model_path else None
    allocators = make_allocators(allocator_names, model=model)
    master = cfg_mod.stream_seed(cfg["master_seed"], "eval")
    return evaluate_scenario(scenario, allocators, noise=noise,
                             master_seed=master, indices=list(indices))


def cmd_eval(cfg, args):
    from .evaluate import make_allocators, write_result_csvs
    from .ggnn import GgnnModel

    allocator_names = (args.allocators.split(",") if args.allocators
                       else list(cfg["eval"]["allocators"]))
    model_path = args.model
    if "ggnn" in allocator_names:
        if model_path is None:
            model_path = os.path.join(cfg["output_dir"], "model.bin")
        if not os.path.isfile(model_path):
            raise ConfigError(f"model file not found: {model_path} (required by allocator 'ggnn')")
    try:
        make_allocators([n for n in allocator_names if n != "ggnn"])
    except ValueError as exc:
        raise ConfigError(str(exc))

    n_snapshots = int(cfg["eval"]["n_snapshots"])
    out_dir = args.out or os.path.join(cfg["output_dir"], "eval")
    workers = _n_workers(cfg)
    chunks = _chunks(n_snapshots, workers)
    tasks = [(cfg, args.scenario, allocator_names, model_path, chunk) for chunk in chunks]
    if len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_eval_chunk, tasks))
    else:
        partials = [_eval_chunk(t) for t in tasks]
    results = {name: [] for name in allocator_names}
    for part in partials:
        for name in allocator_names:
            results[name].extend(part[name])

    write_result_csvs(results, out_dir)
    inputs = {"model": model_path} if model_path and os.path.isfile(model_path) else {}
    cfg_mod.write_provenance(out_dir, cfg, inputs=inputs)
    print(f"evaluated {n_snapshots} snapshots with {allocator_names}; results in {out_dir}")


# ---------------------------------------------------------------------------
# bench

def cmd_bench(cfg, args):
    from .evaluate import (make_allocators, runtime_growth_ratios, runtime_sweep,
                           write_runtime_csv)
    from .ggnn import GgnnModel

    model_path = args.model or os.path.join(cfg["output_dir"], "model.bin")
    if not os.path.isfile(model_path):
        raise ConfigError(f"model file not found: {model_path}")
    model = GgnnModel.load(model_path)
    allocators = make_allocators(["ggnn", "cgc", "sisa"], model=model)
    scenario = cfg_mod.scenario_from_config(cfg)
    noise = cfg_mod.noise_from_config(cfg)
    bench = cfg["bench"]
    out_dir = args.out or os.path.join(cfg["output_dir"], "bench")
    os.makedirs(out_dir, exist_ok=True)

    rows = runtime_sweep(allocators, base_scenario=scenario,
                         n_list=list(bench["n_list"]), reps=int(bench["reps"]),
                         warmup=int(bench.get("warmup", 3)), noise=noise,
                         master_seed=cfg_mod.stream_seed(cfg["master_seed"], "bench"))
    write_runtime_csv(rows, os.path.join(out_dir, "runtime.csv"))
    meta = {
        "workers": 1,  # bench always runs single-threaded at the orchestration level
        "python_threads": threading.active_count(),
        "measured_boundary": "allocation call only; graph construction and "
                             "gain collection excluded",
        "growth_ratios": runtime_growth_ratios(rows),
    }
    with open(os.path.join(out_dir, "runtime_meta.json"), "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
    cfg_mod.write_provenance(out_dir, cfg, inputs={"model": model_path})
    print(f"runtime sweep over N={list(bench['n_list'])} written to {out_dir}")


# ---------------------------------------------------------------------------
# generalize

def cmd_generalize(cfg, args):
    from .evaluate import generalization_matrix, write_generalization_csv
    from .ggnn import GgnnModel

    model_specs = dict(spec.split("=", 1) for spec in args.models.split(","))
    models = {}
    for name, path in model_specs.items():
        if name not in cfg_mod.SCENARIOS:
            raise ConfigError(f"unknown scenario {name!r}; valid: {sorted(cfg_mod.SCENARIOS)}")
        if not os.path.isfile(path):
            raise ConfigError(f"model file not found: {path}")
        models[name] = GgnnModel.load(path)

    scenarios = {name: cfg_mod.scenario_from_config(cfg, name) for name in cfg_mod.SCENARIOS}
    noise = cfg_mod.noise_from_config(cfg)
    out_dir = args.out or os.path.join(cfg["output_dir"], "generalize")
    os.makedirs(out_dir, exist_ok=True)
    table = generalization_matrix(models, scenarios, noise=noise,
                                  n_snapshots=int(cfg["eval"]["n_snapshots"]),
                                  master_seed=cfg_mod.stream_seed(cfg["master_seed"], "eval"))
    write_generalization_csv(table, os.path.join(out_dir, "generalization.csv"))
    cfg_mod.write_provenance(out_dir, cfg,
                             inputs={f"model_{n}": p for n, p in model_specs.items()})
    print(f"{len(table)}-cell generalization matrix written to {out_dir}")


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="subband-alloc",
        description="Sub-band allocation workbench: simulate subnetwork deployments, "
                    "train the GGNN allocator, and benchmark it against heuristics.")
    parser.add_argument("--config", help="YAML run configuration file")
    parser.add_argument("--seed", type=int, help="master seed (overrides config)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int, help="worker processes (default: all cores)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate an interference-graph dataset")
    p.add_argument("--count", type=int, help="number of graphs (default: trainer.dataset_size)")
    p.add_argument("--scenario", help="scenario preset name")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train the GGNN on a graph dataset")
    p.add_argument("--dataset", help="dataset directory (with manifest.csv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate allocators on fresh snapshots")
    p.add_argument("--model", help="trained model file (for the ggnn allocator)")
    p.add_argument("--allocators", help="comma-separated subset of ra,cgc,sisa,ggnn")
    p.add_argument("--scenario", help="scenario preset name")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="runtime sweep over network sizes")
    p.add_argument("--model", help="trained model file")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generalize", help="train/test generalization matrix")
    p.add_argument("--models", required=True,
                   help="comma-separated scenario=model_path pairs")
    p.set_defaults(func=cmd_generalize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {"master_seed": args.seed, "workers": args.workers}
        if args.command == "bench":
            overrides["workers"] = 1
        if getattr(args, "scenario", None):
            overrides["scenario"] = args.scenario
        cfg = cfg_mod.load_run_config(args.config, overrides)
        cfg_mod.apply_channel_profiles(cfg)
        # validate shared blocks up front for line-precise config errors
        cfg_mod.scenario_from_config(cfg)
        cfg_mod.noise_from_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
