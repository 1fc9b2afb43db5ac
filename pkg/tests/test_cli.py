import os

import numpy as np
import pytest
import yaml

from subband_alloc.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, _chunks, main


@pytest.fixture()
def desk_config(tmp_path):
    """Small configuration so CLI smoke tests run in seconds."""
    cfg = {
        "output_dir": str(tmp_path / "out"),
        "workers": 1,
        "scenario_overrides": {"n_subnetworks": 8},
        "model": {"n_layers": 2, "embedding_dim": 8},
        "trainer": {"dataset_size": 6, "max_epochs": 2, "batch_size": 4,
                    "stop_tolerance": 0.0},
        "eval": {"n_snapshots": 3, "allocators": ["ra", "cgc"]},
        "bench": {"n_list": [5, 10], "reps": 2, "warmup": 1},
    }
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path, tmp_path


def test_chunks_cover_range_without_overlap():
    for n_items, n_chunks in [(10, 3), (5, 8), (1, 1), (100, 7)]:
        chunks = _chunks(n_items, n_chunks)
        flat = [i for c in chunks for i in c]
        assert flat == list(range(n_items))


def test_gen_data_deterministic_bytes(desk_config, tmp_path):
    cfg_path, root = desk_config
    out_a = tmp_path / "data_a"
    out_b = tmp_path / "data_b"
    for out in (out_a, out_b):
        rc = main(["--config", str(cfg_path), "--seed", "7", "--out", str(out),
                   "gen-data", "--count", "4"])
        assert rc == EXIT_OK
    for name in sorted(os.listdir(out_a)):
        if name.endswith(".txt"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    assert (out_a / "manifest.csv").exists()
    assert (out_a / "provenance.json").exists()


def test_gen_data_workers_do_not_change_output(desk_config, tmp_path):
    cfg_path, root = desk_config
    out_1 = tmp_path / "w1"
    out_2 = tmp_path / "w2"
    assert main(["--config", str(cfg_path), "--workers", "1", "--out", str(out_1),
                 "gen-data", "--count", "5"]) == EXIT_OK
    assert main(["--config", str(cfg_path), "--workers", "2", "--out", str(out_2),
                 "gen-data", "--count", "5"]) == EXIT_OK
    for name in sorted(os.listdir(out_1)):
        if name.endswith(".txt"):
            assert (out_1 / name).read_bytes() == (out_2 / name).read_bytes()


def test_gen_data_zero_count_is_config_error(desk_config, capsys):
    cfg_path, _ = desk_config
    rc = main(["--config", str(cfg_path), "gen-data", "--count", "0"])
    assert rc == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_missing_config_file_is_config_error(capsys):
    rc = main(["--config", "/nonexistent/run.yaml", "gen-data", "--count", "1"])
    assert rc == EXIT_CONFIG


def test_train_requires_dataset(desk_config, capsys):
    cfg_path, _ = desk_config
    rc = main(["--config", str(cfg_path), "train", "--dataset", "/no/such/dir"])
    assert rc == EXIT_CONFIG
    assert "dataset directory not found" in capsys.readouterr().err


def test_eval_unknown_allocator_lists_valid_names(desk_config, capsys):
    cfg_path, _ = desk_config
    rc = main(["--config", str(cfg_path), "eval", "--allocators", "ra,typo"])
    assert rc == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "typo" in err and "cgc" in err and "sisa" in err


def test_eval_ggnn_without_model_is_config_error(desk_config, capsys):
    cfg_path, _ = desk_config
    rc = main(["--config", str(cfg_path), "eval", "--allocators", "ggnn"])
    assert rc == EXIT_CONFIG
    assert "model file not found" in capsys.readouterr().err


def test_bench_without_model_is_config_error(desk_config):
    cfg_path, _ = desk_config
    assert main(["--config", str(cfg_path), "bench"]) == EXIT_CONFIG


def test_generalize_unknown_scenario(desk_config, tmp_path):
    cfg_path, _ = desk_config
    fake = tmp_path / "m.bin"
    fake.write_bytes(b"x")
    rc = main(["--config", str(cfg_path), "generalize",
               "--models", f"Scenario9={fake}"])
    assert rc == EXIT_CONFIG


def test_full_pipeline_smoke(desk_config, tmp_path):
    cfg_path, root = desk_config
    out = root / "out"

    assert main(["--config", str(cfg_path), "gen-data"]) == EXIT_OK
    assert main(["--config", str(cfg_path), "train"]) == EXIT_OK
    model_path = out / "model.bin"
    assert model_path.exists()
    assert (out / "loss_history.csv").exists()

    assert main(["--config", str(cfg_path), "eval", "--allocators", "ra,cgc,ggnn",
                 "--model", str(model_path)]) == EXIT_OK
    eval_dir = out / "eval"
    assert (eval_dir / "summary.csv").exists()
    assert (eval_dir / "cdf_sum_se_ggnn.csv").exists()

    assert main(["--config", str(cfg_path), "bench"]) == EXIT_OK
    bench_dir = out / "bench"
    assert (bench_dir / "runtime.csv").exists()
    assert (bench_dir / "runtime_meta.json").exists()

    assert main(["--config", str(cfg_path), "generalize",
                 "--models", f"Default={model_path}"]) == EXIT_OK
    gen_csv = out / "generalize" / "generalization.csv"
    rows = gen_csv.read_text().strip().splitlines()
    assert rows[0] == "train,test,mean_se"
    assert len(rows) == 1 + 3  # one model x three test scenarios


def test_corrupt_model_file_is_runtime_error(desk_config, tmp_path, capsys):
    cfg_path, _ = desk_config
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"SBALGGNN" + b"\x00" * 4)
    rc = main(["--config", str(cfg_path), "bench", "--model", str(bad)])
    assert rc == EXIT_RUNTIME
    assert "CorruptFile" in capsys.readouterr().err
