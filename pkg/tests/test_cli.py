import json
import re

import numpy as np
import pytest

from conftest import DATA_DIR
from rlar.cli import main

IRIS = str(DATA_DIR / "iris.csv")
WINE = str(DATA_DIR / "wine.csv")


def run_dir_of(capsys):
    out = capsys.readouterr().out
    match = re.search(r"run_dir: (.+)", out)
    assert match, out
    return match.group(1), out


def test_fit_writes_model_and_trace(tmp_path, capsys):
    code = main(["fit", "--data", IRIS, "--alpha", "0.1", "--beta", "0.1",
                 "--out", str(tmp_path), "--seed", "3"])
    assert code == 0
    run, _ = run_dir_of(capsys)
    model = json.load(open(f"{run}/model.json"))
    w = np.array(model["w"])
    assert w.shape == (4, 3)
    assert model["params"]["alpha"] == 0.1
    lines = open(f"{run}/trace.csv").read().strip().splitlines()
    assert lines[0] == "iteration,objective,wall_ms"
    assert len(lines) == 1 + 30
    objs = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(b <= a + 1e-9 for a, b in zip(objs, objs[1:]))


def test_trace_only(tmp_path, capsys):
    code = main(["trace", "--data", IRIS, "--alpha", "1", "--beta", "1",
                 "--iters", "5", "--out", str(tmp_path)])
    assert code == 0
    run, _ = run_dir_of(capsys)
    lines = open(f"{run}/trace.csv").read().strip().splitlines()
    assert len(lines) == 1 + 5
    import os

    assert not os.path.exists(f"{run}/model.json")


def test_transform_round_trip(tmp_path, capsys):
    main(["fit", "--data", IRIS, "--alpha", "0.1", "--beta", "0.1", "--out", str(tmp_path)])
    fit_run, _ = run_dir_of(capsys)
    code = main(["transform", "--data", IRIS, "--model", f"{fit_run}/model.json",
                 "--out", str(tmp_path)])
    assert code == 0
    tr_run, _ = run_dir_of(capsys)
    rows = open(f"{tr_run}/embeddings.csv").read().strip().splitlines()
    assert len(rows) == 150
    assert len(rows[0].split(",")) == 3 + 1  # c embedding values + label


def test_evaluate_output_format(tmp_path, capsys):
    code = main(["evaluate", "--data", IRIS, "--method", "rlar", "--alpha", "0.1",
                 "--beta", "0.1", "--trials", "2", "--iters", "5",
                 "--out", str(tmp_path), "--seed", "1"])
    assert code == 0
    run, out = run_dir_of(capsys)
    assert re.search(r"^\d+\.\d{2}±\d+\.\d{2}$", out.splitlines()[0])
    report = json.load(open(f"{run}/report.json"))
    assert report["method"] == "rlar"
    assert len(report["trials"]) == 2


def test_evaluate_all_methods_comparable(tmp_path, capsys):
    reports = {}
    for method in ("rlar", "lda", "ridge"):
        args = ["evaluate", "--data", WINE, "--method", method, "--trials", "2",
                "--iters", "5", "--out", str(tmp_path), "--seed", "5"]
        if method == "rlar":
            args += ["--alpha", "0.1", "--beta", "0.1"]
        if method == "ridge":
            args += ["--ridge-lambda", "1.0"]
        assert main(args) == 0
        run, _ = run_dir_of(capsys)
        reports[method] = json.load(open(f"{run}/report.json"))
    splits = {r["split"] for r in reports.values()}
    assert len(splits) == 1  # same protocol for every method


def test_evaluate_corrupt_reports_both(tmp_path, capsys):
    code = main(["evaluate", "--data", IRIS, "--method", "lda", "--trials", "2",
                 "--corrupt-frac", "0.4", "--out", str(tmp_path), "--seed", "2"])
    assert code == 0
    run, out = run_dir_of(capsys)
    assert re.search(r"^clean \d+\.\d{2}±\d+\.\d{2}$", out, re.M)
    assert re.search(r"^corrupted \d+\.\d{2}±\d+\.\d{2}$", out, re.M)
    report = json.load(open(f"{run}/report.json"))
    assert set(report) == {"clean", "corrupted", "corruption"}


def test_grid_surface_and_round_trip(tmp_path, capsys):
    code = main(["grid", "--data", IRIS, "--alphas", "0.1,1", "--betas", "0.1,1",
                 "--iters", "5", "--inner-reps", "1", "--out", str(tmp_path), "--seed", "4"])
    assert code == 0
    run, _ = run_dir_of(capsys)
    rows = open(f"{run}/surface.csv").read().strip().splitlines()
    assert rows[0] == "alpha,beta,accuracy"
    assert len(rows) == 1 + 4
    best = json.load(open(f"{run}/best_params.json"))
    assert {"alpha", "beta", "k"} <= set(best)

    code = main(["evaluate", "--data", IRIS, "--method", "rlar",
                 "--params", f"{run}/best_params.json", "--trials", "2",
                 "--iters", "5", "--out", str(tmp_path), "--seed", "4"])
    assert code == 0


def test_default_grid_flag_value(tmp_path):
    from rlar.cli import build_parser

    args = build_parser().parse_args(["grid", "--data", IRIS, "--out", str(tmp_path)])
    assert args.alphas == "0.001,0.005,0.01,0.05,0.1,0.5,1.0,10.0,100.0,1000.0"


def test_bad_arguments_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--data", IRIS, "--train-frac", "0.2", "--train-count", "3",
              "--out", str(tmp_path)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--data", IRIS, "--method", "unknown", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_missing_alpha_is_bad_arguments(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["fit", "--data", IRIS, "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_missing_file_exit_3(tmp_path):
    assert main(["fit", "--data", "nope.csv", "--alpha", "1", "--beta", "1",
                 "--out", str(tmp_path)]) == 3


def test_k_default_rule(tmp_path, capsys):
    # 20% of iris -> 10 per class -> K = 3
    main(["grid", "--data", IRIS, "--alphas", "0.1", "--betas", "0.1",
          "--iters", "2", "--inner-reps", "1", "--out", str(tmp_path)])
    run, _ = run_dir_of(capsys)
    best = json.load(open(f"{run}/best_params.json"))
    assert best["k"] == 3
    # 50% of iris -> 25 per class -> K = 7
    main(["grid", "--data", IRIS, "--alphas", "0.1", "--betas", "0.1",
          "--train-frac", "0.5", "--iters", "2", "--inner-reps", "1",
          "--out", str(tmp_path)])
    run, _ = run_dir_of(capsys)
    best = json.load(open(f"{run}/best_params.json"))
    assert best["k"] == 7
