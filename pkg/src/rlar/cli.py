"""Command-line front end: fit / transform / evaluate / grid / trace.

Exit codes: 0 success, 2 bad arguments, 3 data error, 4 numerical failure.
Every command writes its files under <out>/run-<timestamp>-seed<seed>/ and
is bit-reproducible for a fixed --seed up to the "timing" metadata fields.
"""

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from rlar import evaluate as ev
from rlar import solver
from rlar.data import CorruptionSpec, DataError, SplitSpec, load_csv, normalize_min_max


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_trace_csv(path, trace):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "objective", "wall_ms"])
        for i, (obj, wall) in enumerate(zip(trace.objective, trace.wall_time), start=1):
            writer.writerow([i, repr(obj), repr(wall * 1000.0)])


def _run_dir(out, seed):
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%f")
    path = Path(out) / f"run-{stamp}-seed{seed}"
    path.mkdir(parents=True, exist_ok=False)
    return path


def _load_dataset(args):
    ds = load_csv(args.data, label_column=args.label_column, header=args.header)
    return ds


def _split_spec(args, parser):
    if args.train_count is not None and args.train_frac is not None:
        parser.error("--train-frac and --train-count are mutually exclusive")
    if args.train_count is not None:
        return SplitSpec("count", args.train_count, args.seed, args.trials)
    frac = 0.2 if args.train_frac is None else args.train_frac
    return SplitSpec("fraction", frac, args.seed, args.trials)


def _default_k(ds, split):
    """3 neighbors when any class contributes at most 10 training samples,
    else 7."""
    min_train = min(split.train_count(idx.size) for idx in ds.class_index)
    return 3 if min_train <= 10 else 7


def _full_data_k(ds):
    return 3 if min(ds.class_sizes()) <= 10 else 7


def _hyperparams(args, k, parser):
    if args.alpha is None or args.beta is None:
        parser.error("rlar needs --alpha and --beta")
    return solver.HyperParams(
        alpha=args.alpha,
        beta=args.beta,
        k=k,
        max_iter=args.iters,
        eps=args.eps,
        tol=args.tol,
    )


def _apply_params_file(args):
    if args.params is None:
        return
    with open(args.params, encoding="utf-8") as fh:
        stored = json.load(fh)
    for key, attr in (("alpha", "alpha"), ("beta", "beta"), ("k", "k")):
        if getattr(args, attr, None) is None and key in stored:
            setattr(args, attr, stored[key])


def cmd_fit(args, parser, trace_only=False):
    if args.alpha is None or args.beta is None:
        parser.error("fit needs --alpha and --beta")
    ds = normalize_min_max(_load_dataset(args))
    k = args.k if args.k is not None else _full_data_k(ds)
    params = _hyperparams(args, k, parser)
    model, trace = solver.fit(ds, params)
    run = _run_dir(args.out, args.seed)
    _write_trace_csv(run / "trace.csv", trace)
    if not trace_only:
        _write_json(run / "model.json", solver.model_to_dict(model, trace.objective[-1]))
    print(f"run_dir: {run}")
    print(f"final_objective: {trace.objective[-1]!r}")
    return 0


def cmd_trace(args, parser):
    return cmd_fit(args, parser, trace_only=True)


def cmd_transform(args, parser):
    with open(args.model, encoding="utf-8") as fh:
        model = solver.model_from_dict(json.load(fh))
    ds = _load_dataset(args)
    if args.normalize != "none":
        ds = normalize_min_max(ds)
    emb = solver.transform(model, ds.features)
    run = _run_dir(args.out, args.seed)
    with open(run / "embeddings.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for j in range(emb.shape[1]):
            writer.writerow([repr(float(v)) for v in emb[:, j]] + [int(ds.labels[j])])
    print(f"run_dir: {run}")
    return 0


def _percent(mean, std):
    return f"{100.0 * mean:.2f}±{100.0 * std:.2f}"


def _write_traces_csv(path, report):
    if not report.traces:
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "iteration", "objective"])
        for trial, trace in enumerate(report.traces):
            for i, obj in enumerate(trace, start=1):
                writer.writerow([trial, i, repr(obj)])


def cmd_evaluate(args, parser):
    _apply_params_file(args)
    ds = _load_dataset(args)
    split = _split_spec(args, parser)
    k = args.k if args.k is not None else _default_k(ds, split)
    if args.method == "rlar":
        if args.alpha is None or args.beta is None:
            parser.error("method rlar needs --alpha and --beta (or --params)")
        params = {"alpha": args.alpha, "beta": args.beta, "k": k,
                  "max_iter": args.iters, "eps": args.eps}
    elif args.method == "lda":
        params = {}
    else:
        if args.ridge_lambda is None:
            best, _ = ev.tune_ridge(ds, ev.DEFAULT_RIDGE_GRID, split, normalize=args.normalize)
            params = {"lam": best["lam"]}
        else:
            params = {"lam": args.ridge_lambda}
    clean = ev.run_trials(ds, args.method, params, split, normalize=args.normalize)
    payload = ev.report_to_dict(clean)
    run = _run_dir(args.out, args.seed)
    _write_traces_csv(run / "traces.csv", clean)
    if args.corrupt_frac > 0:
        corrupt = CorruptionSpec("fraction", args.corrupt_frac, args.corrupt_feature_frac, args.seed)
        corrupted = ev.run_trials(ds, args.method, params, split, corrupt=corrupt,
                                  normalize=args.normalize)
        payload = {
            "clean": payload,
            "corrupted": ev.report_to_dict(corrupted),
            "corruption": {
                "fraction": args.corrupt_frac,
                "feature_fraction": args.corrupt_feature_frac,
            },
        }
        _write_traces_csv(run / "corrupted_traces.csv", corrupted)
        print(f"clean {_percent(clean.mean_accuracy, clean.std_accuracy)}")
        print(f"corrupted {_percent(corrupted.mean_accuracy, corrupted.std_accuracy)}")
    else:
        print(_percent(clean.mean_accuracy, clean.std_accuracy))
    _write_json(run / "report.json", payload)
    print(f"run_dir: {run}")
    return 0


def cmd_grid(args, parser):
    ds = _load_dataset(args)
    split = _split_spec(args, parser)
    k = args.k if args.k is not None else _default_k(ds, split)
    alphas = [float(v) for v in args.alphas.split(",")]
    betas = [float(v) for v in args.betas.split(",")]
    best, surface = ev.grid_search(
        ds, alphas, betas, split, k=k, max_iter=args.iters, eps=args.eps,
        inner_reps=args.inner_reps, normalize=args.normalize,
    )
    run = _run_dir(args.out, args.seed)
    with open(run / "surface.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "accuracy"])
        for row in surface:
            writer.writerow([repr(row["alpha"]), repr(row["beta"]), repr(row["accuracy"])])
    _write_json(run / "best_params.json", {**best, "k": k, "max_iter": args.iters, "eps": args.eps})
    print(f"best: alpha={best['alpha']} beta={best['beta']} accuracy={best['accuracy']:.4f}")
    print(f"run_dir: {run}")
    return 0


def _add_common(sub):
    sub.add_argument("--data", required=True, help="CSV dataset, one sample per row")
    sub.add_argument("--label-column", default="last",
                     help="'last' (default) or 0-based column index")
    sub.add_argument("--header", action="store_true", help="skip a header row")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default="runs", help="parent directory for run outputs")
    sub.add_argument("--normalize", choices=["full", "train", "none"], default="full")


def _add_hyper(sub):
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--k", type=int, default=None,
                     help="neighbors; default 3 when any class has <= 10 training samples, else 7")
    sub.add_argument("--iters", type=int, default=30)
    sub.add_argument("--eps", type=float, default=1e-10)
    sub.add_argument("--tol", type=float, default=0.0)


def _add_split(sub):
    sub.add_argument("--train-frac", type=float, default=None,
                     help="training fraction per class (default 0.2)")
    sub.add_argument("--train-count", type=int, default=None,
                     help="training samples per class (overrides --train-frac)")
    sub.add_argument("--trials", type=int, default=10)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rlar",
        description="Robust locality-aware regression: fit, embed and benchmark.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p_fit = commands.add_parser("fit", help="fit on the full dataset, write model + trace")
    _add_common(p_fit)
    _add_hyper(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_trace = commands.add_parser("trace", help="fit and write only the objective trace")
    _add_common(p_trace)
    _add_hyper(p_trace)
    p_trace.set_defaults(func=cmd_trace)

    p_tr = commands.add_parser("transform", help="embed a dataset with a saved model")
    _add_common(p_tr)
    p_tr.add_argument("--model", required=True, help="model.json written by fit")
    p_tr.set_defaults(func=cmd_transform)

    p_ev = commands.add_parser("evaluate", help="repeated-trial 1-NN benchmark")
    _add_common(p_ev)
    _add_hyper(p_ev)
    _add_split(p_ev)
    p_ev.add_argument("--method", choices=["rlar", "lda", "ridge"], default="rlar")
    p_ev.add_argument("--params", default=None, help="best_params.json from the grid command")
    p_ev.add_argument("--ridge-lambda", type=float, default=None,
                      help="ridge regularizer; tuned on a validation split when omitted")
    p_ev.add_argument("--corrupt-frac", type=float, default=0.0,
                      help="also rerun with this fraction of training samples corrupted")
    p_ev.add_argument("--corrupt-feature-frac", type=float, default=1.0)
    p_ev.set_defaults(func=cmd_evaluate)

    p_gr = commands.add_parser("grid", help="(alpha, beta) accuracy surface + best cell")
    _add_common(p_gr)
    _add_split(p_gr)
    p_gr.add_argument("--k", type=int, default=None)
    p_gr.add_argument("--iters", type=int, default=30)
    p_gr.add_argument("--eps", type=float, default=1e-10)
    p_gr.add_argument("--alphas", default=",".join(str(v) for v in ev.DEFAULT_GRID))
    p_gr.add_argument("--betas", default=",".join(str(v) for v in ev.DEFAULT_GRID))
    p_gr.add_argument("--inner-reps", type=int, default=3)
    p_gr.set_defaults(func=cmd_grid)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except solver.NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
