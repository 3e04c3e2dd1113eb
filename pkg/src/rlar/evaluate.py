"""1-NN evaluation over learned embeddings: repeated stratified trials,
hyperparameter grid search, and report assembly.

Trials are pure functions of (dataset, method, params, seed, trial) and can
run in a process pool (RLAR_THREADS caps the workers); reports are assembled
in trial order so results are identical either way.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from rlar import baselines, solver
from rlar.data import (
    DataError,
    SplitSpec,
    inject_outliers,
    minmax_stats,
    normalize_min_max,
    stratified_split,
)

# default tuning grid, shared by alpha and beta
DEFAULT_GRID = (0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 10.0, 100.0, 1000.0)
DEFAULT_RIDGE_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0)

_INNER_TRIAL_OFFSET = 10_000  # keeps inner-validation splits disjoint from outer trial keys


@dataclass(frozen=True)
class TrialReport:
    method: str
    params: dict
    trial: int
    seed: int
    split: str
    correct: int
    total: int
    accuracy: float


@dataclass(frozen=True)
class BenchmarkReport:
    method: str
    params: dict
    split: str
    mean_accuracy: float
    std_accuracy: float  # population std over trials
    trials: tuple
    traces: tuple  # per-trial objective traces (rlar only)
    wall_s: float


def knn1_classify(train_emb, train_labels, test_emb):
    """Label each test column by its Euclidean-nearest training column
    (ties to the lowest training index)."""
    train_emb = np.asarray(train_emb, dtype=np.float64)
    test_emb = np.asarray(test_emb, dtype=np.float64)
    if train_emb.size == 0 or train_emb.shape[1] == 0:
        raise DataError("1-NN needs a non-empty training set")
    if train_emb.shape[0] != test_emb.shape[0]:
        raise DataError("train and test embeddings must share the feature dimension")
    dist = cdist(test_emb.T, train_emb.T, metric="sqeuclidean")
    nearest = np.argmin(dist, axis=1)  # first minimum = lowest train index
    return np.asarray(train_labels)[nearest]


def _fit_embed(train, method, params):
    """Fit one method and return (embed(X) function, objective trace or None)."""
    if method == "rlar":
        hp = solver.HyperParams(**params)
        model, trace = solver.fit(train, hp)
        return lambda x: solver.transform(model, x), list(trace.objective)
    if method == "lda":
        model = baselines.fit_lda(train, params.get("out_dim"))
        return lambda x: model.w.T @ x, None
    if method == "ridge":
        model = baselines.fit_ridge(train, params["lam"])
        return lambda x: model.w.T @ x, None
    raise ValueError(f"unknown method {method!r}")


def _prepared_split(ds, split, trial, normalize):
    """Split, then apply the requested normalization protocol.

    "full" and "none" assume ds is already in its final scale; "train"
    computes min-max stats on the training side and applies them to both.
    """
    train, test = stratified_split(ds, split, trial)
    if normalize == "train":
        stats = minmax_stats(train)
        train = normalize_min_max(train, stats)
        test = normalize_min_max(test, stats)
    return train, test


def _split_description(split):
    return f"mode={split.mode},value={split.value},seed={split.seed},trials={split.trials}"


def _run_one_trial(args):
    ds, method, params, split, trial, corrupt, normalize = args
    try:
        train, test = _prepared_split(ds, split, trial, normalize)
        if corrupt is not None:
            train = inject_outliers(train, corrupt, trial)
        embed, trace = _fit_embed(train, method, params)
        pred = knn1_classify(embed(train.features), train.labels, embed(test.features))
        correct = int((pred == test.labels).sum())
        total = int(test.n_samples)
    except (DataError, solver.NumericalError) as exc:
        raise type(exc)(f"trial {trial}: {exc}") from exc
    report = TrialReport(
        method=method,
        params=dict(params),
        trial=trial,
        seed=split.seed,
        split=_split_description(split),
        correct=correct,
        total=total,
        accuracy=correct / total,
    )
    return report, trace


def _worker_count():
    raw = os.environ.get("RLAR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_trials(ds, method, params, split, corrupt=None, normalize="full"):
    """Repeat split / fit / embed / 1-NN for split.trials trials and
    aggregate mean and population-std accuracy."""
    start = time.perf_counter()
    if normalize == "full":
        ds = normalize_min_max(ds)
    jobs = [(ds, method, params, split, t, corrupt, normalize) for t in range(split.trials)]
    workers = _worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one_trial, jobs))
    else:
        results = [_run_one_trial(job) for job in jobs]
    trials = tuple(rep for rep, _ in results)
    traces = tuple(tr for _, tr in results if tr is not None)
    accs = np.array([rep.accuracy for rep in trials])
    return BenchmarkReport(
        method=method,
        params=dict(params),
        split=_split_description(split),
        mean_accuracy=float(accs.mean()),
        std_accuracy=float(accs.std()),
        trials=trials,
        traces=traces,
        wall_s=time.perf_counter() - start,
    )


def _inner_accuracy(train, method, params, split, inner_reps, normalize):
    """Mean validation accuracy over stratified 50/50 inner splits of the
    training data; the outer test set is never touched."""
    inner = SplitSpec("fraction", 0.5, split.seed, trials=inner_reps)
    accs = []
    for r in range(inner_reps):
        fit_part, val_part = _prepared_split(train, inner, _INNER_TRIAL_OFFSET + r, normalize)
        embed, _ = _fit_embed(fit_part, method, params)
        pred = knn1_classify(embed(fit_part.features), fit_part.labels, embed(val_part.features))
        accs.append(float((pred == val_part.labels).mean()))
    return float(np.mean(accs))


def grid_search(ds, alphas, betas, split, k=3, max_iter=30, eps=1e-10, inner_reps=3, normalize="full"):
    """Score every (alpha, beta) cell by inner validation on trial-0's
    training set; returns (best cell, full accuracy surface).

    Ties go to the smaller (alpha, beta) pair lexicographically.
    """
    if not alphas or not betas:
        raise ValueError("grid lists must be non-empty")
    if normalize == "full":
        ds = normalize_min_max(ds)
    train, _ = _prepared_split(ds, split, 0, "none")
    surface = []
    for alpha in alphas:
        for beta in betas:
            params = {"alpha": alpha, "beta": beta, "k": k, "max_iter": max_iter, "eps": eps}
            acc = _inner_accuracy(train, "rlar", params, split, inner_reps, normalize)
            surface.append({"alpha": alpha, "beta": beta, "accuracy": acc})
    best = max(surface, key=lambda row: (row["accuracy"], -row["alpha"], -row["beta"]))
    return dict(best), surface


def tune_ridge(ds, lambdas, split, inner_reps=3, normalize="full"):
    """Pick the ridge regularizer by the same inner-validation protocol;
    ties go to the smaller lambda."""
    if not lambdas:
        raise ValueError("lambda grid must be non-empty")
    if normalize == "full":
        ds = normalize_min_max(ds)
    train, _ = _prepared_split(ds, split, 0, "none")
    scored = []
    for lam in lambdas:
        acc = _inner_accuracy(train, "ridge", {"lam": lam}, split, inner_reps, normalize)
        scored.append({"lam": lam, "accuracy": acc})
    best = max(scored, key=lambda row: (row["accuracy"], -row["lam"]))
    return dict(best), scored


def report_to_dict(report):
    """Deterministic JSON payload; wall time lives under "timing" so byte
    comparisons can exclude it."""
    return {
        "method": report.method,
        "params": report.params,
        "split": report.split,
        "mean_accuracy": report.mean_accuracy,
        "std_accuracy": report.std_accuracy,
        "std_kind": "population",
        "trials": [
            {
                "trial": t.trial,
                "seed": t.seed,
                "correct": t.correct,
                "total": t.total,
                "accuracy": t.accuracy,
            }
            for t in report.trials
        ],
        "traces": [list(tr) for tr in report.traces],
        "timing": {"wall_s": report.wall_s},
    }
