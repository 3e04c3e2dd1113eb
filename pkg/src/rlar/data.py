"""Labeled-dataset loading, normalization, stratified splitting and corruption.

Single source of truth for the data layout: features are stored column per
sample (d x n) with integer labels in 1..c.  All randomized operations are
pure functions of (inputs, seed, trial).
"""

import csv
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for unloadable files, invalid label layouts or infeasible splits."""


def _half_up(x):
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class LabeledDataset:
    """Column-per-sample feature matrix with integer class labels.

    features : (d, n) float array, one column per sample.
    labels   : (n,) int array with values in 1..c, every class non-empty.
    class_index : per class, the ascending column indices of its samples.
    """

    features: np.ndarray
    labels: np.ndarray
    class_index: tuple = field(init=False, repr=False)

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise DataError("features must be a 2-D (d, n) matrix")
        if labels.ndim != 1 or labels.shape[0] != feats.shape[1]:
            raise DataError("labels must be a vector with one entry per sample column")
        if labels.size == 0:
            raise DataError("dataset has no samples")
        if labels.min() < 1:
            raise DataError("labels must lie in 1..c")
        c = int(labels.max())
        index = tuple(np.flatnonzero(labels == i) for i in range(1, c + 1))
        if any(idx.size == 0 for idx in index):
            raise DataError("every class in 1..c must be non-empty")
        feats.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_index", index)

    @property
    def n_features(self):
        return self.features.shape[0]

    @property
    def n_samples(self):
        return self.features.shape[1]

    @property
    def n_classes(self):
        return len(self.class_index)

    def class_sizes(self):
        return np.array([idx.size for idx in self.class_index])

    def subset(self, columns):
        """Dataset restricted to the given sample columns (order preserved)."""
        columns = np.asarray(columns)
        return LabeledDataset(self.features[:, columns], self.labels[columns])


@dataclass(frozen=True)
class SplitSpec:
    """Stratified train/test split request.

    mode is "count" (value = training samples per class) or "fraction"
    (value in (0, 1), rounded half-up per class).  Each class must keep at
    least one test sample.
    """

    mode: str
    value: float
    seed: int
    trials: int = 10

    def __post_init__(self):
        if self.mode not in ("count", "fraction"):
            raise DataError("split mode must be 'count' or 'fraction'")
        if self.mode == "count" and (int(self.value) != self.value or self.value < 1):
            raise DataError("count-mode split needs a positive integer value")
        if self.mode == "fraction" and not 0.0 < self.value < 1.0:
            raise DataError("fraction-mode split needs a value in (0, 1)")
        if self.seed < 0:
            raise DataError("seed must be a non-negative integer")
        if self.trials < 1:
            raise DataError("trials must be positive")

    def train_count(self, class_size):
        u = int(self.value) if self.mode == "count" else _half_up(self.value * class_size)
        if u < 1 or u > class_size - 1:
            raise DataError(
                f"class of size {class_size} cannot supply {u} training samples "
                "and keep a test sample"
            )
        return u


@dataclass(frozen=True)
class CorruptionSpec:
    """Synthetic outlier injection: per class, replace a fraction (or count)
    of training samples' features by uniform [0, 1] noise."""

    mode: str = "fraction"
    value: float = 0.0
    feature_fraction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("count", "fraction"):
            raise DataError("corruption mode must be 'count' or 'fraction'")
        if self.mode == "fraction" and not 0.0 <= self.value <= 1.0:
            raise DataError("corruption fraction must lie in [0, 1]")
        if self.mode == "count" and (int(self.value) != self.value or self.value < 0):
            raise DataError("count-mode corruption needs a non-negative integer")
        if not 0.0 <= self.feature_fraction <= 1.0:
            raise DataError("feature_fraction must lie in [0, 1]")

    def sample_count(self, class_size):
        if self.mode == "count":
            return min(int(self.value), class_size)
        return min(_half_up(self.value * class_size), class_size)


def load_csv(path, label_column="last", header=False):
    """Load a comma-separated file into a LabeledDataset.

    One sample per row, label in the last column unless label_column gives a
    0-based index.  Integer labels forming exactly {1..c} are kept as-is; any
    other vocabulary (strings, 0-based or gapped integer codes) is mapped to
    1..c by first appearance.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if row:
                rows.append([cell.strip() for cell in row])
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: empty file")
    arity = len(rows[0])
    if arity < 2:
        raise DataError(f"{path}: rows need at least one feature and a label")
    for i, row in enumerate(rows):
        if len(row) != arity:
            raise DataError(f"{path}: ragged row {i + 1} has {len(row)} fields, expected {arity}")
    col = arity - 1 if label_column == "last" else int(label_column)
    if not -arity <= col < arity:
        raise DataError(f"{path}: label column {label_column} out of range")
    col %= arity

    raw_labels = [row[col] for row in rows]
    try:
        ints = [int(tok) for tok in raw_labels]
    except ValueError:
        ints = None
    if ints is not None and set(ints) == set(range(1, len(set(ints)) + 1)):
        labels = np.array(ints, dtype=np.int64)
    else:
        mapping = {}
        for tok in raw_labels:
            mapping.setdefault(tok, len(mapping) + 1)
        labels = np.array([mapping[tok] for tok in raw_labels], dtype=np.int64)

    feat_cols = [j for j in range(arity) if j != col]
    try:
        feats = np.array([[float(row[j]) for j in feat_cols] for row in rows])
    except ValueError as exc:
        raise DataError(f"{path}: unparseable feature value ({exc})") from exc
    ds = LabeledDataset(feats.T, labels)
    if ds.n_classes < 2:
        raise DataError(f"{path}: need at least 2 classes, found {ds.n_classes}")
    return ds


def minmax_stats(ds):
    """Per-feature (min, max) over all samples, for train-only normalization."""
    return ds.features.min(axis=1), ds.features.max(axis=1)


def normalize_min_max(ds, stats=None):
    """Affinely map each feature row to [0, 1]; constant rows map to 0.

    With explicit stats (from another dataset's minmax_stats) the same affine
    map is applied, so values may leave [0, 1].
    """
    lo, hi = minmax_stats(ds) if stats is None else stats
    span = hi - lo
    span = np.where(span == 0.0, 1.0, span)
    feats = (ds.features - lo[:, None]) / span[:, None]
    return LabeledDataset(feats, ds.labels)


def stratified_split(ds, spec, trial=0):
    """Per class, draw exactly the requested training count without
    replacement; the remainder is test.  Deterministic in (spec.seed, trial).
    """
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, trial]))
    train_cols = []
    for idx in ds.class_index:
        u = spec.train_count(idx.size)
        pick = rng.permutation(idx.size)[:u]
        train_cols.append(idx[np.sort(pick)])
    train_cols = np.sort(np.concatenate(train_cols))
    mask = np.zeros(ds.n_samples, dtype=bool)
    mask[train_cols] = True
    test_cols = np.flatnonzero(~mask)
    return ds.subset(train_cols), ds.subset(test_cols)


def inject_outliers(train, spec, trial=0):
    """Replace selected samples' selected features by uniform [0, 1] noise.

    Selection is per class and deterministic in (spec.seed, trial); labels
    are unchanged.  A zero fraction returns the input unchanged.
    """
    if spec.value == 0 or spec.feature_fraction == 0.0:
        return train
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, trial, 1]))
    feats = np.array(train.features)
    d = train.n_features
    n_feat = min(_half_up(spec.feature_fraction * d), d)
    for idx in train.class_index:
        m = spec.sample_count(idx.size)
        pick = idx[np.sort(rng.permutation(idx.size)[:m])]
        for col in pick:
            sel = rng.permutation(d)[:n_feat]
            feats[sel, col] = rng.uniform(size=n_feat)
    return LabeledDataset(feats, train.labels)
