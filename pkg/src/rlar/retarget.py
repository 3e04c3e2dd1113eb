"""Margin-constrained target updates.

Given regression outputs Y (n x c) and labels, each row's learned target t
minimizes ||y - t||_2 subject to t[label] - max_{j != label} t[j] >= 1.
The rows are independent and solved in closed form through the step delta:
t[label] = y[label] + delta, t[j] = y[j] + min(delta - v_j, 0) with
v_j = y_j + 1 - y_label.  delta is the unique root of the strictly
increasing g(x) = x + sum_j min(x - v_j, 0) when some v_j > 0, else 0.
"""

from dataclasses import dataclass

import numpy as np

from rlar._kernels import retarget_rows


@dataclass(frozen=True)
class RetargetRowResult:
    """Diagnostics for one row: the step delta, the margin violations v
    (non-label columns, original order) and the binary active set phi."""

    delta: float
    v: np.ndarray
    phi: np.ndarray


def retarget_row(y, label):
    """Retarget a single score row; returns (t, RetargetRowResult).

    label is the 1-based true class.  phi[j] = 1 iff g(v_j) > 0, which by
    strict monotonicity of g is exactly v_j > delta.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("need a score vector with at least 2 classes")
    t, delta = retarget_rows(y[None, :], np.array([label - 1], dtype=np.int64))
    delta = float(delta[0])
    v = np.delete(y + 1.0 - y[label - 1], label - 1)
    phi = (v > delta).astype(np.int64)
    return t[0], RetargetRowResult(delta, v, phi)


def retarget(y, labels):
    """Row-wise retargeting of an n x c score matrix (labels 1-based)."""
    y = np.asarray(y, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if y.ndim != 2 or labels.shape != (y.shape[0],):
        raise ValueError("scores must be n x c with one label per row")
    t, _ = retarget_rows(y, labels - 1)
    return t


def init_targets(labels, c):
    """Strict zero-one indicator rows: 1 at the label column, 0 elsewhere."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min() < 1 or labels.max() > c:
        raise ValueError("labels must lie in 1..c")
    t = np.zeros((labels.size, c))
    t[np.arange(labels.size), labels - 1] = 1.0
    return t


def margins(t, labels):
    """Per-row margin t[label] - max of the other columns."""
    t = np.asarray(t, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    rows = np.arange(t.shape[0])
    true = t[rows, labels - 1]
    masked = t.copy()
    masked[rows, labels - 1] = -np.inf
    return true - masked.max(axis=1)
