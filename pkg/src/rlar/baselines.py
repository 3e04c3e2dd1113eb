"""Reference methods (LDA, ridge regression) and independent brute-force
oracles used by the test suite."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from rlar.retarget import init_targets
from rlar.solver import NumericalError


@dataclass(frozen=True)
class LdaModel:
    """Fisher projection (d x out_dim) with the scatter matrices it came from."""

    w: np.ndarray
    sw: np.ndarray
    sb: np.ndarray


@dataclass(frozen=True)
class RidgeModel:
    w: np.ndarray
    b: np.ndarray
    lam: float


def scatter_matrices(ds):
    """Within-class and between-class scatter (unnormalized covariance sums)."""
    x = ds.features
    mean = x.mean(axis=1)
    d = x.shape[0]
    sw = np.zeros((d, d))
    sb = np.zeros((d, d))
    for idx in ds.class_index:
        xi = x[:, idx]
        mi = xi.mean(axis=1)
        centered = xi - mi[:, None]
        sw += centered @ centered.T
        diff = mi - mean
        sb += idx.size * np.outer(diff, diff)
    return sw, sb


def fit_lda(ds, out_dim=None):
    """Top generalized eigenvectors of (S_b, S_w + ridge*I); the small ridge
    (1e-6 * trace(S_w)/d) keeps singular within-class scatter solvable."""
    if any(idx.size < 2 for idx in ds.class_index):
        raise ValueError("every class needs at least 2 samples for LDA")
    c = ds.n_classes
    out_dim = c - 1 if out_dim is None else out_dim
    if not 1 <= out_dim <= c - 1:
        raise ValueError(f"out_dim must lie in 1..{c - 1}")
    sw, sb = scatter_matrices(ds)
    d = sw.shape[0]
    ridge = 1e-6 * np.trace(sw) / d
    try:
        vals, vecs = scipy.linalg.eigh(sb, sw + ridge * np.eye(d))
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"generalized eigensolver failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    return LdaModel(vecs[:, order[:out_dim]], sw, sb)


def fit_ridge(ds, lam):
    """Closed-form centered ridge regression onto zero-one indicator targets."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    x = ds.features
    d = x.shape[0]
    y = init_targets(ds.labels, ds.n_classes)
    x_mean = x.mean(axis=1)
    y_mean = y.mean(axis=0)
    xc = x - x_mean[:, None]
    yc = y - y_mean
    w = np.linalg.solve(xc @ xc.T + lam * np.eye(d), xc @ yc)
    b = y_mean - w.T @ x_mean
    return RidgeModel(w, b, lam)


def pairwise_scatter_identity_check(class_samples):
    """Both sides of the point-to-mean vs pairwise scatter identity:
    sum_j ||x_j - mean||^2  ==  sum_{j,k} ||x_j - x_k||^2 / (2 n)."""
    x = np.asarray(class_samples, dtype=np.float64)
    n = x.shape[1]
    mean = x.mean(axis=1)
    lhs = float(((x - mean[:, None]) ** 2).sum())
    rhs = 0.0
    for j in range(n):
        for k in range(n):
            diff = x[:, j] - x[:, k]
            rhs += float(diff @ diff)
    return lhs, rhs / (2.0 * n)


def retarget_curve(delta, v):
    """Objective sqrt(delta^2 + sum_j min(delta - v_j, 0)^2) on a grid."""
    delta = np.asarray(delta, dtype=np.float64)
    clipped = np.minimum(delta[..., None] - v, 0.0)
    return np.sqrt(delta**2 + (clipped**2).sum(axis=-1))


def brute_force_retarget_row(y, label, grid=10_000):
    """Grid argmin of the single-row retargeting objective over
    [0, max(v, 0) + 1]; the independent oracle for the closed-form step."""
    if grid < 1_000:
        raise ValueError("grid resolution must be at least 1000 points")
    y = np.asarray(y, dtype=np.float64)
    v = np.delete(y + 1.0 - y[label - 1], label - 1)
    hi = max(float(v.max()), 0.0) + 1.0
    deltas = np.linspace(0.0, hi, grid)
    return float(deltas[np.argmin(retarget_curve(deltas, v))])
