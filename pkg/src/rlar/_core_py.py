"""NumPy implementations of the hot kernels.

Fallback used when the compiled extension (rlar._core) is unavailable;
both backends expose the same three functions with identical semantics.
"""

import numpy as np


def pairwise_norms(e, scale):
    """Scaled Euclidean distances between the rows of e (m x r).

    Returns an m x m matrix with zero diagonal, exactly symmetric.
    """
    e = np.asarray(e, dtype=np.float64)
    diff = e[:, None, :] - e[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if scale != 1.0:
        d *= scale
    np.fill_diagonal(d, 0.0)
    return d


def knn_binary(g, k):
    """Binary row-wise k-nearest selection on a distance block g (m x m).

    Per row: 1 on the k smallest off-diagonal entries, ties broken by
    ascending column index; the diagonal is never selected.
    """
    m = g.shape[0]
    v = np.zeros((m, m))
    if k <= 0:
        return v
    work = np.array(g, dtype=np.float64)
    np.fill_diagonal(work, np.inf)
    order = np.argsort(work, axis=1, kind="stable")
    rows = np.repeat(np.arange(m), k)
    v[rows, order[:, :k].ravel()] = 1.0
    return v


def retarget_rows(y, labels0):
    """Margin-constrained target update for every row of y (n x c).

    labels0 holds 0-based true-class column indices.  For each row the step
    delta solves delta * (1 + |A|) = sum_{j in A} v_j with active set
    A = {j != label : v_j > delta}, v_j = y_j + 1 - y_label, found by a
    descending sort and prefix scan.  Returns (t, delta) where
    t[label] = y[label] + delta and t[j] = y[j] + min(delta - v_j, 0).
    """
    y = np.asarray(y, dtype=np.float64)
    n, c = y.shape
    rows = np.arange(n)
    ylab = y[rows, labels0]
    v = y + 1.0 - ylab[:, None]
    v[rows, labels0] = -np.inf  # exclude the label column from the scan
    vs = -np.sort(-v, axis=1)
    cs = np.cumsum(np.where(np.isfinite(vs), vs, 0.0), axis=1)
    counts = np.arange(1, c + 1)
    cond = vs > cs / (1.0 + counts)
    rho = np.count_nonzero(cond, axis=1)
    delta = np.where(rho > 0, cs[rows, np.maximum(rho - 1, 0)] / (1.0 + rho), 0.0)
    t = y + np.minimum(delta[:, None] - v, 0.0)
    t[rows, labels0] = ylab + delta
    return t, delta
