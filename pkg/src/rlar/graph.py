"""Adaptive intra-class KNN graph: connections V, distance cache G, induced
affinity S and graph Laplacian L.

Everything is block-diagonal by class, so storage is a list of per-class
dense blocks; no global n x n matrix is allocated.  G carries the factor K
(G = K * ||W^T X_j - W^T X_k||), so S = V / G already absorbs the neighbor
count and the objective's locality weights are V / (2K).
"""

import csv
from dataclasses import dataclass

import numpy as np

from rlar._kernels import knn_binary, pairwise_norms


@dataclass(frozen=True)
class LocalityGraph:
    """Per-class blocks of the connection matrix V (binary, row sums K_eff),
    the scaled distance cache G and the induced affinity S = V / G."""

    v_blocks: list
    g_blocks: list
    s_blocks: list
    k_eff: np.ndarray


@dataclass(frozen=True)
class GraphLaplacian:
    """Per-class blocks of L = D - (S + S^T)/2 with degree D_ii =
    sum_j (S_ij + S_ji)/2.  L is symmetric, PSD, and annihilates constants."""

    l_blocks: list
    degree: list


def k_effective(k, class_sizes):
    """Per-class neighbor count min(K, n_i - 1), so the row-sum constraint
    stays satisfiable for classes smaller than K + 1."""
    return np.minimum(k, np.asarray(class_sizes) - 1)


def update_distances(w, ds, k):
    """Per-class pairwise Euclidean distances in the projected space, scaled
    by K.  w = None measures distances in the original feature space (the
    initialization of the fit loop)."""
    emb = ds.features if w is None else w.T @ ds.features
    return [
        pairwise_norms(np.ascontiguousarray(emb[:, idx].T), float(k))
        for idx in ds.class_index
    ]


def update_connections(g_blocks, k):
    """Per sample, connect to the K_eff nearest intra-class neighbors by G
    (self excluded, ties to the lowest column index)."""
    return [knn_binary(g, int(min(k, g.shape[0] - 1))) for g in g_blocks]


# Distances below this are treated as coincident when inverting G into S.
# Without a floor the affinities are unbounded: under strong locality
# pressure the embedding collapses, S ~ 1/G overflows and the projection
# solve loses positive definiteness.  1e-12 is small enough that the
# loosened majorizer perturbs the objective well below the 1e-9 descent
# slack, yet keeps S bounded by ~1e12 so the solve stays conditioned.
DISTANCE_FLOOR = 1e-12


def update_affinity(v_blocks, g_blocks, k, eps=1e-10):
    """Elementwise S = V / G with 0/0 = 0; an exactly coincident connected
    pair (V=1, G=0) gets the guard value 1/(K*eps), and positive distances
    are floored at DISTANCE_FLOOR so S stays finite in every regime."""
    s_blocks = []
    for v, g in zip(v_blocks, g_blocks):
        s = np.zeros_like(g)
        hit = v > 0.0
        g_hit = g[hit]
        s[hit] = np.where(
            g_hit == 0.0,
            1.0 / (k * eps),
            1.0 / np.maximum(g_hit, k * DISTANCE_FLOOR),
        )
        s_blocks.append(s)
    return s_blocks


def build_laplacian(s_blocks):
    """L = D - (S + S^T)/2 per class block."""
    l_blocks, degree = [], []
    for s in s_blocks:
        sym = 0.5 * (s + s.T)
        deg = sym.sum(axis=1)
        lap = np.diag(deg) - sym
        l_blocks.append(lap)
        degree.append(deg)
    return GraphLaplacian(l_blocks, degree)


def x_laplacian_xt(x, lap, class_index):
    """Accumulate X L X^T over the class blocks (d x d)."""
    d = x.shape[0]
    out = np.zeros((d, d))
    for idx, lb in zip(class_index, lap.l_blocks):
        xi = x[:, idx]
        out += xi @ lb @ xi.T
    return out


def assemble_blocks(blocks, class_index, n):
    """Scatter per-class blocks into the dense n x n matrix (tests, dumps)."""
    out = np.zeros((n, n))
    for idx, block in zip(class_index, blocks):
        out[np.ix_(idx, idx)] = block
    return out


def dump_coo_csv(blocks, class_index, path):
    """Debug dump of a block matrix as a coordinate list (row, col, value),
    global 0-based indices, nonzero entries only."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "value"])
        for idx, block in zip(class_index, blocks):
            rr, cc = np.nonzero(block)
            for r, c in zip(rr, cc):
                writer.writerow([int(idx[r]), int(idx[c]), repr(float(block[r, c]))])
