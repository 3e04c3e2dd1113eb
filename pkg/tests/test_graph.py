from itertools import combinations

import numpy as np
import pytest

from rlar.data import LabeledDataset
from rlar.graph import (
    assemble_blocks,
    build_laplacian,
    dump_coo_csv,
    k_effective,
    update_affinity,
    update_connections,
    update_distances,
)


def two_class_ds(cols, labels):
    return LabeledDataset(np.asarray(cols, dtype=float), np.asarray(labels))


class TestUpdateDistances:
    def test_identity_projection(self):
        # two intra-class samples at Euclidean distance 2
        ds = two_class_ds([[0.0, 2.0, 5.0], [0.0, 0.0, 5.0]], [1, 1, 2])
        g = update_distances(np.eye(2), ds, k=1)
        assert g[0][0, 1] == pytest.approx(2.0, abs=1e-15)
        assert g[0][1, 0] == pytest.approx(2.0, abs=1e-15)
        assert g[1].shape == (1, 1)

    def test_null_projection(self):
        ds = two_class_ds(np.random.default_rng(0).normal(size=(3, 6)), [1, 1, 1, 2, 2, 2])
        g = update_distances(np.zeros((3, 2)), ds, k=3)
        assert all(np.all(block == 0.0) for block in g)

    def test_against_naive_double_loop(self):
        rng = np.random.default_rng(5)
        ds = two_class_ds(rng.normal(size=(4, 7)), [1] * 5 + [2] * 2)
        w = rng.normal(size=(4, 3))
        k = 2
        g = update_distances(w, ds, k)[0]
        emb = w.T @ ds.features[:, ds.class_index[0]]
        for j in range(5):
            for m in range(5):
                expected = 0.0 if j == m else k * np.linalg.norm(emb[:, j] - emb[:, m])
                assert abs(g[j, m] - expected) <= 1e-12

    def test_scaled_by_k(self):
        ds = two_class_ds([[0.0, 3.0], [0.0, 4.0]], [1, 1])
        g1 = update_distances(None, ds, k=1)[0]
        g4 = update_distances(None, ds, k=4)[0]
        assert g4[0, 1] == pytest.approx(4 * g1[0, 1])


class TestUpdateConnections:
    def test_line_neighbors(self):
        # class on a line at coordinates 0, 1, 3 with K=1
        ds = two_class_ds([[0.0, 1.0, 3.0]], [1, 1, 1])
        g = update_distances(None, ds, k=1)
        v = update_connections(g, 1)[0]
        assert np.array_equal(v, [[0, 1, 0], [1, 0, 0], [0, 1, 0]])

    def test_k_clipped_to_class_size(self):
        ds = two_class_ds([[0.0, 1.0]], [1, 1])
        g = update_distances(None, ds, k=7)
        v = update_connections(g, 7)[0]
        assert np.array_equal(v, [[0, 1], [1, 0]])
        assert list(k_effective(7, [2, 9])) == [1, 7]

    def test_equidistant_tie_breaks_to_lowest_index(self):
        g = np.ones((3, 3))
        np.fill_diagonal(g, 0.0)
        v = update_connections([g], 1)[0]
        assert np.array_equal(v, [[0, 1, 0], [1, 0, 0], [1, 0, 0]])

    def test_row_sums_equal_k_eff(self):
        rng = np.random.default_rng(2)
        ds = two_class_ds(rng.normal(size=(3, 12)), [1] * 4 + [2] * 8)
        v = update_connections(update_distances(None, ds, 3), 3)
        assert np.all(v[0].sum(axis=1) == 3)
        assert np.all(v[1].sum(axis=1) == 3)
        assert all(np.all(np.diag(block) == 0) for block in v)

    def test_minimizes_selection_objective_by_enumeration(self):
        # optimal V row-wise: sum of selected distances is the enumerated minimum
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = rng.integers(2, 9)
            k = int(rng.integers(1, 4))
            k_eff = min(k, m - 1)
            g = rng.uniform(0.1, 2.0, size=(m, m))
            g = 0.5 * (g + g.T)
            np.fill_diagonal(g, 0.0)
            v = update_connections([g], k)[0]
            for j in range(m):
                chosen = float(g[j][v[j] > 0].sum())
                best = min(
                    sum(g[j, list(sel)])
                    for sel in combinations([i for i in range(m) if i != j], k_eff)
                )
                assert chosen == pytest.approx(best, abs=1e-12)


class TestUpdateAffinity:
    def test_division(self):
        v = [np.array([[0.0, 1.0], [1.0, 0.0]])]
        g = [np.array([[0.0, 0.5], [0.5, 0.0]])]
        s = update_affinity(v, g, k=1)[0]
        assert s[0, 1] == pytest.approx(2.0)

    def test_zero_over_zero_is_zero(self):
        v = [np.zeros((2, 2))]
        g = [np.zeros((2, 2))]
        s = update_affinity(v, g, k=1)[0]
        assert np.all(s == 0.0)

    def test_coincident_guard(self):
        v = [np.array([[0.0, 1.0], [1.0, 0.0]])]
        g = [np.zeros((2, 2))]
        s = update_affinity(v, g, k=1, eps=1e-8)[0]
        assert s[0, 1] == pytest.approx(1e8)

    def test_unconnected_positive_distance(self):
        v = [np.zeros((2, 2))]
        g = [np.array([[0.0, 3.0], [3.0, 0.0]])]
        s = update_affinity(v, g, k=1)[0]
        assert np.all(s == 0.0)


class TestLaplacian:
    def test_empty_graph(self):
        lap = build_laplacian([np.zeros((3, 3))])
        assert np.all(lap.l_blocks[0] == 0.0)

    def test_two_node_graph(self):
        s = np.array([[0.0, 1.0], [1.0, 0.0]])
        lap = build_laplacian([s])
        assert np.array_equal(lap.l_blocks[0], [[1.0, -1.0], [-1.0, 1.0]])

    def test_quadratic_form_oracle(self):
        rng = np.random.default_rng(11)
        s = rng.uniform(size=(8, 8))
        np.fill_diagonal(s, 0.0)
        lap = build_laplacian([s])
        l = lap.l_blocks[0]
        sym = 0.5 * (s + s.T)
        for _ in range(5):
            x = rng.normal(size=8)
            direct = 0.5 * sum(
                sym[j, m] * (x[j] - x[m]) ** 2 for j in range(8) for m in range(8)
            )
            assert x @ l @ x == pytest.approx(direct, abs=1e-10)

    def test_annihilates_constants_and_psd(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            m = rng.integers(2, 10)
            s = rng.uniform(size=(m, m)) * rng.integers(0, 2, size=(m, m))
            np.fill_diagonal(s, 0.0)
            lap = build_laplacian([s])
            l = lap.l_blocks[0]
            assert np.abs(l @ np.ones(m)).max() <= 1e-12
            assert np.allclose(l, l.T)
            assert np.linalg.eigvalsh(l).min() >= -1e-10

    def test_projected_trace_identity(self):
        # Tr(W^T X L X^T W) equals the weighted sum of squared projected distances
        rng = np.random.default_rng(17)
        x = rng.normal(size=(5, 9))
        w = rng.normal(size=(5, 3))
        s = rng.uniform(size=(9, 9))
        np.fill_diagonal(s, 0.0)
        lap = build_laplacian([s])
        lhs = np.trace(w.T @ x @ lap.l_blocks[0] @ x.T @ w)
        emb = w.T @ x
        sym = 0.5 * (s + s.T)
        rhs = 0.5 * sum(
            sym[j, m] * np.linalg.norm(emb[:, j] - emb[:, m]) ** 2
            for j in range(9)
            for m in range(9)
        )
        assert lhs == pytest.approx(rhs, rel=1e-9)


class TestAssembleAndDump:
    def test_assemble_scatters_blocks(self):
        ds = two_class_ds([[0.0, 1.0, 3.0, 4.0]], [1, 2, 1, 2])
        g = update_distances(None, ds, 1)
        dense = assemble_blocks(g, ds.class_index, 4)
        assert dense[0, 2] == pytest.approx(3.0)
        assert dense[1, 3] == pytest.approx(3.0)
        assert dense[0, 1] == 0.0  # across classes

    def test_dump_coo(self, tmp_path):
        ds = two_class_ds([[0.0, 1.0, 3.0, 4.0]], [1, 2, 1, 2])
        v = update_connections(update_distances(None, ds, 1), 1)
        path = tmp_path / "v.csv"
        dump_coo_csv(v, ds.class_index, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "row,col,value"
        assert "0,2,1.0" in lines
        assert len(lines) == 1 + 4
