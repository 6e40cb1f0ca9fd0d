import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lapgap import rng as rngmod
from lapgap.graphs import (GraphFormatError, GraphSample, MatrixInstance, Role, centered_laplacian,
                           expected_laplacian, laplacian, load_graph, rotate_last_two, sample_gnp,
                           store_graph, switch_neighbors, switchable_set, trivial_direction)
from lapgap.spectra import eigvalsh


def path3():
    adj = np.zeros((3, 3), dtype=bool)
    adj[0, 1] = adj[1, 0] = adj[1, 2] = adj[2, 1] = True
    return GraphSample.from_adjacency(adj, 0.5)


class TestStreams:
    def test_same_path_same_stream(self):
        a = rngmod.stream(5, 1, 2).random(4)
        b = rngmod.stream(5, 1, 2).random(4)
        assert np.array_equal(a, b)

    def test_paths_are_distinct(self):
        assert rngmod.derive_seed(5, 1) != rngmod.derive_seed(5, 2)
        assert rngmod.derive_seed(5, 1) != rngmod.derive_seed(6, 1)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            rngmod.stream(-1)


class TestSampling:
    def test_empty_graph(self):
        g = sample_gnp(4, 0.0, 3, allow_degenerate=True)
        assert g.edge_count == 0
        assert np.all(g.degrees == 0)

    def test_complete_graph(self):
        g = sample_gnp(3, 1.0, 9, allow_degenerate=True)
        assert list(g.degrees) == [2, 2, 2]

    def test_edge_count_in_binomial_range(self):
        assert 2197 <= sample_gnp(100, 0.5, 7).edge_count <= 2753

    def test_degenerate_needs_flag(self):
        with pytest.raises(ValueError):
            sample_gnp(5, 1.0)

    @pytest.mark.parametrize("n, p", [(1, 0.5), (5, -0.1), (5, 1.5)])
    def test_rejects_bad_input(self, n, p):
        with pytest.raises(ValueError):
            sample_gnp(n, p, allow_degenerate=True)

    def test_reproducible(self):
        assert sample_gnp(50, 0.3, 11) == sample_gnp(50, 0.3, 11)
        assert sample_gnp(50, 0.3, 11) != sample_gnp(50, 0.3, 12)


class TestLaplacians:
    def test_k3(self):
        L = laplacian(sample_gnp(3, 1.0, allow_degenerate=True))
        assert np.array_equal(L.data, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
        assert np.allclose(eigvalsh(L), [0, 3, 3], atol=1e-12)

    def test_path(self):
        L = laplacian(path3())
        assert np.array_equal(L.data, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
        assert np.allclose(eigvalsh(L), [0, 1, 3], atol=1e-12)

    def test_expected(self):
        assert np.array_equal(expected_laplacian(3, 1.0).data, 3 * np.eye(3) - np.ones((3, 3)))
        assert np.array_equal(expected_laplacian(2, 0.5).data, [[0.5, -0.5], [-0.5, 0.5]])
        lam = eigvalsh(expected_laplacian(20, 0.3))
        assert np.allclose(lam, [0.0] + [6.0] * 19, atol=1e-12)

    def test_centered_fixtures_vanish(self):
        for p, n in [(1.0, 3), (0.0, 4)]:
            g = sample_gnp(n, p, allow_degenerate=True)
            assert np.array_equal(centered_laplacian(g).data, np.zeros((n, n)))

    def test_decomposition_exact(self):
        g = sample_gnp(30, 0.4, 2)
        total = centered_laplacian(g).data + expected_laplacian(30, 0.4).data
        assert np.array_equal(total, laplacian(g).data)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 40), st.floats(0.05, 0.95), st.integers(0, 2**32))
    def test_row_sums_exactly_zero(self, n, p, seed):
        L = laplacian(sample_gnp(n, p, seed))
        assert np.all(L.data.sum(axis=1) == 0)

    def test_role_validation(self):
        bad = np.array([[1.0, -2.0], [-2.0, 1.0]])
        with pytest.raises(ValueError):
            MatrixInstance(bad, Role.LAPLACIAN)
        with pytest.raises(ValueError):
            MatrixInstance(np.array([[0.0, 1.0], [0.0, 0.0]]), Role.GENERAL)


class TestRotation:
    def test_diagonal_spectrum(self):
        m = MatrixInstance(np.diag([1.0, 2.0, 3.0]), Role.GENERAL)
        assert np.allclose(eigvalsh(rotate_last_two(m)), [1, 2, 3], atol=1e-14)

    def test_equal_last_rows(self):
        a = np.array([[4.0, 1.0, 1.0], [1.0, 2.0, 2.0], [1.0, 2.0, 2.0]])
        out = rotate_last_two(MatrixInstance(a, Role.GENERAL)).data
        assert np.allclose(out[0, 1], np.sqrt(2.0) * a[0, 1])
        assert abs(out[0, 2]) < 1e-15

    def test_inverse_recovers(self):
        m = centered_laplacian(sample_gnp(25, 0.5, 4))
        back = rotate_last_two(rotate_last_two(m), inverse=True)
        assert np.max(np.abs(back.data - m.data)) <= 1e-12
        assert rotate_last_two(m).role is Role.ROTATED_CENTERED

    def test_rotated_null_direction(self):
        m = rotate_last_two(centered_laplacian(sample_gnp(30, 0.5, 1)))
        u = trivial_direction(30, rotated=True)
        assert np.linalg.norm(m.data @ u) < 1e-12

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            rotate_last_two(MatrixInstance(np.eye(2), Role.GENERAL))


class TestSwitching:
    def test_common_neighbors_untouched(self):
        g = sample_gnp(5, 1.0, allow_degenerate=True)
        assert switchable_set(g, 3, 4).size == 0
        assert switch_neighbors(g, 3, 4).adjacency.tolist() == g.adjacency.tolist()

    def test_invariants(self):
        g = sample_gnp(40, 0.5, 8)
        i, j = 38, 39
        h = switch_neighbors(g, i, j)
        a, b = g.adjacency, h.adjacency
        assert h.generation == g.generation + 1
        assert g.degrees[i] + g.degrees[j] == h.degrees[i] + h.degrees[j]
        assert a[i, j] == b[i, j]
        rest = np.setdiff1d(np.arange(40), [i, j])
        assert np.array_equal(a[np.ix_(rest, rest)], b[np.ix_(rest, rest)])
        L = laplacian(h).data
        off = L[~np.eye(40, dtype=bool)]
        assert set(np.unique(off)) <= {0.0, -1.0}

    def test_fair_coin(self):
        adj = np.zeros((3, 3), dtype=bool)
        adj[0, 1] = adj[1, 0] = True
        g = GraphSample.from_adjacency(adj, 0.5, seed=3)
        gen = rngmod.stream(3, 99)
        hits = sum(switch_neighbors(g, 1, 2, rng=gen).adjacency[0, 1] for _ in range(100_000))
        assert abs(hits / 100_000 - 0.5) <= 0.01

    def test_switch_set_size(self):
        # |I| ~ Bin(n - 2, 2p(1-p)); the band is centred there
        n = 200
        sizes = np.array([switchable_set(sample_gnp(n, 0.5, s)).size for s in range(300)])
        centre = (n - 2) * 0.5
        assert np.mean(np.abs(sizes - centre) <= n / 8) >= 0.999

    def test_rejects_same_vertex(self):
        with pytest.raises(ValueError):
            switch_neighbors(sample_gnp(5, 0.5), 2, 2)


class TestGraphFiles:
    def test_round_trip(self, tmp_path):
        g = sample_gnp(3, 1.0, 5, allow_degenerate=True)
        store_graph(g, tmp_path / "k3.graph")
        assert load_graph(tmp_path / "k3.graph") == g

    def test_undirected(self, tmp_path):
        f = tmp_path / "one.graph"
        f.write_text("3 1 0.5 0 0\n1 0\n")
        g = load_graph(f)
        assert g.adjacency[0, 1] and g.adjacency[1, 0]

    def test_bad_endpoint(self, tmp_path):
        f = tmp_path / "bad.graph"
        f.write_text("3 1 0.5 0 0\n0 5\n")
        with pytest.raises(GraphFormatError) as err:
            load_graph(f)
        assert err.value.lineno == 2
