import math

import numpy as np
import pytest

from lapgap import qwalk
from lapgap.graphs import laplacian, sample_gnp
from lapgap.rng import stream
from lapgap.spectra import eigh


def spectrum(n, p, seed=0):
    return eigh(laplacian(sample_gnp(n, p, seed, allow_degenerate=True)))


K2 = spectrum(2, 1.0)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            qwalk.WalkConfig(np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            qwalk.WalkConfig.at_vertex(3, 0, gamma=0.0)
        with pytest.raises(ValueError):
            qwalk.WalkConfig.at_vertex(3, 0, T=-1.0)


class TestEvolve:
    def test_time_zero(self):
        cfg = qwalk.WalkConfig.at_vertex(2, 0)
        assert np.allclose(qwalk.evolve(K2, cfg, 0.0), cfg.psi0, atol=1e-15)

    def test_empty_graph(self):
        s = spectrum(4, 0.0)
        psi = np.array([0.5, 0.5j, -0.5, 0.5])
        assert np.allclose(qwalk.evolve(s, qwalk.WalkConfig(psi), 7.3), psi)

    @pytest.mark.parametrize("t", [0.3, 1.0, math.pi / 2, 4.2])
    def test_k2_closed_form(self, t):
        amp = qwalk.evolve(K2, qwalk.WalkConfig.at_vertex(2, 0), t)
        assert abs(amp[1] - 1j * np.exp(-1j * t) * np.sin(t)) < 1e-10
        assert abs(amp[0] - np.exp(-1j * t) * np.cos(t)) < 1e-10

    def test_unitarity(self):
        s = spectrum(50, 0.5, 3)
        cfg = qwalk.WalkConfig.at_vertex(50, 0)
        for t in (0.1, 10.0, 1000.0):
            assert abs(np.linalg.norm(qwalk.evolve(s, cfg, t)) - 1) < 1e-12


class TestDistributions:
    def test_kernel(self):
        assert qwalk.kernel(np.array([0.0]), 1.0, 5.0)[0] == 1.0
        x = np.array([1e-7, 1e-3, 2.0])
        direct = (1 - np.exp(-1j * x)) / (1j * x)
        assert np.allclose(qwalk.kernel(x, 1.0, 1.0), direct, atol=1e-12)

    def test_k2_limit(self):
        cfg = qwalk.WalkConfig.at_vertex(2, 0, T=1e6)
        assert np.allclose(qwalk.limiting_distribution(K2, cfg), [0.5, 0.5])
        assert np.allclose(qwalk.time_avg_distribution(K2, cfg), [0.5, 0.5], atol=1e-5)

    def test_empty_graph(self):
        s = spectrum(3, 0.0)
        psi = np.array([0.6, 0.0, 0.8])
        assert np.allclose(qwalk.time_avg_distribution(s, qwalk.WalkConfig(psi, T=3.0)), psi ** 2)

    def test_eigenvector_start(self):
        s = spectrum(12, 0.5, 1)
        cfg = qwalk.WalkConfig(s.eigenvectors[:, 4].astype(complex), T=5.0)
        assert np.allclose(qwalk.limiting_distribution(s, cfg), s.eigenvectors[:, 4] ** 2)
        rep = qwalk.discrepancy(s, cfg)
        assert rep.discrepancy < 1e-12 and rep.holds

    def test_degenerate_cluster(self):
        s = spectrum(3, 1.0)
        cfg = qwalk.WalkConfig.at_vertex(3, 0, T=1e6)
        p_inf = qwalk.limiting_distribution(s, cfg)
        assert np.allclose(p_inf, qwalk.time_avg_distribution(s, cfg), atol=1e-4)
        assert np.allclose(p_inf, [5 / 9, 2 / 9, 2 / 9])
        assert qwalk.discrepancy(s, cfg).bound is None

    def test_quadrature_oracle(self):
        gen = stream(5)
        for j in range(3):
            s = spectrum(20, 0.5, 10 + j)
            psi = gen.standard_normal(20) + 1j * gen.standard_normal(20)
            cfg = qwalk.WalkConfig(psi / np.linalg.norm(psi), T=10.0)
            err = np.max(np.abs(qwalk.time_avg_distribution(s, cfg) - qwalk.quadrature_distribution(s, cfg)))
            assert err < 1e-6

    def test_clusters(self):
        groups = qwalk.eigen_clusters([0.0, 1.0, 1.0 + 1e-12, 2.0])
        assert [g.tolist() for g in groups] == [[0], [1, 2], [3]]


class TestDiscrepancy:
    def test_k2_large_T(self):
        rep = qwalk.discrepancy(K2, qwalk.WalkConfig.at_vertex(2, 0, T=1e4))
        assert rep.discrepancy < 1e-3 and rep.bound < 1e-3 and rep.holds

    def test_bound_includes_gamma(self):
        a = qwalk.gap_bound(K2, qwalk.WalkConfig.at_vertex(2, 0, gamma=1.0, T=10.0))
        b = qwalk.gap_bound(K2, qwalk.WalkConfig.at_vertex(2, 0, gamma=2.0, T=10.0))
        assert b == pytest.approx(a / 2)

    def test_random_graphs(self):
        for t in range(5):
            s = spectrum(50, 0.5, t)
            for T in (10.0, 100.0, 1000.0):
                rep = qwalk.discrepancy(s, qwalk.WalkConfig.at_vertex(50, 0, T=T))
                assert rep.holds
                assert 0 <= rep.ratio <= 1

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            qwalk.evolve(K2, qwalk.WalkConfig.at_vertex(3, 0), 1.0)
