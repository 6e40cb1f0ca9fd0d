import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from lapgap import deloc, spectra
from lapgap.graphs import centered_laplacian, laplacian, rotate_last_two, sample_gnp, trivial_direction
from lapgap.lcd import LcdParams, lcd_scan


class TestAffineResidual:
    def test_constant(self):
        val, a = deloc.affine_residual([0.3, 0.3, 0.3], [0, 1, 2])
        assert val == pytest.approx(0, abs=1e-15) and a == pytest.approx(0.3)

    def test_two_point(self):
        val, a = deloc.affine_residual([0.0, 1.0], [0, 1])
        assert val == pytest.approx(1 / math.sqrt(2)) and a == 0.5

    def test_golden_section_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            v = rng.standard_normal(30)
            idx = rng.choice(30, size=9, replace=False)
            val, _ = deloc.affine_residual(v, idx)
            res = minimize_scalar(lambda a: np.linalg.norm(v[idx] - a), method="golden", tol=1e-12)
            assert val == pytest.approx(res.fun, abs=1e-10)

    def test_empty(self):
        with pytest.raises(ValueError):
            deloc.affine_residual([1.0], [])


class TestAffineWindow:
    def test_examples(self):
        assert deloc.affine_window_stat(np.eye(4)[0], 2)[0] == 0.0
        assert deloc.affine_window_stat([0.5, 0.1, 0.5, -2.0], 2)[0] == pytest.approx(0, abs=1e-15)
        v = np.arange(1.0, 5.0) / math.sqrt(30)
        assert deloc.affine_window_stat(v, 2)[0] == pytest.approx(1 / math.sqrt(60), abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 7))
    def test_exhaustive(self, seed, n0):
        v = np.random.default_rng(seed).standard_normal(9)
        brute = min(deloc.affine_residual(v, list(c))[0] for c in itertools.combinations(range(9), n0))
        val, idx, _ = deloc.affine_window_stat(v, n0)
        assert val == pytest.approx(brute, abs=1e-12)
        assert deloc.affine_residual(v, idx)[0] == pytest.approx(val, abs=1e-15)

    def test_invariances(self):
        rng = np.random.default_rng(2)
        v = rng.standard_normal(50)
        base = deloc.affine_window_stat(v, 10)[0]
        assert deloc.affine_window_stat(rng.permutation(v), 10)[0] == pytest.approx(base, abs=1e-12)
        assert deloc.affine_window_stat(v + 3.7, 10)[0] == pytest.approx(base, abs=1e-12)

    def test_bounds(self):
        with pytest.raises(ValueError):
            deloc.affine_window_stat([1.0, 2.0], 3)


class TestSpread:
    P = deloc.SpreadParams(0.2, 0.002, 3.0)

    def test_params(self):
        with pytest.raises(ValueError):
            deloc.SpreadParams(0.2, 0.3, 2.0)
        with pytest.raises(ValueError):
            deloc.SpreadParams(0.2, 0.1, 1.0)

    def test_flat_and_spike(self):
        n = 16
        assert deloc.spread_set(np.ones(n), self.P).size == n
        assert deloc.spread_set(np.eye(n)[0], self.P).size == 0

    def test_bulk_eigenvector(self):
        n = 400
        prm = deloc.SpreadParams(0.9, 0.01, 10.0)
        s = spectra.eigh(centered_laplacian(sample_gnp(n, 0.5, 1)))
        for j in (150, 199, 250):
            x = s.eigenvectors[:, j]
            if deloc.satisfies_no_gaps(x, prm):
                assert deloc.spread_hypothesis(x, prm)
                assert deloc.large_coordinate_in_every_set(x, prm)

    def test_claim_by_scan(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.standard_normal(60) * rng.choice([0.01, 1.0], 60, p=[0.3, 0.7])
            if deloc.satisfies_no_gaps(x, self.P):
                assert deloc.large_coordinate_in_every_set(x, self.P)

    def test_spread_gives_lcd_bound(self):
        # a spread vector has LCD at least sqrt(n) / (2C) for small enough gamma
        n = 100
        x = spectra.eigh(centered_laplacian(sample_gnp(n, 0.5, 9))).eigenvectors[:, 40]
        assert deloc.spread_hypothesis(x, self.P)
        r = lcd_scan(x, LcdParams(kappa=n ** (1 / 3), gamma=self.P.lemma_gamma,
                                  theta_max=math.sqrt(n) / (2 * self.P.C)))
        assert not r.found


class TestProfiles:
    def test_sup_norm(self):
        assert np.all(deloc.sup_norm_profile(np.eye(4)) == 1)
        s = spectra.eigh(laplacian(sample_gnp(50, 0.5, 1)))
        assert deloc.sup_norm_profile(s)[0] == pytest.approx(1 / math.sqrt(50))

    def test_bulk_delocalized(self):
        n = 400
        prof = deloc.sup_norm_profile(spectra.eigh(centered_laplacian(sample_gnp(n, 0.5, 2))))
        bulk = prof[n // 4: 3 * n // 4]
        assert np.all(bulk <= 3 * math.sqrt(math.log(n) / n))

    def test_small_coordinates(self):
        assert deloc.small_coordinate_count(np.eye(10)[0], 1) == 9
        assert deloc.small_coordinate_count(np.ones(10) / math.sqrt(10), 1) == 0
        with pytest.raises(ValueError):
            deloc.small_coordinate_count(np.ones(3), 0)

    def test_nontrivial_mask(self):
        v = np.column_stack([np.ones(4) / 2, [1, -1, 0, 0] / np.sqrt(2)])
        assert deloc.nontrivial_mask(v, np.ones(4) / 2).tolist() == [False, True]


class TestLevelSets:
    def test_intervals_partition(self):
        for n, lam in [(100, 0.2), (97, 0.3), (400, 0.125)]:
            iv = deloc.level_intervals(n, lam)
            assert iv[0][0] == 0 and iv[-1][1] == n
            assert all(a[1] == b[0] for a, b in zip(iv, iv[1:]))
            k = math.floor(lam * n / 4)
            assert all(k <= b - a < 2 * k for a, b in iv[1:])

    def test_flat_vector_all_sparse(self):
        n = 200
        d = deloc.level_set_decomposition(np.ones(n) / math.sqrt(n), deloc.LevelSetParams(lam=0.2))
        assert not d.mixed_intervals
        assert all(s.shift == pytest.approx(1.0) for s in d.sparse_intervals)
        assert [s.round for s in d.sparse_intervals] == list(range(d.i0))

    def test_random_signs(self):
        n = 400
        lam = 0.2
        v = np.random.default_rng(0).choice([-1.0, 1.0], n) / math.sqrt(n)
        d = deloc.level_set_decomposition(v, deloc.LevelSetParams(lam=lam))
        assert d.i0 <= 8 / lam
        for s in d.sparse_intervals:
            assert s.residual <= d.params["delta"] * d.params["t0"] ** s.round
            a, b = s.interval
            assert len(s.kept) >= (b - a) - d.params["alpha"] * lam * n

    def test_trimmed_exhaustive(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(8)
        val, keep = deloc.trimmed_residual(x, 0.2, 2)
        brute = min(np.linalg.norm(x[list(c)] - 0.2) for c in itertools.combinations(range(8), 6))
        assert val == pytest.approx(brute) and keep.sum() == 6

    def test_rejects_meaningless(self):
        with pytest.raises(ValueError):
            deloc.level_set_decomposition(np.ones(100), deloc.LevelSetParams(lam=0.2, t0=10.0))


class TestApproxEigvec:
    def setup_method(self):
        n = 100
        self.n = n
        self.m = rotate_last_two(centered_laplacian(sample_gnp(n, 0.5, 3)))
        self.u = trivial_direction(n, rotated=True)
        self.D = math.ceil(n ** 2.5)

    def test_rounded_eigenvector_passes(self):
        s = spectra.eigh(self.m)
        j = int(np.flatnonzero(deloc.nontrivial_mask(s.eigenvectors, self.u))[40])
        v = deloc.round_to_grid(s.eigenvectors[:, j], self.D)
        rec = deloc.approx_eigvec_check(self.m, v, s.eigenvalues[j], self.D, direction=self.u)
        assert rec.passed

    def test_flat_vector_fails_sum(self):
        v = deloc.round_to_grid(np.ones(self.n) / math.sqrt(self.n), self.D)
        rec = deloc.approx_eigvec_check(self.m, v, 0.0, self.D)
        assert not rec.sum_ok

    def test_zero_fails_norm(self):
        rec = deloc.approx_eigvec_check(self.m, np.zeros(self.n), 0.0, self.D)
        assert not rec.norm_ok and rec.residual == 0

    def test_off_grid_rejected(self):
        with pytest.raises(ValueError):
            deloc.approx_eigvec_check(self.m, np.full(self.n, 1 / 3), 0.0, 7)
