import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lapgap import spectra
from lapgap.graphs import centered_laplacian, sample_gnp
from lapgap.lcd import (LcdParams, combine_max, combine_min, dist_to_lattice, lcd_scan,
                        partitioned_lcd, shift_grid, subvector_lcd_relation)

PHI = (1 + math.sqrt(5)) / 2


def brute_first_violation(x, kappa, gamma, theta_max, step=1e-5):
    """Dense-grid oracle: first theta where dist < min(gamma theta, kappa)."""
    x = np.asarray(x, float) / np.linalg.norm(x)
    th = np.arange(step, theta_max, step)
    for chunk in np.array_split(th, max(1, th.size // 20000)):
        d = dist_to_lattice(chunk, x)
        bad = np.flatnonzero(d < np.minimum(gamma * chunk, kappa))
        if bad.size:
            return float(chunk[bad[0]])
    return None


def bulk_vector(n, seed, j=None):
    v = spectra.eigh(centered_laplacian(sample_gnp(n, 0.5, seed))).eigenvectors
    return v[:, n // 3 if j is None else j]


class TestDistance:
    def test_examples(self):
        assert dist_to_lattice(0.0, np.array([0.3, 0.9])) == 0.0
        n = 9
        assert dist_to_lattice(3.0, np.ones(n) / 3) == pytest.approx(0, abs=1e-14)
        assert dist_to_lattice(1.0, np.array([0.3, 0.4])) == pytest.approx(0.5)

    def test_vectorized(self):
        x = np.array([0.6, 0.8])
        th = np.array([0.5, 1.0, 2.5])
        assert np.allclose(dist_to_lattice(th, x), [dist_to_lattice(t, x) for t in th])


class TestParams:
    @pytest.mark.parametrize("kw", [dict(kappa=0, gamma=0.1, theta_max=5),
                                    dict(kappa=1, gamma=1.0, theta_max=5),
                                    dict(kappa=1, gamma=0.1, theta_max=-1)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            LcdParams(**kw)

    def test_scan_rejects(self):
        with pytest.raises(ValueError):
            lcd_scan(np.zeros(3), LcdParams(1, 0.1, 5))
        with pytest.raises(ValueError):
            lcd_scan(np.ones(3), LcdParams(1, 0.1, 5, h=0.25))


class TestClosedForms:
    @pytest.mark.parametrize("gamma", [0.05, 0.1, 0.5])
    def test_basis_vector(self, gamma):
        r = lcd_scan(np.eye(6)[0], LcdParams(kappa=1.0, gamma=gamma, theta_max=10))
        assert r.found
        assert r.theta == pytest.approx(1 / (1 + gamma), abs=1e-8)

    @pytest.mark.parametrize("n, kappa, gamma", [(16, 1.0, 0.1), (25, 3.0, 0.1), (100, 2.0, 0.3)])
    def test_flat_vector(self, n, kappa, gamma):
        r = lcd_scan(np.ones(n), LcdParams(kappa=kappa, gamma=gamma, theta_max=2 * n))
        want = math.sqrt(n) * max(1 / (1 + gamma), 1 - kappa / math.sqrt(n))
        assert r.found
        assert r.theta == pytest.approx(want, abs=1e-7)

    def test_golden_ratio(self):
        # the quoted "no violation below 1000" is false: the scan and the
        # brute-force oracle both locate a witness near 2.15
        x = np.array([1.0, PHI])
        r = lcd_scan(x, LcdParams(kappa=10.0, gamma=0.1, theta_max=1e3))
        assert r.found
        oracle = brute_first_violation(x, 10.0, 0.1, 10.0)
        assert r.theta == pytest.approx(oracle, abs=2e-5)
        u = x / np.linalg.norm(x)
        assert dist_to_lattice(r.theta, u) < min(0.1 * r.theta, 10.0)


class TestScan:
    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6), st.integers(2, 6))
    def test_matches_brute_force(self, seed, n):
        x = np.random.default_rng(seed).standard_normal(n)
        r = lcd_scan(x, LcdParams(kappa=1.0, gamma=0.2, theta_max=8.0))
        oracle = brute_first_violation(x, 1.0, 0.2, 8.0, step=2e-5)
        if oracle is None:
            assert not r.found
        else:
            assert r.found and r.theta <= oracle + 2e-5
            assert r.certified_lower <= r.theta

    def test_witness_reverified(self):
        x = bulk_vector(50, 1)
        r = lcd_scan(x, LcdParams(kappa=50 ** (1 / 3), gamma=0.1, theta_max=50.0))
        assert r.found
        u = x / np.linalg.norm(x)
        assert r.distance == pytest.approx(dist_to_lattice(r.theta, u))
        assert r.distance < min(0.1 * r.theta * np.linalg.norm(u), r.kappa)

    def test_lower_bound_certificate(self):
        r = lcd_scan(np.eye(4)[0], LcdParams(kappa=1.0, gamma=0.1, theta_max=0.5))
        assert r.kind == "lower_bound" and r.theta == 0.5

    def test_invariances(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(12)
        p = LcdParams(kappa=2.0, gamma=0.1, theta_max=30.0)
        base = lcd_scan(x, p)
        for y in (3.5 * x, rng.permutation(x), x * rng.choice([-1, 1], 12)):
            r = lcd_scan(y, p)
            assert r.kind == base.kind
            assert r.theta == pytest.approx(base.theta, abs=1e-8)

    def test_gamma_monotone(self):
        x = bulk_vector(40, 2)
        lo = lcd_scan(x, LcdParams(2.0, 0.05, 40.0))
        hi = lcd_scan(x, LcdParams(2.0, 0.2, 40.0))
        if lo.found and hi.found:
            assert lo.theta >= hi.theta - 1e-9

    def test_to_dict_keys(self):
        d = lcd_scan(np.ones(4), LcdParams(1, 0.1, 5)).to_dict()
        assert set(d) == {"kind", "theta", "distance", "kappa", "gamma", "theta_max", "step",
                          "shifts_tested"}


class TestCombine:
    def test_min_prefers_lower_bound_only_when_smaller(self):
        a = lcd_scan(np.eye(3)[0], LcdParams(1.0, 0.1, 10))       # found near 0.909
        b = lcd_scan(np.eye(3)[0], LcdParams(1.0, 0.1, 0.5))      # lower bound 0.5
        assert combine_min([a, b]) is b
        top = combine_max([a, b])
        assert top.kind == "lower_bound" and top.theta == a.theta

    def test_max_with_lower_bound_is_lower_bound(self):
        a = lcd_scan(np.eye(3)[0], LcdParams(1.0, 0.1, 0.5))
        b = lcd_scan(np.eye(3)[0], LcdParams(1.0, 0.1, 0.6))
        assert combine_max([a, b]).kind == "lower_bound"


class TestPartitioned:
    def test_single_part_zero_shift(self):
        x = bulk_vector(30, 4)
        p = partitioned_lcd(x, 1, 2.0, 0.1, [0.0], 30.0)
        r = lcd_scan(x, LcdParams(2.0, 0.1, 30.0))
        assert p.result.kind == r.kind and p.value == pytest.approx(r.theta)

    def test_constant_vector_flags_shift(self):
        m = 16
        v = np.full(m, 0.25)
        p = partitioned_lcd(v, 1, 1.0, 0.1, [0.25, 0.0, 0.1], 40.0)
        assert p.degenerate == [(0, 0.25)]
        want = math.sqrt(m) * max(1 / 1.1, 1 - 1.0 / math.sqrt(m))
        assert p.value == pytest.approx(want, abs=1e-7)

    def test_bulk_restriction_capped_by_flat_direction(self):
        # shifts reach log^2 n / sqrt n, far above the coordinate scale, so the
        # largest shift leaves a nearly flat part whose LCD is about sqrt(m) / (1 + gamma)
        n, k, gamma = 200, 2, 0.1
        v = bulk_vector(n, 5)[: n // 2]
        m = v.size // k
        p = partitioned_lcd(v, k, n ** (1 / 3), gamma, shift_grid(n, count=4), math.sqrt(n))
        assert p.shifts_tested == 4 and p.subsampled
        assert p.result.found
        assert p.value == pytest.approx(math.sqrt(m) / (1 + gamma), rel=0.05)
        assert p.value < math.sqrt(n)

    def test_shift_grid(self):
        g = shift_grid(100, count=64)
        assert g.size <= 64 and np.all(np.abs(g) <= math.log(100) ** 2 / 10 + 1e-12)
        assert np.allclose(g * 100 ** 3, np.round(g * 100 ** 3))


class TestSubvector:
    def test_full_subvector(self):
        x = bulk_vector(30, 6)
        rel = subvector_lcd_relation(x, np.arange(30), 2.0, 0.1, 30.0)
        assert rel.scale == pytest.approx(1.0)
        assert rel.lhs.theta == pytest.approx(rel.rhs.theta, abs=1e-7)
        assert rel.holds

    def test_flat_half(self):
        n = 36
        rel = subvector_lcd_relation(np.ones(n), np.arange(n // 2), 1.0, 0.1, 4.0 * n)
        assert rel.conclusive and rel.holds

    def test_random_pairs(self):
        n = 100
        rng = np.random.default_rng(8)
        for t in range(8):
            x = bulk_vector(n, 100 + t, j=int(rng.integers(20, 80)))
            sub = rng.choice(n, size=70, replace=False)
            rel = subvector_lcd_relation(x, sub, n ** (1 / 3), 0.1, 15.0)
            if rel.conclusive:
                assert rel.holds

    def test_gamma_ceiling(self):
        with pytest.raises(ValueError):
            subvector_lcd_relation(np.ones(100), [0], 1.0, 0.5, 10.0)
