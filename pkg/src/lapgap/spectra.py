"""Eigendecompositions, gap statistics, spectral distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy import stats
from scipy.integrate import cumulative_trapezoid

from lapgap.graphs import MatrixInstance, centered_laplacian, laplacian, sample_gnp
from lapgap.rng import derive_seed, stream

MAX_N = 4096
TAU_SIMPLE = 1e-10


class EigensolverError(RuntimeError):
    pass


class FreeConvolutionError(RuntimeError):
    pass


def _as_array(m) -> np.ndarray:
    return m.data if isinstance(m, MatrixInstance) else np.asarray(m, dtype=np.float64)


def canonicalize(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Flip columns so the first coordinate above ``tol`` in modulus is positive."""
    v = np.array(vectors, dtype=np.float64, copy=True)
    single = v.ndim == 1
    if single:
        v = v[:, None]
    big = np.abs(v) > tol
    first = np.argmax(big, axis=0)
    signs = np.sign(v[first, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    v *= signs
    return v[:, 0] if single else v


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    orthogonality_defect: float

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


def eigh(m, max_n: int = MAX_N, tol: float = 1e-10) -> SpectralDecomposition:
    """Full symmetric eigendecomposition with residual diagnostics.

    Eigenvalues ascend; eigenvector signs are canonicalized.  Raises
    ``EigensolverError`` when the residual or orthogonality bound is missed.
    """
    a = _as_array(m)
    n = a.shape[0]
    if n > max_n:
        raise ValueError(f"n={n} exceeds the configured maximum {max_n}")
    if not np.array_equal(a, a.T):
        raise ValueError("eigh requires an exactly symmetric matrix")
    w, v = scipy.linalg.eigh(a, driver="evd")
    v = canonicalize(v)
    resid = float(np.max(np.linalg.norm(a @ v - v * w, axis=0))) if n else 0.0
    defect = float(np.max(np.abs(v.T @ v - np.eye(n)))) if n else 0.0
    norm = float(np.max(np.abs(w))) if n else 0.0
    if resid > tol * (1.0 + norm) or defect > tol:
        raise EigensolverError(
            f"decomposition misses tolerance: residual={resid:.3e} "
            f"(limit {tol * (1.0 + norm):.3e}), orthogonality defect={defect:.3e}"
        )
    return SpectralDecomposition(w, v, resid, defect)


def eigvalsh(m) -> np.ndarray:
    """Ascending eigenvalues only (no diagnostics)."""
    return scipy.linalg.eigvalsh(_as_array(m), driver="evd")


def singular_values(a) -> np.ndarray:
    """Singular values in descending order."""
    return scipy.linalg.svdvals(_as_array(a))


def operator_norm(m) -> float:
    a = _as_array(m)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(eigvalsh(a))))


@dataclass(frozen=True)
class GapReport:
    gaps: np.ndarray
    min_gap: float
    argmin: int          # 0-based: min gap is eigenvalues[argmin + 1] - eigenvalues[argmin]
    simple: bool
    tolerance: float


def gaps(s: SpectralDecomposition | np.ndarray, tau: float = TAU_SIMPLE) -> GapReport:
    lam = s.eigenvalues if isinstance(s, SpectralDecomposition) else np.asarray(s, dtype=float)
    if lam.size < 2:
        raise ValueError("gaps need at least two eigenvalues")
    d = np.diff(lam)
    k = int(np.argmin(d))
    tol = tau * (1.0 + float(np.max(np.abs(lam))))
    return GapReport(d, float(d[k]), k, bool(d[k] > tol), tol)


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(level, method="wilson")
    return float(ci.low), float(ci.high)


# --- Monte Carlo gap statistics ---------------------------------------------

def gap_trial(n: int, p: float, index: int, seed: int) -> float:
    """sqrt(n) * (lambda_{index+1} - lambda_index) of L for one sample (1-based index)."""
    lam = eigvalsh(laplacian(sample_gnp(n, p, seed)))
    return float((lam[index] - lam[index - 1]) * math.sqrt(n))


@dataclass(frozen=True)
class GapCurve:
    rows: list[tuple[float, float, float, float, int]]   # delta, p_hat, ci_lo, ci_hi, trials
    samples: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r[1] / r[0] for r in self.rows])


def curve_from_gaps(scaled_gaps, deltas) -> GapCurve:
    g = np.asarray(scaled_gaps, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    if np.any(deltas < 0) or np.any(np.diff(deltas) <= 0):
        raise ValueError("delta grid must be nonnegative and strictly ascending")
    rows = []
    for d in deltas:
        k = int(np.count_nonzero(g <= d))
        lo, hi = wilson_interval(k, g.size)
        rows.append((float(d), k / g.size, lo, hi, int(g.size)))
    return GapCurve(rows, g)


def gap_probability_curve(n: int, p: float, index: int, deltas, trials: int, seed: int) -> GapCurve:
    """Empirical P(delta_index <= delta / sqrt(n)) over ``trials`` samples.

    Trial t uses the graph stream ``derive_seed(seed, t)``.
    """
    if not 1 <= index <= n - 1:
        raise ValueError("index must lie in 1..n-1")
    if trials < 100:
        raise ValueError("need at least 100 trials")
    g = [gap_trial(n, p, index, derive_seed(seed, t)) for t in range(trials)]
    return curve_from_gaps(g, deltas)


@dataclass(frozen=True)
class ScalingFit:
    rows: list[tuple[int, float, float, float]]   # n, median, q25, q75
    slope: float
    intercept: float
    slope_ci: tuple[float, float]


def loglog_fit(ns, values) -> tuple[float, float]:
    slope, intercept = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)
    return float(slope), float(intercept)


def fit_min_gap_scaling(samples: dict[int, np.ndarray], seed: int = 0, n_boot: int = 1000) -> ScalingFit:
    """Least-squares slope of log(median min gap) on log n, with bootstrap CI."""
    ns = sorted(samples)
    if len(ns) < 3:
        raise ValueError("need at least three distinct n")
    rows = []
    for n in ns:
        x = np.asarray(samples[n], dtype=float)
        q25, med, q75 = np.quantile(x, [0.25, 0.5, 0.75])
        rows.append((int(n), float(med), float(q25), float(q75)))
    slope, intercept = loglog_fit(ns, [r[1] for r in rows])
    rng = np.random.default_rng(seed)
    boot = np.empty(n_boot)
    for b in range(n_boot):
        meds = [np.median(rng.choice(samples[n], size=len(samples[n]))) for n in ns]
        boot[b] = loglog_fit(ns, meds)[0]
    lo, hi = np.quantile(boot, [0.025, 0.975])
    return ScalingFit(rows, slope, intercept, (float(lo), float(hi)))


def min_gap_trial(n: int, p: float, seed: int) -> float:
    return float(np.min(np.diff(eigvalsh(laplacian(sample_gnp(n, p, seed))))))


def min_gap_scaling(ns, p: float, trials: int, seed: int) -> ScalingFit:
    samples = {
        int(n): np.array([min_gap_trial(int(n), p, derive_seed(seed, k, t)) for t in range(trials)])
        for k, n in enumerate(ns)
    }
    return fit_min_gap_scaling(samples, seed=seed)


# --- spectral distributions ---------------------------------------------------

@dataclass(frozen=True)
class EsdHistogram:
    normalization: float
    edges: np.ndarray
    counts: np.ndarray
    trials: int


def esd_histogram(spectra, normalization: float, bins=100, range=None) -> EsdHistogram:
    """Pool eigenvalues of several spectra, divide by ``normalization``, bin them.

    ``spectra`` holds decompositions or eigenvalue arrays.  Values outside an
    explicit ``range`` are clipped into the end bins so counts always total
    n * trials.
    """
    if normalization <= 0:
        raise ValueError("normalization must be positive")
    arrays = [s.eigenvalues if isinstance(s, SpectralDecomposition) else np.asarray(s, float)
              for s in spectra]
    x = np.concatenate(arrays) / normalization
    if range is not None:
        x = np.clip(x, range[0], range[1])
    counts, edges = np.histogram(x, bins=bins, range=range)
    return EsdHistogram(float(normalization), edges, counts, len(arrays))


def centered_esd_trial(n: int, p: float, seed: int) -> np.ndarray:
    """Eigenvalues of L-bar / sqrt(n p (1-p)) for one sample."""
    return eigvalsh(centered_laplacian(sample_gnp(n, p, seed))) / math.sqrt(n * p * (1 - p))


def _gauss_nodes(nodes: int, support: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = x * support
    w = w * support * np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)
    return x, w


def free_conv_density(energies, eta: float = 1e-3, nodes: int = 2001, support: float = 8.0,
                      base: str = "gaussian", damping: float = 0.5, tol: float = 1e-10,
                      max_iter: int = 100_000) -> np.ndarray:
    """Density of the free convolution of the semicircle law with ``base``.

    Solves m = integral dmu(x) / (x - z - m) at z = E + i eta by damped
    fixed-point iteration, with mu the standard Gaussian (Gauss-Legendre
    nodes on [-support, support]) or the point mass at 0 (``base="point"``),
    and returns Im(m) / pi.
    """
    if not 0.0 < eta <= 0.1:
        raise ValueError("eta must lie in (0, 0.1]")
    if base == "gaussian":
        x, w = _gauss_nodes(nodes, support)
    elif base == "point":
        x, w = np.zeros(1), np.ones(1)
    else:
        raise ValueError(f"unknown base measure {base!r}")
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    z = e + 1j * eta
    m = np.full(e.shape, 1j, dtype=complex)
    active = np.ones(e.shape, dtype=bool)
    resid = np.full(e.shape, np.inf)
    for _ in range(max_iter):
        za, ma = z[active], m[active]
        f = (w[None, :] / (x[None, :] - za[:, None] - ma[:, None])).sum(axis=1)
        r = np.abs(f - ma)
        m[active] = (1.0 - damping) * ma + damping * f
        resid[active] = r
        done = r < tol
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
    else:
        k = int(np.flatnonzero(active)[0])
        raise FreeConvolutionError(
            f"fixed point did not converge at E={e[k]!r}: last residual {resid[k]:.3e}"
        )
    return np.maximum(m.imag, 0.0) / math.pi


def density_cdf(grid, density) -> np.ndarray:
    """Cumulative trapezoid integral of ``density`` on ``grid`` normalized to end at 1."""
    c = cumulative_trapezoid(density, grid, initial=0.0)
    return c / c[-1]


def ks_to_density(samples, grid, density) -> float:
    """Kolmogorov distance between the empirical law of ``samples`` and a tabulated density."""
    s = np.sort(np.asarray(samples, dtype=float))
    cdf = density_cdf(grid, density)
    f = np.interp(s, grid, cdf, left=0.0, right=1.0)
    k = np.arange(1, s.size + 1) / s.size
    return float(max(np.max(k - f), np.max(f - (k - 1.0 / s.size))))


def free_conv_oracle_trial(size: int, window: float, seed: int) -> int:
    """Count eigenvalues in [-window, window] of GOE(size) + independent N(0,1) diagonal.

    The two summands are asymptotically free, so the pooled density of such
    counts estimates the free convolution at 0 independently of the
    fixed-point solver.
    """
    rng = stream(seed)
    g = rng.standard_normal((size, size))
    w = (g + g.T) / math.sqrt(2.0 * size)
    w[np.diag_indices(size)] = rng.standard_normal(size)
    return int(np.count_nonzero(np.abs(eigvalsh(w)) <= window))
