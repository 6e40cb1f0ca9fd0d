"""Small-ball (Levy concentration) probabilities.

rho_eps(w) = sup_a P(|sum_i w_i xi_i - a| <= eps).  Windows are closed on
both sides here and in the affine variant, so rho is monotone in eps and the
affine statistic dominates the plain one on any shared sample set.  The sup
over a is exact for a finite sample: sort the sums and slide a window of
width 2 eps anchored at each sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc
from scipy.stats import binom

from .lcd import LcdParams, LcdResult, lcd_scan
from .spectra import wilson_interval

MAX_EXACT_N = 24
MIN_MC_SAMPLES = 10_000
AFFINE_GRID = 1024
REFINE_POINTS = 64
CHUNK_ROWS = 1 << 16

# e * (1 + (sqrt(pi)/2) erfc(1)): the constant from bounding E exp(-x^2/delta^2)
# by a layer-cake integral against the coordinate bound.
TENSOR_C0 = math.e * (1.0 + 0.5 * math.sqrt(math.pi) * erfc(1.0))


@dataclass(frozen=True)
class AtomDistribution:
    """Mean-zero atom law: "sign", "bernoulli" (centered, parameter p) or "gaussian"."""

    kind: str = "sign"
    p: float = 0.5
    normalize: bool = True

    def __post_init__(self):
        if self.kind not in ("sign", "bernoulli", "gaussian"):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == "bernoulli" and not 0.0 < self.p < 1.0:
            raise ValueError("bernoulli parameter must lie in (0, 1)")

    @property
    def discrete(self) -> bool:
        return self.kind != "gaussian"

    @property
    def scale(self) -> float:
        if self.kind == "bernoulli" and self.normalize:
            return 1.0 / math.sqrt(self.p * (1.0 - self.p))
        return 1.0

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """(values, probabilities) of a discrete atom."""
        if self.kind == "sign":
            return np.array([-1.0, 1.0]), np.array([0.5, 0.5])
        if self.kind == "bernoulli":
            p = self.p
            return np.array([-p, 1.0 - p]) * self.scale, np.array([1.0 - p, p])
        raise ValueError("gaussian atoms have no finite support")

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.standard_normal(shape)
        if self.kind == "sign":
            return 2.0 * rng.integers(0, 2, size=shape).astype(float) - 1.0
        return ((rng.random(shape) < self.p) - self.p) * self.scale

    def small_ball(self, t: float) -> float:
        """P(|xi| < t) for one atom."""
        if self.kind == "gaussian":
            return float(erf(t / math.sqrt(2.0)))
        vals, probs = self.support()
        return float(probs[np.abs(vals) < t].sum())


@dataclass(frozen=True)
class SmallBallEstimate:
    value: float
    eps: float
    samples: int
    ci_halfwidth: float
    mode: str                   # "exact" or "mc"
    center: float               # maximizing a
    shift: float | None = None  # maximizing w-bar (affine only)

    def to_dict(self) -> dict:
        return {"rho_hat": self.value, "epsilon": self.eps, "N": self.samples,
                "ci": self.ci_halfwidth, "mode": self.mode, "a": self.center, "wbar": self.shift}


def _tol(scale: float) -> float:
    # absorbs rounding in sums so that mathematically equal atoms share a window
    return 1e-12 * (1.0 + scale)


def window_sup(values, eps: float, weights=None, tol: float = 0.0) -> tuple[float, float]:
    """max over a of total weight in [a - eps, a + eps]; returns (mass, a)."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    s = values[order]
    w = np.ones_like(s) if weights is None else np.asarray(weights, dtype=float)[order]
    cum = np.concatenate(([0.0], np.cumsum(w)))
    right = np.searchsorted(s, s + 2.0 * eps + tol, side="right")
    mass = cum[right] - cum[:-1]
    k = int(np.argmax(mass))
    return float(mass[k]), float(s[k] + eps)


def enumerate_sums(w, dist: AtomDistribution) -> tuple[np.ndarray, np.ndarray]:
    """All 2^n outcomes of sum w_i xi_i with their probabilities."""
    w = np.asarray(w, dtype=float)
    if w.size > MAX_EXACT_N:
        raise ValueError(f"exact enumeration limited to n <= {MAX_EXACT_N}")
    vals, probs = dist.support()
    sums, mass = np.zeros(1), np.ones(1)
    for wi in w:
        sums = np.concatenate((sums + wi * vals[0], sums + wi * vals[1]))
        mass = np.concatenate((mass * probs[0], mass * probs[1]))
    return sums, mass


def levy_exact(w, eps: float, dist: AtomDistribution = AtomDistribution()) -> SmallBallEstimate:
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    sums, mass = enumerate_sums(w, dist)
    rho, a = window_sup(sums, eps, mass, _tol(np.abs(w).sum() * dist.scale))
    return SmallBallEstimate(min(rho, 1.0), eps, sums.size, 0.0, "exact", a)


def sample_sums(w, dist: AtomDistribution, N: int, rng: np.random.Generator,
                with_count: bool = False):
    """N draws of sum w_i xi_i (and of sum xi_i when ``with_count``), generated in row chunks."""
    w = np.asarray(w, dtype=float)
    s0 = np.empty(N)
    s1 = np.empty(N) if with_count else None
    for start in range(0, N, CHUNK_ROWS):
        stop = min(start + CHUNK_ROWS, N)
        xi = dist.sample(rng, (stop - start, w.size))
        s0[start:stop] = xi @ w
        if with_count:
            s1[start:stop] = xi.sum(axis=1)
    return (s0, s1) if with_count else s0


def _ci_halfwidth(hits: int, N: int, level: float = 0.95) -> float:
    lo, hi = wilson_interval(hits, N, level)
    return (hi - lo) / 2.0


def levy_mc(w, eps: float, dist: AtomDistribution, N: int, rng: np.random.Generator) -> SmallBallEstimate:
    if N < MIN_MC_SAMPLES:
        raise ValueError(f"Monte Carlo needs N >= {MIN_MC_SAMPLES}")
    sums = sample_sums(w, dist, N, rng)
    hits, a = window_sup(sums, eps, tol=_tol(np.abs(w).sum() * dist.scale))
    hits = int(round(hits))
    return SmallBallEstimate(hits / N, eps, N, _ci_halfwidth(hits, N), "mc", a)


# --- affine variant ---------------------------------------------------------------

def _compress(s0, s1, weights):
    pairs = np.stack([s0, s1], axis=1)
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    if uniq.shape[0] == s0.size:
        return s0, s1, weights
    return uniq[:, 0], uniq[:, 1], np.bincount(inv.ravel(), weights=weights)


def wbar_grid(w, resolution: int = AFFINE_GRID) -> np.ndarray:
    """Grid over [min w, max w] with ``resolution`` cells; 0 is always included."""
    w = np.asarray(w, dtype=float)
    lo, hi = float(w.min()), float(w.max())
    grid = np.linspace(lo, hi, resolution + 1) if hi > lo else np.array([lo])
    return np.union1d(grid, [0.0])


def affine_sup(s0, s1, weights, r: float, grid, tol: float = 0.0,
               refine: bool = True) -> tuple[float, float, float]:
    """max over w-bar in grid (plus a refinement pass) of window_sup(s0 - wbar s1)."""
    s0, s1, weights = _compress(np.asarray(s0, float), np.asarray(s1, float), np.asarray(weights, float))

    def scan(points):
        best = (-1.0, 0.0, 0.0)
        for wb in points:
            mass, a = window_sup(s0 - wb * s1, r, weights, tol)
            if mass > best[0]:
                best = (mass, a, float(wb))
        return best

    grid = np.asarray(grid, dtype=float)
    best = scan(grid)
    if refine and grid.size > 1:
        step = float(np.min(np.diff(grid)))
        fine = np.linspace(best[2] - step, best[2] + step, REFINE_POINTS + 1)
        cand = scan(fine)
        if cand[0] > best[0]:
            best = cand
    return best


def levy_affine(w, r: float, dist: AtomDistribution, N: int, rng: np.random.Generator,
                resolution: int = AFFINE_GRID) -> SmallBallEstimate:
    """rho_{L,r}(w) = sup_{a, wbar} P(|xi . (w - wbar 1) - a| <= r), Monte Carlo."""
    if N < MIN_MC_SAMPLES:
        raise ValueError(f"Monte Carlo needs N >= {MIN_MC_SAMPLES}")
    s0, s1 = sample_sums(w, dist, N, rng, with_count=True)
    tol = _tol((np.abs(w).sum() + np.ptp(w) * len(w)) * dist.scale)
    hits, a, wb = affine_sup(s0, s1, np.ones(N), r, wbar_grid(w, resolution), tol)
    hits = int(round(hits))
    return SmallBallEstimate(hits / N, r, N, _ci_halfwidth(hits, N), "mc", a, wb)


def levy_affine_exact(w, r: float, dist: AtomDistribution = AtomDistribution(),
                      resolution: int = AFFINE_GRID) -> SmallBallEstimate:
    """Enumeration oracle for the affine statistic on the same w-bar grid."""
    sums, mass = enumerate_sums(w, dist)
    ones = np.ones_like(np.asarray(w, dtype=float))
    counts, _ = enumerate_sums(ones, dist)
    tol = _tol((np.abs(w).sum() + np.ptp(w) * len(w)) * dist.scale)
    rho, a, wb = affine_sup(sums, counts, mass, r, wbar_grid(w, resolution), tol)
    return SmallBallEstimate(min(rho, 1.0), r, sums.size, 0.0, "exact", a, wb)


# --- inequality checks ---------------------------------------------------------------

@dataclass(frozen=True)
class LcdSmallBall:
    estimate: SmallBallEstimate
    lcd: LcdResult
    bound: float
    c_fit: float

    @property
    def holds(self) -> bool:
        return self.estimate.value <= self.bound


def lcd_smallball_compare(x, params: LcdParams, eps: float, dist: AtomDistribution, N: int,
                          rng: np.random.Generator, c_fit: float = 10.0,
                          lcd: LcdResult | None = None) -> LcdSmallBall:
    """rho_eps(x) next to c_fit (eps / gamma) + exp(-kappa^2 / 2); needs eps >= 1 / LCD."""
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    if lcd is None:
        lcd = lcd_scan(x, params)
    if eps * lcd.certified_lower < 1.0:
        raise ValueError("eps lies below 1/LCD; the bound's hypothesis fails")
    est = levy_mc(x, eps, dist, N, rng)
    bound = c_fit * eps / params.gamma + math.exp(-params.kappa ** 2 / 2.0)
    return LcdSmallBall(est, lcd, bound, c_fit)


@dataclass(frozen=True)
class LittlewoodOffordCheck:
    estimate: SmallBallEstimate
    large_count: int
    bound: float

    @property
    def holds(self) -> bool:
        return self.estimate.value <= self.bound


def littlewood_offord_check(w, r: float, dist: AtomDistribution, N: int, rng: np.random.Generator,
                            C: float = 3.0) -> LittlewoodOffordCheck:
    """rho_r(w) against C / sqrt(N') with N' the number of |w_i| >= r."""
    w = np.asarray(w, dtype=float)
    big = int(np.count_nonzero(np.abs(w) >= r))
    if big == 0:
        raise ValueError("no coordinate reaches modulus r")
    est = levy_exact(w, r, dist) if dist.discrete and w.size <= 16 else levy_mc(w, r, dist, N, rng)
    return LittlewoodOffordCheck(est, big, C / math.sqrt(big))


@dataclass(frozen=True)
class TensorizationRecord:
    probability: float
    bound: float
    hypothesis_ok: bool
    mode: str
    c0: float

    @property
    def holds(self) -> bool:
        return self.probability <= self.bound


def coordinate_hypothesis(dist: AtomDistribution, K: float, delta0: float, upto: float = 10.0,
                          points: int = 200) -> bool:
    """P(|xi| < t) <= K t on a log grid of t in [delta0, upto]."""
    ts = np.geomspace(delta0, max(upto, delta0), points)
    return all(dist.small_ball(t) <= K * t + 1e-15 for t in ts)


def tensorization_check(K: float, delta0: float, delta: float, n: int, dist: AtomDistribution,
                        N: int = 100_000, rng: np.random.Generator | None = None,
                        c0: float = TENSOR_C0, exact: bool | None = None) -> TensorizationRecord:
    """P(x_1^2 + ... + x_n^2 < delta^2 n) next to (c0 K delta)^n."""
    if delta < delta0:
        raise ValueError("delta must be at least delta0")
    if exact is None:
        exact = dist.discrete
    level = delta * delta * n
    if exact:
        vals, probs = dist.support()
        k = np.arange(n + 1)
        # k atoms take the second value
        sq = k * vals[1] ** 2 + (n - k) * vals[0] ** 2
        prob = float(binom.pmf(k, n, probs[1])[sq < level].sum())
        mode = "exact"
    else:
        if rng is None:
            raise ValueError("Monte Carlo mode needs an rng")
        hits = 0
        for start in range(0, N, CHUNK_ROWS):
            m = min(CHUNK_ROWS, N - start)
            x = dist.sample(rng, (m, n))
            hits += int(np.count_nonzero((x * x).sum(axis=1) < level))
        prob = hits / N
        mode = "mc"
    bound = float((c0 * K * delta) ** n)
    return TensorizationRecord(prob, bound, coordinate_hypothesis(dist, K, delta0), mode, float(c0))


# --- distance to a subspace ---------------------------------------------------------------

@dataclass(frozen=True)
class DistanceSample:
    distances: np.ndarray
    k: int

    @property
    def median(self) -> float:
        return float(np.median(self.distances))

    def quantiles(self, qs=(0.01, 0.1, 0.5, 0.9, 0.99)) -> dict:
        return {float(q): float(np.quantile(self.distances, q)) for q in qs}

    def tail_fractions(self, ts) -> np.ndarray:
        dev = np.abs(self.distances - self.median)
        scale = math.sqrt(max(self.k, 1))
        return np.array([np.mean(dev > t * scale) for t in ts])

    def tail_slope(self, ts) -> float:
        """Slope of log tail fraction against t^2, over the t with a nonzero fraction."""
        ts = np.asarray(ts, dtype=float)
        frac = self.tail_fractions(ts)
        ok = frac > 0
        if ok.sum() < 2:
            raise ValueError("need at least two nonzero tail fractions")
        return float(np.polyfit(ts[ok] ** 2, np.log(frac[ok]), 1)[0])


def random_frame(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal n x k basis of a uniformly random k-dimensional subspace."""
    if k == 0:
        return np.zeros((n, 0))
    q, r = np.linalg.qr(rng.standard_normal((n, k)))
    return q * np.sign(np.diag(r))


def distance_to_subspace_stat(n: int, k: int, dist: AtomDistribution, trials: int,
                              rng: np.random.Generator, u=None, basis=None) -> DistanceSample:
    """Samples of ||P v - u|| where P projects onto span(basis) and v has iid atoms."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    u = np.zeros(n) if u is None else np.asarray(u, dtype=float)
    fixed = basis is not None
    out = np.empty(trials)
    for t in range(trials):
        b = np.asarray(basis, dtype=float) if fixed else random_frame(n, k, rng)
        v = dist.sample(rng, n)
        out[t] = np.linalg.norm(b @ (b.T @ v) - u)
    return DistanceSample(out, k)
