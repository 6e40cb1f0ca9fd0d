"""Overcrowding of small singular values and well-conditioned column subsets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graphs import MatrixInstance, laplacian, sample_gnp
from .rng import derive_seed
from .spectra import singular_values, wilson_interval

DEFAULT_C = 0.1


@dataclass(frozen=True)
class Perturbation:
    """The deterministic matrix F added to L: zero, a scaled identity, or explicit."""

    kind: str = "zero"          # "zero" | "identity" | "matrix"
    scale: float = 0.0
    matrix: np.ndarray | None = None

    @classmethod
    def shift(cls, lam0: float) -> "Perturbation":
        return cls("identity", -float(lam0))

    def apply(self, a: np.ndarray) -> np.ndarray:
        if self.kind == "zero":
            return a
        if self.kind == "identity":
            return a + self.scale * np.eye(a.shape[0])
        f = np.asarray(self.matrix, dtype=float)
        if f.shape != a.shape or not np.array_equal(f, f.T):
            raise ValueError("F must be symmetric with the shape of the matrix")
        return a + f

    def describe(self) -> str:
        if self.kind == "identity":
            return f"identity*{self.scale:.17g}"
        return self.kind


ZERO = Perturbation()


@dataclass(frozen=True)
class OvercrowdRecord:
    k: int
    sigma: float
    threshold: float
    c: float
    f_kind: str
    indicator: bool


def kth_smallest_singular(sv_desc: np.ndarray, k: int) -> float:
    n = sv_desc.size
    if not 1 <= k <= n:
        raise ValueError("k must lie in 1..n")
    return float(sv_desc[n - k])


def overcrowding_stat(m, k: int, F: Perturbation = ZERO, c: float = DEFAULT_C) -> OvercrowdRecord:
    """sigma_{n-k+1}(m + F), the k-th smallest singular value, against c k / sqrt(n)."""
    a = m.data if isinstance(m, MatrixInstance) else np.asarray(m, dtype=float)
    sv = singular_values(F.apply(a))
    sigma = kth_smallest_singular(sv, k)
    thr = c * k / math.sqrt(a.shape[0])
    return OvercrowdRecord(k, sigma, thr, c, F.describe(), sigma <= thr)


@dataclass
class OvercrowdCurve:
    n: int
    p: float
    c: float
    f_kind: str
    trials: int
    rows: list[dict]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([r["p_hat"] for r in self.rows])

    @property
    def nonincreasing(self) -> bool:
        # only rows inside the theorem's range of k count
        p = np.array([r["p_hat"] for r in self.rows if r["in_range"]])
        return bool(np.all(np.diff(p) <= 0))


def overcrowding_trial(n: int, p: float, ks, F: Perturbation, c: float, seed: int) -> list[bool]:
    sv = singular_values(F.apply(laplacian(sample_gnp(n, p, seed)).data.astype(float)))
    return [kth_smallest_singular(sv, k) <= c * k / math.sqrt(n) for k in ks]


def overcrowding_curve(n: int, p: float, ks, trials: int, seed: int, F: Perturbation = ZERO,
                       c: float = DEFAULT_C, log_constant: float = 1.0) -> OvercrowdCurve:
    """Empirical P(sigma_{n-k+1}(L + F) <= c k / sqrt(n)) per k with Wilson CIs.

    Rows with k < log_constant * log n are flagged ``in_range = False``.
    """
    if trials < 100:
        raise ValueError("overcrowding curves need at least 100 trials")
    ks = [int(k) for k in ks]
    if min(ks) < 1:
        raise ValueError("k must be positive")
    hits = np.zeros(len(ks), dtype=int)
    for t in range(trials):
        hits += np.array(overcrowding_trial(n, p, ks, F, c, derive_seed(seed, t)), dtype=int)
    return curve_from_hits(n, p, ks, hits, trials, F, c, log_constant)


def curve_from_hits(n, p, ks, hits, trials, F: Perturbation, c, log_constant=1.0) -> OvercrowdCurve:
    rows = []
    for k, h in zip(ks, hits):
        lo, hi = wilson_interval(int(h), trials)
        rows.append({"k": int(k), "p_hat": int(h) / trials, "ci_lo": lo, "ci_hi": hi,
                     "in_range": k >= log_constant * math.log(n)})
    return OvercrowdCurve(n, p, c, F.describe(), trials, rows)


# --- column selection ------------------------------------------------------------------

@dataclass(frozen=True)
class ColumnSelection:
    index: np.ndarray
    sigma_l: float
    rhs: float

    @property
    def c_fit(self) -> float:
        """Largest c with sigma_l(A_I) >= c * rhs."""
        return math.inf if self.rhs == 0 else self.sigma_l / self.rhs


def selection_rhs(sv_desc: np.ndarray, l: int, n: int) -> float:
    """max over r in l+1..k of sqrt((r - l) sum_{i >= r} sigma_i^2 / (n r))."""
    k = sv_desc.size
    tail = np.cumsum((sv_desc ** 2)[::-1])[::-1]  # tail[r-1] = sum_{i >= r}
    r = np.arange(l + 1, k + 1)
    return float(np.max(np.sqrt((r - l) * tail[r - 1] / (n * r))))


def select_columns(a, l: int) -> ColumnSelection:
    """Greedy pivoted selection of l columns of a full-rank k x n matrix."""
    a = np.asarray(a, dtype=float)
    k, n = a.shape
    if not 1 <= l <= k - 1:
        raise ValueError("need 1 <= l <= k - 1")
    if np.linalg.matrix_rank(a) < k:
        raise ValueError("matrix must have full row rank")
    _, piv = scipy.linalg.qr(a, mode="r", pivoting=True)
    index = np.sort(piv[:l])
    sigma_l = float(singular_values(a[:, index])[l - 1])
    return ColumnSelection(index, sigma_l, selection_rhs(singular_values(a), l, n))
