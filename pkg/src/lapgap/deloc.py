"""Eigenvector delocalization diagnostics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from lapgap.spectra import SpectralDecomposition

ORTHOGONAL_TOL = 1e-8


def affine_residual(v, index) -> tuple[float, float]:
    """min over real a of ||v_I - a 1_I||, attained at a = mean(v_I)."""
    index = np.asarray(index)
    if index.size == 0:
        raise ValueError("index set must be nonempty")
    x = np.asarray(v, dtype=float)[index]
    a =float(x.mean())
    return float(np.linalg.norm(x - a)), a


def affine_window_stat(v, n0: int) -> tuple[float, np.ndarray, float]:
    """Exact min of ``affine_residual(v, I)`` over all |I| = n0.

    For a fixed shift the best I holds the n0 coordinates nearest to it,
    which are contiguous once v is sorted, so scanning the n - n0 + 1 sorted
    windows is exhaustive.  Returns (value, witness indices, shift).
    """
    x = np.asarray(v, dtype=float)
    n = x.size
    if not 1 <= n0 <= n:
        raise ValueError(f"need 1 <= n0 <= n, got n0={n0}, n={n}")
    order = np.argsort(x, kind="stable")
    s = x[order] - x.mean()
    c1 = np.concatenate(([0.0], np.cumsum(s)))
    c2 = np.concatenate(([0.0], np.cumsum(s * s)))
    tot = c1[n0:] - c1[:-n0]
    sq = c2[n0:] - c2[:-n0]
    ss = sq - tot * tot / n0
    # prefix-sum values pick the window; the winner is then evaluated directly
    k = int(np.argmin(ss))
    cand = np.flatnonzero(ss <= ss[k] + 1e-12 * max(1.0, abs(sq[k])))
    best = None
    for j in cand:
        idx = order[j:j + n0]
        val, a = affine_residual(x, idx)
        if best is None or val < best[0]:
            best = (val, np.sort(idx), a)
    return best


@dataclass(frozen=True)
class SpreadParams:
    c0: float
    c1: float
    C: float

    def __post_init__(self):
        if not 0.0 < self.c1 <= self.c0 < 1.0 < self.C:
            raise ValueError("need 0 < c1 <= c0 < 1 < C")

    @property
    def lemma_gamma(self) -> float:
        """Largest gamma for which a spread vector has LCD >= sqrt(n) / (2C)."""
        return 0.5 * math.sqrt((1.0 - self.c0 - self.C ** -2) * (self.c1 / self.c0))


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ValueError("vector must be nonzero")
    return x / nrm


def spread_set(x, params: SpreadParams) -> np.ndarray:
    """Indices with sqrt(c1/c0)/sqrt(n) <= |x_i| <= C/sqrt(n) (x normalized first)."""
    u = np.abs(_unit(x))
    n = u.size
    lo = math.sqrt(params.c1 / params.c0) / math.sqrt(n)
    hi = params.C / math.sqrt(n)
    return np.flatnonzero((u >= lo) & (u <= hi))


def spread_hypothesis(x, params: SpreadParams) -> bool:
    """The spread set covers at least (1 - c0 - C^-2) n coordinates."""
    n = np.asarray(x).size
    return spread_set(x, params).size >= (1.0 - params.c0 - params.C ** -2) * n


def no_gaps_mass(x, c0: float) -> float:
    """min ||x_I||^2 over |I| >= floor(c0 n) for unit-normalized x."""
    u2 = np.sort(_unit(x) ** 2)
    k = math.floor(c0 * u2.size)
    return float(u2[:k].sum())


def satisfies_no_gaps(x, params: SpreadParams) -> bool:
    """Hypothesis ||x_I||_2 >= sqrt(c1) for every |I| >= floor(c0 n)."""
    return no_gaps_mass(x, params.c0) >= params.c1


def large_coordinate_in_every_set(x, params: SpreadParams) -> bool:
    """Every S of size floor(c0 n) contains i with |x_i| >= sqrt(c1/c0)/sqrt(n).

    Equivalent to fewer than floor(c0 n) coordinates falling below the bound.
    """
    u = np.abs(_unit(x))
    n = u.size
    thr = math.sqrt(params.c1 / params.c0) / math.sqrt(n)
    return int(np.count_nonzero(u < thr)) < math.floor(params.c0 * n)


def sup_norm_profile(s: SpectralDecomposition | np.ndarray) -> np.ndarray:
    v = s.eigenvectors if isinstance(s, SpectralDecomposition) else np.asarray(s, dtype=float)
    return np.max(np.abs(v), axis=0)


def small_coordinate_count(v, B: float) -> int:
    """Number of coordinates with |v_i| < n**(-B)."""
    if B <= 0:
        raise ValueError("B must be positive")
    x = np.asarray(v, dtype=float)
    return int(np.count_nonzero(np.abs(x) < float(x.size) ** (-B)))


def nontrivial_mask(vectors, direction, tol: float = ORTHOGONAL_TOL) -> np.ndarray:
    """Columns whose overlap with the unit ``direction`` is at most ``tol``."""
    return np.abs(np.asarray(direction) @ np.asarray(vectors)) <= tol


# --- level-set decomposition ---------------------------------------------------

@dataclass(frozen=True)
class LevelSetParams:
    """Parameters of the greedy sparse/mixed split.

    ``lam`` is the block fraction; ``A0`` sets delta = (log n)^(-A0/lam);
    ``t0`` defaults to (log n)^(A0/16), small enough for
    delta * t0^(8/lam) < 1; ``alpha`` defaults to 1/log^2 n; the shift grid
    has denominator D = ceil(n^(C + 1/2)).
    """

    lam: float
    A0: float = 2.0
    C: float = 2.0
    t0: float | None = None
    alpha: float | None = None
    delta: float | None = None

    def resolve(self, n: int) -> dict:
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie in (0, 1)")
        log_n = math.log(n)
        delta = self.delta if self.delta is not None else log_n ** (-self.A0 / self.lam)
        t0 = self.t0 if self.t0 is not None else log_n ** (self.A0 / 16.0)
        alpha = self.alpha if self.alpha is not None else log_n ** -2
        if t0 <= 1.0:
            raise ValueError("t0 must exceed 1")
        if delta * t0 ** (8.0 / self.lam) >= 1.0:
            raise ValueError(
                f"delta * t0^(8/lam) = {delta * t0 ** (8.0 / self.lam):.3g} >= 1; "
                "approximation would be meaningless"
            )
        D = math.ceil(n ** (self.C + 0.5))
        return dict(delta=delta, t0=t0, alpha=alpha, lam=self.lam, D=D,
                    drop=math.floor(alpha * self.lam * n))


@dataclass
class SparseInterval:
    interval: tuple[int, int]      # half-open [start, stop)
    shift: float                   # a, with a/sqrt(n) the level
    kept: list[int]
    residual: float
    round: int


@dataclass
class LevelSetDecomposition:
    sparse_intervals: list[SparseInterval]
    mixed_intervals: list[tuple[int, int]]
    i0: int
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def level_intervals(n: int, lam: float) -> list[tuple[int, int]]:
    """The head block of ceil(lam n) indices, then blocks of k = floor(lam n / 4).

    The last block absorbs the remainder, so its length lies in [k, 2k).
    """
    head = math.ceil(lam * n)
    k = math.floor(lam * n / 4)
    if k < 1 or head >= n:
        raise ValueError("lam * n too small or too large to form blocks")
    out = [(0, head)]
    starts = list(range(head, n, k))
    if len(starts) > 1 and n - starts[-1] < k:
        starts.pop()
    for j, s in enumerate(starts):
        stop = starts[j + 1] if j + 1 < len(starts) else n
        out.append((s, stop))
    return out


def trimmed_residual(x, level: float, drop: int) -> tuple[float, np.ndarray]:
    """Best ||x_J' - level|| over J' dropping ``drop`` coordinates; returns (value, kept mask)."""
    x = np.asarray(x, dtype=float)
    dev = np.abs(x - level)
    keep = np.ones(x.size, dtype=bool)
    if drop > 0:
        keep[np.argsort(-dev, kind="stable")[:drop]] = False
    return float(np.linalg.norm(dev[keep])), keep


def best_grid_shift(x, n: int, D: int, drop: int) -> tuple[float, float]:
    """min over a in Z/D, |a| <= sqrt n of the trimmed residual of x - a/sqrt(n).

    The trimmed cost is a minimum of parabolas, one per sorted window of the
    kept size, so the grid optimum sits at a grid neighbour of some window mean.
    """
    x = np.asarray(x, dtype=float)
    m = x.size
    keep = m - drop
    if keep <= 0:
        return 0.0, 0.0
    rn = math.sqrt(n)
    s = np.sort(x)
    c1 = np.concatenate(([0.0], np.cumsum(s)))
    means = (c1[keep:] - c1[:-keep]) / keep
    cand = np.concatenate((np.floor(means * rn * D), np.ceil(means * rn * D))) / D
    cand = np.unique(np.clip(cand, -rn, rn))
    best = (math.inf, 0.0)
    for a in cand:
        r, _ = trimmed_residual(x, a / rn, drop)
        if r < best[0]:
            best = (r, float(a))
    return best


def level_set_decomposition(v, params: LevelSetParams) -> LevelSetDecomposition:
    """Greedy split of the index range into sparse (near-constant) and mixed blocks.

    Round j picks the lowest-indexed unselected block J that admits a shift
    a in Z/D and a subset J' of size >= |J| - alpha lam n with
    ||v_J' - a/sqrt(n)|| <= delta t0^j.  Stops at the first round where no
    block qualifies.
    """
    x = np.asarray(v, dtype=float)
    n = x.size
    prm = params.resolve(n)
    blocks = level_intervals(n, params.lam)
    fits = [best_grid_shift(x[a:b], n, prm["D"], prm["drop"]) for a, b in blocks]
    selected: list[SparseInterval] = []
    free = list(range(len(blocks)))
    j = 0
    while free:
        thr = prm["delta"] * prm["t0"] ** j
        pick = next((b for b in free if fits[b][0] <= thr), None)
        if pick is None:
            break
        a0, b0 = blocks[pick]
        res, shift = fits[pick]
        _, keep = trimmed_residual(x[a0:b0], shift / math.sqrt(n), prm["drop"])
        kept = (np.flatnonzero(keep) + a0).tolist()
        selected.append(SparseInterval((a0, b0), shift, kept, res, j))
        free.remove(pick)
        j += 1
    return LevelSetDecomposition(
        sparse_intervals=selected,
        mixed_intervals=[blocks[b] for b in free],
        i0=len(selected),
        params=prm,
    )


# --- approximate eigenvectors --------------------------------------------------

@dataclass(frozen=True)
class ApproxEigvecRecord:
    residual: float
    sum_abs: float
    norm_deviation: float
    D: int
    C: float
    residual_ok: bool
    sum_ok: bool
    norm_ok: bool

    @property
    def passed(self) -> bool:
        return self.residual_ok and self.sum_ok and self.norm_ok


def round_to_grid(v, D: int) -> np.ndarray:
    return np.round(np.asarray(v, dtype=float) * D) / D


def approx_eigvec_check(m, v, lam0: float, D: int, C: float = 2.0,
                        direction=None) -> ApproxEigvecRecord:
    """Residual, coordinate-sum and norm conditions for a grid vector.

    Thresholds are sqrt(n) log n n^-C, n^(1/2 - C) and n^-C.  The sum is
    sqrt(n) <v, u> for the unit null direction u of the matrix (1/sqrt n by
    default, which gives the plain coordinate sum).
    """
    a = m.data if hasattr(m, "data") else np.asarray(m, dtype=float)
    x = np.asarray(v, dtype=float)
    n = x.size
    if not np.allclose(x * D, np.round(x * D), rtol=0, atol=1e-6):
        raise ValueError("v must have entries in Z/D; use round_to_grid first")
    u = np.full(n, 1.0 / math.sqrt(n)) if direction is None else np.asarray(direction, float)
    resid = float(np.linalg.norm(a @ x - lam0 * x))
    sum_abs = float(abs(math.sqrt(n) * (u @ x)))
    dev = float(abs(np.linalg.norm(x) - 1.0))
    return ApproxEigvecRecord(
        residual=resid,
        sum_abs=sum_abs,
        norm_deviation=dev,
        D=int(D),
        C=C,
        residual_ok=resid <= math.sqrt(n) * math.log(n) * n ** (-C),
        sum_ok=sum_abs <= n ** (0.5 - C),
        norm_ok=dev <= n ** (-C),
    )

