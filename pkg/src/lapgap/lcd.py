"""Certified least-common-denominator scans.

For a unit vector x, LCD_{kappa,gamma}(x) is the infimum of theta > 0 with

    dist(theta x, Z^n) < min(gamma ||theta x||, kappa).

``lcd_scan`` walks theta upward on a grid.  f(theta) = dist(theta x, Z^n) is
1-Lipschitz (||x|| = 1) and g(theta) = min(gamma theta, kappa) is
gamma-Lipschitz, so on any interval of length h the gap f - g stays above
(F_left + F_right - (1 + gamma) h) / 2.  Intervals where that bound is not
positive are subdivided until they are certified, a violating theta is
found, or the width drops below ``resolution``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

SUBDIVISIONS = 8
RESOLUTION = 1e-9
CHUNK = 2048


@dataclass(frozen=True)
class LcdParams:
    kappa: float
    gamma: float
    theta_max: float
    h: float | None = None

    def __post_init__(self):
        if not self.kappa > 0 or not self.theta_max > 0:
            raise ValueError("kappa and theta_max must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.h is not None and not self.h > 0:
            raise ValueError("h must be positive")


@dataclass(frozen=True)
class LcdResult:
    """Outcome of a scan.

    ``kind == "found"``: theta violates the defining inequality (checked by
    direct evaluation) and no violation exists on (0, theta - step_final].
    ``kind == "lower_bound"``: no violation on (0, theta]; theta equals
    theta_max unless a near-tangency left part of the range uncertified.
    """

    kind: str
    theta: float
    distance: float
    kappa: float
    gamma: float
    theta_max: float
    step: float
    step_final: float = 0.0
    refinements: int = 0
    min_margin: float = math.inf
    shifts_tested: int = 1

    @property
    def found(self) -> bool:
        return self.kind == "found"

    @property
    def certified_lower(self) -> float:
        """A value the LCD is certified to exceed (or equal)."""
        return self.theta - self.step_final if self.found else self.theta

    def to_dict(self) -> dict:
        d = asdict(self)
        keep = ("kind", "theta", "distance", "kappa", "gamma", "theta_max", "step", "shifts_tested")
        return {k: d[k] for k in keep}


def dist_to_lattice(theta, x) -> np.ndarray | float:
    """Euclidean distance from theta * x to Z^n; vectorized over theta."""
    x = np.asarray(x, dtype=float)
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0):
        raise ValueError("theta must be nonnegative")
    t = th[..., None] * x
    d = np.sqrt(np.sum((t - np.rint(t)) ** 2, axis=-1))
    return float(d) if d.ndim == 0 else d


def default_step(x) -> float:
    x = np.asarray(x, dtype=float)
    return min(1.0 / (8.0 * float(np.max(np.abs(x))) * x.size), 1e-3)


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        raise ValueError("LCD is undefined for the zero vector")
    return x if abs(nrm - 1.0) <= 1e-12 else x / nrm


class _Scanner:
    def __init__(self, x, kappa, gamma, resolution):
        self.x = x
        self.kappa = kappa
        self.gamma = gamma
        self.lip = 1.0 + gamma
        self.resolution = resolution
        self.refinements = 0
        self.min_margin = math.inf
        self.uncertified_from = None

    def gap(self, theta):
        return dist_to_lattice(theta, self.x) - np.minimum(self.gamma * np.asarray(theta), self.kappa)

    def first_violation(self, lo, hi, f_lo, f_hi):
        """Scan [lo, hi] left to right: ('cert', None) or ('viol', t).

        Intervals that reach ``resolution`` without a certificate or a
        violating endpoint are skipped; the first such point is remembered
        and bounds how far the certificate reaches.
        """
        if f_lo < 0:
            return "viol", lo
        bound = (f_lo + f_hi - self.lip * (hi - lo)) / 2.0
        if bound > 0:
            self.min_margin = min(self.min_margin, bound)
            return "cert", None
        if hi - lo <= self.resolution:
            if f_hi < 0:
                return "viol", hi
            if self.uncertified_from is None:
                self.uncertified_from = lo
            return "cert", None
        self.refinements += 1
        pts = np.linspace(lo, hi, SUBDIVISIONS + 1)
        vals = np.empty_like(pts)
        vals[0], vals[-1] = f_lo, f_hi
        vals[1:-1] = self.gap(pts[1:-1])
        for a, b, fa, fb in zip(pts[:-1], pts[1:], vals[:-1], vals[1:]):
            status, t = self.first_violation(a, b, fa, fb)
            if status != "cert":
                return status, t
        return "cert", None


def lcd_scan(x, params: LcdParams, resolution: float = RESOLUTION) -> LcdResult:
    """Certified LCD search on (0, theta_max]; non-unit x is normalized first."""
    u = _unit(x)
    h = params.h if params.h is not None else default_step(u)
    if h >= 0.25:
        raise ValueError("step h >= 1/4 makes the certificate vacuous")
    kappa, gamma = params.kappa, params.gamma
    sc = _Scanner(u, kappa, gamma, resolution)

    def result(kind, theta, step_final=0.0):
        return LcdResult(kind, float(theta), float(dist_to_lattice(theta, u)), kappa, gamma,
                         params.theta_max, h, float(step_final), sc.refinements, float(sc.min_margin))

    # Below 1/(2 max|x_i|) every coordinate rounds to 0, so f = theta > gamma theta >= g.
    start = 0.5 / float(np.max(np.abs(u)))
    if start >= params.theta_max:
        return result("lower_bound", params.theta_max)
    lo = start
    f_lo = float(sc.gap(lo))
    while lo < params.theta_max:
        hi_end = min(lo + CHUNK * h, params.theta_max)
        m = max(1, math.ceil((hi_end - lo) / h - 1e-9))
        pts = np.linspace(lo, hi_end, m + 1)
        vals = sc.gap(pts)
        vals[0] = f_lo
        margin = (vals[:-1] + vals[1:] - sc.lip * np.diff(pts)) / 2.0
        bad = np.flatnonzero((margin <= 0) | (vals[:-1] < 0))
        if bad.size:
            sc.min_margin = min(sc.min_margin, float(margin[: bad[0]].min(initial=math.inf)))
        else:
            sc.min_margin = min(sc.min_margin, float(margin.min()))
        for k in bad:
            status, t = sc.first_violation(pts[k], pts[k + 1], vals[k], vals[k + 1])
            if status == "viol":
                theta = float(t)
                d = float(dist_to_lattice(theta, u))
                if not d < min(gamma * theta, kappa):
                    raise AssertionError("witness failed direct verification")
                width = _final_width(pts[k], pts[k + 1], resolution)
                if sc.uncertified_from is not None:
                    width = max(width, theta - sc.uncertified_from)
                return result("found", theta, width)
        lo, f_lo = pts[-1], vals[-1]
    if sc.uncertified_from is not None:
        return result("lower_bound", sc.uncertified_from)
    return result("lower_bound", params.theta_max)


def _final_width(lo, hi, resolution):
    w = hi - lo
    while w > resolution:
        w /= SUBDIVISIONS
    return w


# --- shifted / partitioned variants -------------------------------------------

def shift_grid(n: int, C: float = 2.0, count: int = 64) -> np.ndarray:
    """Subsample of {l / n^(C+1) : |a| <= n^(-1/2) log^2 n}, ``count`` evenly spaced points."""
    amax = math.log(n) ** 2 / math.sqrt(n)
    unit = float(n) ** (C + 1.0)
    full = 2 * math.floor(amax * unit) + 1
    if count >= full:
        ls = np.arange(-math.floor(amax * unit), math.floor(amax * unit) + 1)
    else:
        ls = np.unique(np.round(np.linspace(-amax, amax, count) * unit))
    return ls / unit


def combine_min(results: list[LcdResult]) -> LcdResult:
    """LCD of the minimum: a lower bound beats a witness only if strictly smaller."""
    best = min(results, key=lambda r: (r.theta, r.kind != "lower_bound"))
    return best


def combine_max(results: list[LcdResult]) -> LcdResult:
    """LCD of the maximum: exact only when every member is a witness."""
    best = max(results, key=lambda r: r.theta)
    if all(r.found for r in results):
        return best
    return LcdResult("lower_bound", best.theta, best.distance, best.kappa, best.gamma,
                     best.theta_max, best.step)


@dataclass
class PartitionedLcd:
    result: LcdResult
    parts: list[dict] = field(default_factory=list)
    degenerate: list[tuple[int, float]] = field(default_factory=list)
    shifts_tested: int = 0
    subsampled: bool = True

    @property
    def value(self) -> float:
        return self.result.theta

    def to_dict(self) -> dict:
        d = self.result.to_dict()
        d.update(shifts_tested=self.shifts_tested, subsampled=self.subsampled,
                 degenerate=[list(t) for t in self.degenerate],
                 parts=[{"part": p["part"], "shift": p["shift"], **p["result"].to_dict()}
                        for p in self.parts])
        return d


def partitioned_lcd(v_sub, k: int, kappa: float, gamma: float, shifts, theta_max: float,
                    h: float | None = None, subsampled: bool = True) -> PartitionedLcd:
    """max over k consecutive parts of min over shifts a of LCD((v_j - a 1)/||v_j - a 1||).

    Shifts leaving a part with norm below 1e-10 are skipped and reported in
    ``degenerate``.
    """
    v = np.asarray(v_sub, dtype=float)
    if not 1 <= k <= v.size:
        raise ValueError("part count must lie in 1..len(v)")
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    parts, degenerate, winners = [], [], []
    for j, idx in enumerate(np.array_split(np.arange(v.size), k)):
        per_shift = []
        for a in shifts:
            w = v[idx] - a
            if np.linalg.norm(w) < 1e-10:
                degenerate.append((j, float(a)))
                continue
            r = lcd_scan(w, LcdParams(kappa, gamma, theta_max, h))
            per_shift.append((float(a), r))
        if not per_shift:
            raise ValueError(f"every shift is degenerate for part {j}")
        best = combine_min([r for _, r in per_shift])
        a_best = next(a for a, r in per_shift if r is best)
        parts.append({"part": j, "shift": a_best, "result": best})
        winners.append(best)
    res = combine_max(winners)
    res = LcdResult(res.kind, res.theta, res.distance, res.kappa, res.gamma, res.theta_max,
                    res.step, res.step_final, res.refinements, res.min_margin,
                    shifts_tested=int(shifts.size))
    return PartitionedLcd(res, parts, degenerate, int(shifts.size), subsampled)


@dataclass(frozen=True)
class SubvectorRelation:
    lhs: LcdResult
    rhs: LcdResult
    scale: float              # ||x'|| / ||x||
    gamma_sub: float          # gamma ||x|| / ||x'||
    conclusive: bool
    holds: bool

    @property
    def rhs_value(self) -> float:
        return self.scale * self.rhs.theta


def subvector_lcd_relation(x, subindex, kappa: float, gamma: float, theta_max: float,
                           h: float | None = None) -> SubvectorRelation:
    """Both sides of LCD_{kappa, gamma ||x||/||x'||}(x') <= (||x'||/||x||) LCD_{kappa,gamma}(x)."""
    x = np.asarray(x, dtype=float)
    xs = x[np.asarray(subindex)]
    nx, ns = float(np.linalg.norm(x)), float(np.linalg.norm(xs))
    if ns == 0.0:
        raise ValueError("subvector must be nonzero")
    g_sub = gamma * nx / ns
    if not g_sub < 1.0:
        raise ValueError("need gamma ||x|| / ||x'|| < 1")
    scale = ns / nx
    rhs = lcd_scan(x, LcdParams(kappa, gamma, theta_max, h))
    lhs_max = scale * rhs.theta * (1.0 + 1e-6) + 1e-6 if rhs.found else scale * theta_max
    lhs = lcd_scan(xs, LcdParams(kappa, g_sub, lhs_max, h))
    tol = 1e-8 * max(1.0, rhs.theta)
    if rhs.found:
        conclusive = True
        holds = lhs.certified_lower <= scale * rhs.theta + tol
    else:
        conclusive = lhs.found
        holds = True
    return SubvectorRelation(lhs, rhs, scale, g_sub, conclusive, holds)
