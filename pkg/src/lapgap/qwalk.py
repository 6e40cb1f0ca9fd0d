"""Continuous-time quantum walk driven by a graph Laplacian.

psi(t) = exp(-i gamma L t) psi0 is evaluated in the eigenbasis of L.  With
c = V^T psi0, the time average over [0, T] of |<f|psi(t)>|^2 is

    P_f(T) = sum_{i,l} V_fi c_i conj(c_l) V_fl K(lambda_i - lambda_l),
    K(delta) = (1 - exp(-i gamma delta T)) / (i gamma delta T),  K(0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .spectra import SpectralDecomposition

CLUSTER_TOL = 1e-8
IMAG_TOL = 1e-10
SUM_TOL = 1e-10
NEG_TOL = 1e-12


class WalkError(RuntimeError):
    pass


@dataclass(frozen=True)
class WalkConfig:
    psi0: np.ndarray
    gamma: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        psi = np.asarray(self.psi0, dtype=complex)
        if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
            raise ValueError("initial state must have unit norm")
        if not self.gamma > 0 or not self.T > 0:
            raise ValueError("gamma and T must be positive")
        object.__setattr__(self, "psi0", psi)

    @classmethod
    def at_vertex(cls, n: int, f: int, gamma: float = 1.0, T: float = 1.0) -> "WalkConfig":
        psi = np.zeros(n, dtype=complex)
        psi[f] = 1.0
        return cls(psi, gamma, T)


@dataclass
class WalkReport:
    p_t: np.ndarray
    p_inf: np.ndarray
    discrepancy: float
    bound: float | None     # None when the spectrum is not simple
    min_gap: float

    @property
    def holds(self) -> bool | None:
        return None if self.bound is None else self.discrepancy <= self.bound

    @property
    def ratio(self) -> float | None:
        return None if not self.bound else self.discrepancy / self.bound


def _coefficients(s: SpectralDecomposition, cfg: WalkConfig) -> np.ndarray:
    if cfg.psi0.size != s.n:
        raise ValueError("state and decomposition sizes differ")
    return s.eigenvectors.T @ cfg.psi0


def evolve(s: SpectralDecomposition, cfg: WalkConfig, t: float) -> np.ndarray:
    c = _coefficients(s, cfg)
    return s.eigenvectors @ (np.exp(-1j * cfg.gamma * s.eigenvalues * t) * c)


def kernel(delta, gamma: float, T: float) -> np.ndarray:
    """(1 - exp(-i x)) / (i x) at x = gamma delta T, with the series near x = 0."""
    x = gamma * np.asarray(delta, dtype=float) * T
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 - 0.5j * xs - xs * xs / 6.0
    xb = x[~small]
    out[~small] = (1.0 - np.exp(-1j * xb)) / (1j * xb)
    return out


def _check_distribution(p: np.ndarray, what: str) -> np.ndarray:
    if abs(p.sum() - 1.0) > SUM_TOL or p.min() < -NEG_TOL:
        raise WalkError(f"{what} is not a probability vector (sum {p.sum():.3g}, min {p.min():.3g})")
    return np.clip(p, 0.0, None)


def time_avg_distribution(s: SpectralDecomposition, cfg: WalkConfig) -> np.ndarray:
    c = _coefficients(s, cfg)
    lam = s.eigenvalues
    m = np.outer(c, c.conj()) * kernel(lam[:, None] - lam[None, :], cfg.gamma, cfg.T)
    v = s.eigenvectors
    p = np.einsum("fi,il,fl->f", v, m, v)
    if np.max(np.abs(p.imag)) > IMAG_TOL:
        raise WalkError(f"imaginary residue {np.max(np.abs(p.imag)):.3g} exceeds tolerance")
    return _check_distribution(p.real, "time-averaged distribution")


def eigen_clusters(eigenvalues, tol: float = CLUSTER_TOL) -> list[np.ndarray]:
    """Index groups of ascending eigenvalues closer than tol * max(1, ||L||)."""
    lam = np.asarray(eigenvalues, dtype=float)
    scale = tol * max(1.0, float(np.max(np.abs(lam))))
    breaks = np.flatnonzero(np.diff(lam) > scale) + 1
    return np.split(np.arange(lam.size), breaks)


def limiting_distribution(s: SpectralDecomposition, cfg: WalkConfig, tol: float = CLUSTER_TOL) -> np.ndarray:
    """sum over eigenspaces of |(projector psi0)_f|^2; reduces to sum_i |v_i(f) c_i|^2 when simple."""
    c = _coefficients(s, cfg)
    v = s.eigenvectors
    p = np.zeros(s.n)
    for idx in eigen_clusters(s.eigenvalues, tol):
        p += np.abs(v[:, idx] @ c[idx]) ** 2
    return _check_distribution(p, "limiting distribution")


def gap_bound(s: SpectralDecomposition, cfg: WalkConfig) -> float:
    """sum_{i != l} 2 |c_i| |c_l| / (gamma T |lambda_i - lambda_l|)."""
    a = np.abs(_coefficients(s, cfg))
    lam = s.eigenvalues
    d = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(d, np.inf)
    return float(np.sum(2.0 * np.outer(a, a) / (cfg.gamma * cfg.T * d)))


def discrepancy(s: SpectralDecomposition, cfg: WalkConfig, tol: float = CLUSTER_TOL) -> WalkReport:
    p_t = time_avg_distribution(s, cfg)
    p_inf = limiting_distribution(s, cfg, tol)
    d = float(np.abs(p_t - p_inf).sum())
    simple = len(eigen_clusters(s.eigenvalues, tol)) == s.n
    min_gap = float(np.min(np.diff(s.eigenvalues))) if s.n > 1 else np.inf
    return WalkReport(p_t, p_inf, d, gap_bound(s, cfg) if simple else None, min_gap)


def quadrature_distribution(s: SpectralDecomposition, cfg: WalkConfig, nodes: int = 10_001) -> np.ndarray:
    """Simpson-rule oracle for the time average (odd node count)."""
    t = np.linspace(0.0, cfg.T, nodes)
    c = _coefficients(s, cfg)
    phases = np.exp(-1j * cfg.gamma * np.outer(t, s.eigenvalues)) * c
    prob = np.abs(phases @ s.eigenvectors.T) ** 2
    return simpson(prob, x=t, axis=0) / cfg.T
