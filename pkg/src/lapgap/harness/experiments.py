"""Experiment registry: one experiment per acceptance check.

Each experiment supplies a per-trial function ``trial(params, index, seed)``
returning a ``TrialOutput`` (persisted rows plus optional in-memory data) and
a ``summarize(params, outputs)`` producing the summary values, a pass flag and
any extra CSV tables.  Trial functions are module-level so worker processes
can import them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import stats

from .. import anticonc, deloc, lcd, overcrowd, qwalk, spectra
from ..graphs import (centered_laplacian, laplacian, rotate_last_two, sample_gnp, switch_neighbors,
                      switchable_set, trivial_direction)
from ..rng import AUX, derive_seed, stream
from .config import ConfigError


@dataclass
class TrialOutput:
    rows: list[tuple]
    aux: object = None


@dataclass
class Summary:
    values: dict
    passed: bool | None
    tables: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)


def _trials(params: dict) -> int:
    return params["trials"]


def _no_checks(params: dict) -> None:
    return None


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    columns: tuple[str, ...]
    defaults: dict
    quick: dict
    trial: Callable[[dict, int, int], TrialOutput]
    summarize: Callable[[dict, list[TrialOutput]], Summary]
    trial_count: Callable[[dict], int] = _trials
    validate: Callable[[dict], None] = _no_checks


def _rows(outputs):
    return [r for o in outputs for r in o.rows]


def _col(outputs, j):
    return np.array([r[j] for r in _rows(outputs)])


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _bulk_vector(n: int, p: float, seed: int) -> np.ndarray:
    """Nontrivial eigenvector of the centered Laplacian nearest the middle of the spectrum.

    The constant vector is itself an eigenvector (eigenvalue 0, mid-spectrum)
    and is skipped.
    """
    s = spectra.eigh(centered_laplacian(sample_gnp(n, p, seed)))
    cols = np.flatnonzero(deloc.nontrivial_mask(s.eigenvectors, trivial_direction(n)))
    j = cols[np.argmin(np.abs(cols - n // 2))]
    return s.eigenvectors[:, j]


# --- simplicity ---------------------------------------------------------------------

def simplicity_trial(params, index, seed):
    rep = spectra.gaps(spectra.eigvalsh(laplacian(sample_gnp(params["n"], params["p"], seed))),
                       params["tau"])
    return TrialOutput([(rep.min_gap, rep.argmin + 1, rep.simple)])


def simplicity_summary(params, outputs):
    simple = _col(outputs, 2).astype(bool)
    failures = int(np.count_nonzero(~simple))
    values = {"fraction_simple": float(simple.mean()), "failures": failures,
              "smallest_min_gap": float(_col(outputs, 0).min())}
    return Summary(values, failures <= params["max_failures"])


# --- gap curve ----------------------------------------------------------------------

def gap_curve_trial(params, index, seed):
    return TrialOutput([(spectra.gap_trial(params["n"], params["p"], params["index"], seed),)])


def gap_curve_validate(params):
    _require(params["trials"] >= 100, "gap-curve needs at least 100 trials")
    _require(1 <= params["index"] <= params["n"] - 1, "index must lie in 1..n-1")


def gap_curve_summary(params, outputs):
    curve = spectra.curve_from_gaps(_col(outputs, 0), params["deltas"])
    ratios = curve.ratios
    spread = float(ratios.max() / ratios.min()) if ratios.min() > 0 else math.inf
    values = {"ratios": ratios.tolist(), "ratio_spread": spread, "max_ratio": params["max_ratio"]}
    table = (("delta", "p_hat", "ci_lo", "ci_hi", "trials"), curve.rows)
    return Summary(values, spread <= params["max_ratio"], {"curve": table})


# --- minimum-gap scaling ---------------------------------------------------------------

def _scaling_n(params, index):
    return int(params["ns"][index // params["trials"]])


def min_gap_trial(params, index, seed):
    n = _scaling_n(params, index)
    return TrialOutput([(n, spectra.min_gap_trial(n, params["p"], seed))])


def min_gap_summary(params, outputs):
    ns = _col(outputs, 0).astype(int)
    g = _col(outputs, 1)
    fit = spectra.fit_min_gap_scaling({int(n): g[ns == n] for n in np.unique(ns)},
                                      seed=params["seed"], n_boot=params["n_boot"])
    ok = params["slope_lo"] <= fit.slope <= params["slope_hi"]
    values = {"slope": fit.slope, "slope_ci": list(fit.slope_ci), "intercept": fit.intercept,
              "band": [params["slope_lo"], params["slope_hi"]]}
    table = (("n", "median_min_gap", "q25", "q75"), fit.rows)
    return Summary(values, ok, {"scaling": table})


# --- rotation ------------------------------------------------------------------------

def rotation_trial(params, index, seed):
    m = centered_laplacian(sample_gnp(params["n"], params["p"], seed))
    a = spectra.eigvalsh(m)
    b = spectra.eigvalsh(rotate_last_two(m))
    limit = params["tol"] * (1.0 + float(np.max(np.abs(a))))
    return TrialOutput([(float(np.max(np.abs(a - b))), limit)])


def rotation_summary(params, outputs):
    d, lim = _col(outputs, 0), _col(outputs, 1)
    return Summary({"max_discrepancy": float(d.max()), "max_ratio": float((d / lim).max())},
                   bool(np.all(d <= lim)))


# --- switching ---------------------------------------------------------------------------

def switching_trial(params, index, seed):
    n, p, k = params["n"], params["p"], params["index"]
    fresh = spectra.eigvalsh(laplacian(sample_gnp(n, p, seed)))[k - 1]
    base = sample_gnp(n, p, derive_seed(seed, 1))
    size = int(switchable_set(base).size)
    switched = spectra.eigvalsh(laplacian(switch_neighbors(base)))[k - 1]
    return TrialOutput([(float(fresh), float(switched), size)])


def switching_summary(params, outputs):
    fresh, switched, sizes = _col(outputs, 0), _col(outputs, 1), _col(outputs, 2)
    ks = stats.ks_2samp(switched, fresh)
    crit = params["ks_coefficient"] * math.sqrt(2.0 / len(fresh))
    n, p = params["n"], params["p"]
    centre = (n - 2) * 2 * p * (1 - p)
    in_band = np.abs(sizes - centre) <= n / 8
    values = {"ks_statistic": float(ks.statistic), "critical": crit, "ks_pvalue": float(ks.pvalue),
              "mean_switch_set": float(sizes.mean()), "switch_set_centre": centre,
              "fraction_in_band": float(in_band.mean())}
    return Summary(values, bool(ks.statistic < crit))


# --- zero mode / spectral gap -----------------------------------------------------------

def zero_mode_trial(params, index, seed):
    n, p = params["n"], params["p"]
    s = spectra.eigh(laplacian(sample_gnp(n, p, seed)))
    u = trivial_direction(n)
    err = float(np.linalg.norm(s.eigenvectors[:, 0] - u))
    return TrialOutput([(float(s.eigenvalues[0]), err, float(s.eigenvalues[1]), p * n / 3.0, s.norm)])


def zero_mode_summary(params, outputs):
    tol = params["tol"]
    rows = _rows(outputs)
    zero_ok = all(abs(r[0]) <= tol * (1.0 + r[4]) and r[1] <= tol for r in rows)
    gap_ok = all(r[2] >= r[3] for r in rows)
    values = {"max_abs_lambda1": max(abs(r[0]) for r in rows),
              "max_vector_error": max(r[1] for r in rows),
              "min_lambda2_over_bound": min(r[2] / r[3] for r in rows),
              "zero_mode_ok": zero_ok, "gap_ok": gap_ok}
    return Summary(values, zero_ok and gap_ok)


# --- ESD ---------------------------------------------------------------------------------

@lru_cache(maxsize=4)
def density_table(lo: float, hi: float, points: int, eta: float) -> tuple[np.ndarray, np.ndarray]:
    grid = np.linspace(lo, hi, points)
    return grid, spectra.free_conv_density(grid, eta=eta)


def _density(params):
    return density_table(-params["support"], params["support"], params["grid_points"], params["eta"])


def esd_trial(params, index, seed):
    lam = spectra.centered_esd_trial(params["n"], params["p"], seed)
    grid, dens = _density(params)
    ks = spectra.ks_to_density(lam, grid, dens)
    return TrialOutput([(ks, float(lam.min()), float(lam.max()))], aux=lam)


def esd_summary(params, outputs):
    grid, dens = _density(params)
    pooled = np.concatenate([o.aux for o in outputs])
    ks = spectra.ks_to_density(pooled, grid, dens)
    # independent simulation oracle for the density at 0
    size, window = params["oracle_size"], params["oracle_window"]
    counts = sum(spectra.free_conv_oracle_trial(size, window, derive_seed(params["seed"], AUX, j))
                 for j in range(params["oracle_samples"]))
    oracle = counts / (params["oracle_samples"] * size * 2.0 * window)
    at_zero = float(spectra.free_conv_density([0.0], eta=params["eta"])[0])
    oracle_err = abs(at_zero - oracle) / oracle
    point = float(spectra.free_conv_density([0.0], eta=1e-7, base="point")[0])
    point_err = abs(point - 1.0 / math.pi)
    ok = ks <= params["ks_max"] and oracle_err <= params["oracle_rel_tol"] and point_err <= params["point_tol"]
    hist = spectra.esd_histogram([o.aux for o in outputs], 1.0, bins=params["bins"],
                                 range=(-params["support"], params["support"]))
    values = {"ks_pooled": ks, "ks_max": params["ks_max"], "density_at_zero": at_zero,
              "oracle_density_at_zero": oracle, "oracle_rel_error": oracle_err,
              "point_mass_density_error": point_err}
    tables = {"esd": (("bin_lo", "bin_hi", "count"),
                      list(zip(hist.edges[:-1].tolist(), hist.edges[1:].tolist(), hist.counts.tolist()))),
              "density": (("E", "density"), list(zip(grid.tolist(), dens.tolist())))}
    return Summary(values, bool(ok), tables)


# --- affine no-gaps -----------------------------------------------------------------------

def _n0(params):
    return max(1, int(round(params["n"] * params["n0_fraction"])))


def affine_trial(params, index, seed):
    # eigenvectors of the rotated centered Laplacian; its null vector is U^T 1 / sqrt(n)
    n = params["n"]
    s = spectra.eigh(rotate_last_two(centered_laplacian(sample_gnp(n, params["p"], seed))))
    cols = np.flatnonzero(deloc.nontrivial_mask(s.eigenvectors, trivial_direction(n, rotated=True)))
    n0 = _n0(params)
    vals = [deloc.affine_window_stat(s.eigenvectors[:, j], n0)[0] for j in cols]
    k = int(np.argmin(vals))
    return TrialOutput([(float(vals[k]), int(cols[k]) + 1, int(cols.size))])


def enumeration_mismatches(count: int, n: int, n0: int, seed: int) -> int:
    """Window algorithm against brute force over all subsets of size n0."""
    rng = stream(seed, AUX, 8)
    bad = 0
    for _ in range(count):
        v = rng.standard_normal(n)
        fast = deloc.affine_window_stat(v, n0)[0]
        brute = min(deloc.affine_residual(v, list(c))[0] for c in itertools.combinations(range(n), n0))
        bad += abs(fast - brute) > 1e-12 * (1.0 + brute)
    return int(bad)


def affine_summary(params, outputs):
    m = _col(outputs, 0)
    mism = enumeration_mismatches(params["enum_vectors"], params["enum_n"], params["enum_n0"], params["seed"])
    values = {"min_affine_window": float(m.min()), "threshold": params["threshold"],
              "enumeration_mismatches": mism}
    return Summary(values, bool(m.min() > params["threshold"] and mism == 0))


# --- LCD --------------------------------------------------------------------------------

def _spread(params):
    return deloc.SpreadParams(params["c0"], params["c1"], params["C"])


def lcd_trial(params, index, seed):
    n = params["n"]
    v = _bulk_vector(n, params["p"], seed)
    m = int(round(n * params["subset_fraction"]))
    kappa = n ** params["kappa_exponent"]
    target = math.sqrt(n)
    res = lcd.lcd_scan(v[:m], lcd.LcdParams(kappa, params["gamma"], target))
    certified = res.certified_lower >= target
    sp = _spread(params)
    applicable = deloc.spread_hypothesis(v, sp)
    violation = False
    if applicable:
        floor = math.sqrt(n) / (2.0 * sp.C)
        chk = lcd.lcd_scan(v, lcd.LcdParams(kappa, sp.lemma_gamma, floor))
        violation = chk.certified_lower < floor
    return TrialOutput([(res.kind, res.theta, certified, applicable, violation)])


def lcd_closed_form_errors() -> list[float]:
    errs = []
    for n, kappa, gamma in [(1, 1.0, 0.1), (10, 0.5, 0.3), (10, 5.0, 0.05)]:
        e = np.zeros(n)
        e[0] = 1.0
        r = lcd.lcd_scan(e, lcd.LcdParams(kappa, gamma, 10.0))
        errs.append(abs(r.theta - 1.0 / (1.0 + gamma)) if r.found else math.inf)
    for n, kappa, gamma in [(16, 1.0, 0.1), (25, 2.0, 0.2), (64, 3.0, 0.1)]:
        r = lcd.lcd_scan(np.ones(n), lcd.LcdParams(kappa, gamma, float(n)))
        want = math.sqrt(n) * max(1.0 / (1.0 + gamma), 1.0 - kappa / math.sqrt(n))
        errs.append(abs(r.theta - want) if r.found else math.inf)
    return errs


def lcd_summary(params, outputs):
    rows = _rows(outputs)
    frac = float(np.mean([r[2] for r in rows]))
    applicable = sum(bool(r[3]) for r in rows)
    violations = sum(bool(r[4]) for r in rows)
    errs = lcd_closed_form_errors()
    ok = frac >= params["fraction_min"] and violations == 0 and max(errs) <= params["closed_tol"]
    values = {"fraction_certified": frac, "fraction_min": params["fraction_min"],
              "spread_applicable": applicable, "spread_violations": violations,
              "closed_form_max_error": max(errs)}
    return Summary(values, bool(ok))


# --- small-ball ---------------------------------------------------------------------------

def smallball_trial(params, index, seed):
    n = params["n"]
    x = _bulk_vector(n, params["p"], seed)
    eps = params["eps_scale"] / math.sqrt(n)
    lp = lcd.LcdParams(n ** params["kappa_exponent"], params["gamma"], 1.0 / eps)
    cert = lcd.lcd_scan(x, lp)
    rng = stream(seed, AUX)
    dist = anticonc.AtomDistribution("sign")
    if eps * cert.certified_lower < 1.0:
        est = anticonc.levy_mc(x, eps, dist, params["N"], rng)
        bound = params["c_fit"] * eps / params["gamma"] + math.exp(-lp.kappa ** 2 / 2.0)
        return TrialOutput([(est.value, est.ci_halfwidth, bound, cert.kind, cert.theta, False, False)])
    rec = anticonc.lcd_smallball_compare(x, lp, eps, dist, params["N"], rng, params["c_fit"], lcd=cert)
    e = rec.estimate
    return TrialOutput([(e.value, e.ci_halfwidth, rec.bound, cert.kind, cert.theta, True, rec.holds)])


def smallball_oracle(params) -> dict:
    """MC against exact enumeration, and the affine dominance, on random small instances."""
    rng = stream(params["seed"], AUX, 10)
    dist = anticonc.AtomDistribution("sign")
    mismatches = dominance = 0
    worst = 0.0
    for j in range(params["oracle_instances"]):
        n = int(rng.integers(4, params["oracle_n_max"] + 1))
        w = rng.standard_normal(n)
        w /= np.linalg.norm(w)
        eps = float(rng.uniform(0.02, 0.4))
        exact = anticonc.levy_exact(w, eps, dist)
        mc = anticonc.levy_mc(w, eps, dist, params["oracle_N"], stream(params["seed"], AUX, 11, j))
        dev = abs(mc.value - exact.value) / max(mc.ci_halfwidth, 1e-300)
        worst = max(worst, dev)
        mismatches += dev > params["ci_mult"]
        aff = anticonc.levy_affine_exact(w, eps, dist, params["affine_resolution"])
        dominance += aff.value < exact.value
    return {"mc_exact_mismatches": int(mismatches), "worst_ci_multiple": worst,
            "affine_dominance_violations": int(dominance)}


def smallball_summary(params, outputs):
    rows = _rows(outputs)
    frac = float(np.mean([r[6] for r in rows]))
    hyp = float(np.mean([r[5] for r in rows]))
    oracle = smallball_oracle(params)
    ok = (frac >= params["fraction_min"] and oracle["mc_exact_mismatches"] == 0
          and oracle["affine_dominance_violations"] == 0)
    values = {"fraction_bound_holds": frac, "fraction_min": params["fraction_min"],
              "fraction_hypothesis_met": hyp, "c_fit": params["c_fit"], **oracle}
    return Summary(values, bool(ok))


# --- overcrowding -------------------------------------------------------------------------

def _perturbation(params):
    if params["f_kind"] == "zero":
        return overcrowd.ZERO
    if params["f_kind"] == "shift":
        return overcrowd.Perturbation.shift(params["p"] * params["n"])
    raise ValueError(f"unknown f_kind {params['f_kind']!r}")


def overcrowding_trial(params, index, seed):
    n, ks = params["n"], params["ks"]
    F = _perturbation(params)
    sv = spectra.singular_values(F.apply(laplacian(sample_gnp(n, params["p"], seed)).data))
    rows = []
    for k in ks:
        sigma = overcrowd.kth_smallest_singular(sv, k)
        rows.append((int(k), sigma, sigma <= params["c"] * k / math.sqrt(n)))
    return TrialOutput(rows)


def overcrowding_fixtures(n: int = 10) -> float:
    """Largest deviation from the closed forms on the empty graph and K_n."""
    empty = laplacian(sample_gnp(n, 0.0, allow_degenerate=True))
    full = laplacian(sample_gnp(n, 1.0, allow_degenerate=True))
    dev = max(overcrowd.overcrowding_stat(empty, k).sigma for k in range(1, n + 1))
    dev = max(dev, overcrowd.overcrowding_stat(full, 1).sigma)
    dev = max(dev, max(abs(overcrowd.overcrowding_stat(full, k).sigma - n) for k in range(2, n + 1)))
    return float(dev)


def overcrowding_summary(params, outputs):
    n, ks = params["n"], list(params["ks"])
    rows = _rows(outputs)
    hits = [sum(bool(r[2]) for r in rows if r[0] == k) for k in ks]
    F = _perturbation(params)
    curve = overcrowd.curve_from_hits(n, params["p"], ks, hits, params["trials"], F, params["c"])
    fixture = overcrowding_fixtures()
    last = curve.rows[-1]["p_hat"]
    ok = curve.nonincreasing and last <= params["p_max"] and fixture <= 1e-12 * 10
    table = (("n", "p", "k", "c", "F_kind", "p_hat", "ci_lo", "ci_hi", "trials"),
             [(n, params["p"], r["k"], params["c"], curve.f_kind, r["p_hat"], r["ci_lo"], r["ci_hi"],
               params["trials"]) for r in curve.rows])
    values = {"probabilities": curve.probabilities.tolist(), "nonincreasing": curve.nonincreasing,
              "p_max": params["p_max"], "fixture_max_deviation": fixture}
    return Summary(values, bool(ok), {"curve": table})


# --- small coordinates ------------------------------------------------------------------------

def small_coords_trial(params, index, seed):
    g = sample_gnp(params["n"], params["p"], seed)
    out = []
    for m in (laplacian(g), centered_laplacian(g)):
        v = spectra.eigh(m).eigenvectors
        out.append(max(deloc.small_coordinate_count(v[:, j], params["B"]) for j in range(v.shape[1])))
    return TrialOutput([tuple(out)])


def small_coords_summary(params, outputs):
    a, b = _col(outputs, 0), _col(outputs, 1)
    worst = int(max(a.max(), b.max()))
    return Summary({"max_small_L": int(a.max()), "max_small_Lbar": int(b.max())},
                   worst <= params["max_count"])


# --- quantum walk --------------------------------------------------------------------------------

def qwalk_trial(params, index, seed):
    n, gamma = params["n"], params["gamma"]
    s = spectra.eigh(laplacian(sample_gnp(n, params["p"], seed)))
    rows = []
    for T in params["Ts"]:
        cfg = qwalk.WalkConfig.at_vertex(n, params["vertex"], gamma, float(T))
        rep = qwalk.discrepancy(s, cfg)
        norm_err = abs(float(np.linalg.norm(qwalk.evolve(s, cfg, float(T)))) - 1.0)
        bound = math.nan if rep.bound is None else rep.bound
        rows.append((float(T), gamma, rep.discrepancy, bound, rep.min_gap, n, norm_err))
    return TrialOutput(rows)


def k2_errors() -> dict:
    s = spectra.eigh(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    cfg = qwalk.WalkConfig.at_vertex(2, 0, 1.0, 1e4)
    amp = max(abs(qwalk.evolve(s, cfg, t)[1] - 1j * np.exp(-1j * t) * np.sin(t))
              for t in (0.1, 0.5, 1.0, math.pi / 2, 3.0))
    p_inf = qwalk.limiting_distribution(s, cfg)
    long = qwalk.time_avg_distribution(s, qwalk.WalkConfig.at_vertex(2, 0, 1.0, 1e6))
    rep = qwalk.discrepancy(s, cfg)
    return {"amplitude_error": float(amp), "limit_error": float(np.abs(p_inf - 0.5).max()),
            "long_time_error": float(np.abs(long - p_inf).max()),
            "k2_discrepancy": rep.discrepancy, "k2_bound": rep.bound}


def quadrature_error(count: int, n: int, T: float, seed: int) -> float:
    worst = 0.0
    for j in range(count):
        s = spectra.eigh(laplacian(sample_gnp(n, 0.5, derive_seed(seed, AUX, 13, j))))
        psi = stream(seed, AUX, 14, j).standard_normal(n)
        cfg = qwalk.WalkConfig(psi / np.linalg.norm(psi), 1.0, T)
        diff = qwalk.time_avg_distribution(s, cfg) - qwalk.quadrature_distribution(s, cfg)
        worst = max(worst, float(np.abs(diff).max()))
    return worst


def qwalk_summary(params, outputs):
    rows = _rows(outputs)
    checked = [r for r in rows if not math.isnan(r[3])]
    holds = sum(r[2] <= r[3] for r in checked)
    k2 = k2_errors()
    quad = quadrature_error(params["quad_instances"], params["quad_n"], params["quad_T"], params["seed"])
    norm_err = max(r[6] for r in rows)
    ok = (holds == len(rows) and norm_err <= params["unitarity_tol"] and quad <= params["quad_tol"]
          and k2["amplitude_error"] <= 1e-10 and k2["limit_error"] <= 1e-10
          and k2["long_time_error"] <= 1e-5 and k2["k2_discrepancy"] <= 1e-3 and k2["k2_bound"] <= 1e-3)
    values = {"cases": len(rows), "bound_available": len(checked), "bound_holds": holds,
              "max_norm_error": norm_err, "quadrature_max_error": quad,
              "max_ratio": max((r[2] / r[3] for r in checked if r[3] > 0), default=0.0), **k2}
    return Summary(values, bool(ok))


# --- registry ---------------------------------------------------------------------------------------

P = 0.5

REGISTRY: dict[str, Experiment] = {e.name: e for e in [
    Experiment("simplicity", "every Laplacian spectrum is simple",
               ("min_gap", "argmin", "simple"),
               {"n": 200, "p": P, "trials": 500, "tau": 1e-10, "max_failures": 0},
               {"trials": 50}, simplicity_trial, simplicity_summary),
    Experiment("gap-curve", "P(gap <= delta / sqrt(n)) / delta is flat across delta",
               ("scaled_gap",),
               {"n": 200, "p": P, "index": 100, "trials": 2000, "deltas": (0.05, 0.1, 0.2, 0.4),
                "max_ratio": 3.0},
               {"trials": 200}, gap_curve_trial, gap_curve_summary, validate=gap_curve_validate),
    Experiment("min-gap-scaling", "log-log slope of the median minimum gap",
               ("n", "min_gap"),
               {"ns": (100, 200, 400, 800), "p": P, "trials": 200, "slope_lo": -1.9, "slope_hi": -1.1,
                "n_boot": 1000},
               {"ns": (50, 100, 200), "trials": 30, "n_boot": 200}, min_gap_trial, min_gap_summary,
               trial_count=lambda params: params["trials"] * len(params["ns"])),
    Experiment("rotation", "centered Laplacian and its rotation share the spectrum",
               ("max_discrepancy", "limit"),
               {"n": 200, "p": P, "trials": 100, "tol": 1e-10},
               {"trials": 20}, rotation_trial, rotation_summary),
    Experiment("switching", "neighbor switching preserves the law of a bulk eigenvalue",
               ("lambda_fresh", "lambda_switched", "switch_set_size"),
               {"n": 200, "p": P, "index": 100, "trials": 1000, "ks_coefficient": 1.63},
               {"trials": 200}, switching_trial, switching_summary),
    Experiment("zero-mode", "zero eigenvalue with constant eigenvector; lambda_2 >= pn/3",
               ("lambda1", "vector_error", "lambda2", "lambda2_bound", "norm"),
               {"n": 200, "p": P, "trials": 500, "tol": 1e-10},
               {"trials": 50}, zero_mode_trial, zero_mode_summary),
    Experiment("esd", "spectral distribution of the normalized centered Laplacian",
               ("ks_trial", "lambda_min", "lambda_max"),
               {"n": 1000, "p": P, "trials": 20, "ks_max": 0.05, "eta": 1e-3, "support": 7.0,
                "grid_points": 1401, "bins": 100, "oracle_size": 1000, "oracle_samples": 200,
                "oracle_window": 0.1, "oracle_rel_tol": 0.02, "point_tol": 1e-6},
               {"n": 400, "trials": 5, "oracle_size": 400, "oracle_samples": 100},
               esd_trial, esd_summary),
    Experiment("affine-nogaps", "affine no-gaps statistic of nontrivial eigenvectors",
               ("min_affine_window", "eig_index", "nontrivial"),
               {"n": 400, "p": P, "trials": 100, "n0_fraction": 0.125, "threshold": 1e-3,
                "enum_vectors": 50, "enum_n": 12, "enum_n0": 4},
               {"trials": 10, "enum_vectors": 10}, affine_trial, affine_summary),
    Experiment("lcd", "LCD certificates for eigenvector restrictions",
               ("kind", "theta", "certified", "spread_applicable", "spread_violation"),
               {"n": 200, "p": P, "trials": 200, "subset_fraction": 0.5, "kappa_exponent": 1.0 / 3.0,
                "gamma": 0.1, "fraction_min": 0.99, "c0": 0.2, "c1": 0.002, "C": 3.0, "closed_tol": 1e-6},
               {"trials": 20}, lcd_trial, lcd_summary),
    Experiment("smallball", "small-ball probabilities against the LCD bound",
               ("rho_hat", "ci", "bound", "lcd_kind", "lcd_theta", "hypothesis", "holds"),
               {"n": 100, "p": P, "trials": 100, "N": 100_000, "eps_scale": 2.0, "gamma": 0.1,
                "kappa_exponent": 1.0 / 3.0, "c_fit": 10.0, "fraction_min": 0.95, "oracle_instances": 20,
                "oracle_n_max": 16, "oracle_N": 1_000_000, "ci_mult": 3.0, "affine_resolution": 64},
               {"trials": 20, "N": 20_000, "oracle_instances": 5, "oracle_N": 200_000},
               smallball_trial, smallball_summary),
    Experiment("overcrowding", "small singular values do not crowd",
               ("k", "sigma", "indicator"),
               {"n": 300, "p": P, "trials": 300, "ks": (10, 20, 40), "c": 0.1, "p_max": 0.01,
                "f_kind": "zero"},
               {"trials": 100}, overcrowding_trial, overcrowding_summary,
               validate=lambda params: _require(params["trials"] >= 100, "overcrowding needs >= 100 trials")),
    Experiment("small-coords", "no eigenvector has two coordinates below n^-B",
               ("max_small_L", "max_small_Lbar"),
               {"n": 200, "p": P, "trials": 500, "B": 6.0, "max_count": 1},
               {"trials": 30}, small_coords_trial, small_coords_summary),
    Experiment("qwalk", "quantum walk discrepancy against the gap bound",
               ("T", "gamma", "discrepancy", "bound", "min_gap", "n", "norm_error"),
               {"n": 50, "p": P, "trials": 50, "Ts": (10.0, 100.0, 1000.0), "gamma": 1.0, "vertex": 0,
                "quad_instances": 10, "quad_n": 20, "quad_T": 10.0, "quad_tol": 1e-6,
                "unitarity_tol": 1e-12},
               {"trials": 10, "quad_instances": 3}, qwalk_trial, qwalk_summary),
]}


def get(name: str) -> Experiment:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(REGISTRY)}") from None
